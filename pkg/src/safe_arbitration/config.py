"""Strict YAML reading shared by run configs and scenario files."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Iterable, Mapping, Union

import yaml


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def load_yaml(source: Union[str, Path]) -> dict:
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read file ({exc.strerror})") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(str(path), f"malformed YAML: {exc}") from None
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("$", "top level must be a mapping")
    return doc


def join(path: str, key: Union[str, int]) -> str:
    if isinstance(key, int):
        return f"{path}[{key}]"
    return f"{path}.{key}" if path else str(key)


def section(doc: Mapping, key: str, path: str = "") -> dict:
    value = doc.get(key, {})
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(join(path, key), "must be a mapping")
    return value


def check_keys(doc: Mapping, allowed: Iterable[str], path: str = "") -> None:
    allowed = set(allowed)
    for key in doc:
        if key not in allowed:
            raise ConfigError(join(path, str(key)), "unknown key")


def number(doc: Mapping, key: str, default: Any, path: str = "", *, integer: bool = False) -> Any:
    value = doc.get(key, default)
    ok = isinstance(value, int) if integer else isinstance(value, (int, float))
    if isinstance(value, bool) or not ok:
        kind = "an integer" if integer else "a number"
        raise ConfigError(join(path, key), f"must be {kind}, got {value!r}")
    return value if integer else float(value)


def switch(doc: Mapping, key: str, default: bool, path: str = "") -> bool:
    value = doc.get(key, default)
    if isinstance(value, bool):
        return value
    if value in ("on", "off"):
        return value == "on"
    raise ConfigError(join(path, key), f"must be on/off, got {value!r}")
