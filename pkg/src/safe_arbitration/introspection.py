"""Per-step snapshots of an arbitration graph and the chosen-behavior timeline.

Snapshots serialize to a small YAML document (``*.ags.txt``) with a fixed key
order so that golden files can be compared byte for byte.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Union

import yaml

from .core import EXEMPT, NOT_EVALUATED, Arbitrator, Status

FORMAT_TAG = "ags-snapshot/1"
SNAPSHOT_SUFFIX = ".ags.txt"
TIMELINE_HEADER = ("step", "chosen")

VERIFICATION_MARKERS = (NOT_EVALUATED, Status.PASSED.value, Status.FAILED.value, EXEMPT)
KINDS = ("behavior", "arbitrator")
RESULTS = (Status.PASSED.value, Status.NO_SAFE_OPTION.value)


class SnapshotParseError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class NodeRecord:
    path: str
    kind: str
    applicable: bool
    committed: bool
    verification: str
    detail: str
    chosen: bool

    @property
    def name(self) -> str:
        return self.path.rsplit("/", 1)[-1]

    @property
    def depth(self) -> int:
        return self.path.count("/")


@dataclass(frozen=True)
class GraphSnapshot:
    step: int
    root: str
    result: str
    nodes: tuple[NodeRecord, ...] = ()

    def chosen_path(self) -> list[str]:
        return [n.path for n in self.nodes if n.chosen]

    @property
    def chosen_leaf(self) -> str:
        chosen = [n for n in self.nodes if n.chosen]
        if not chosen:
            return Status.NO_SAFE_OPTION.value
        return chosen[-1].name

    def node(self, path: str) -> NodeRecord:
        for n in self.nodes:
            if n.path == path or n.name == path:
                return n
        raise KeyError(path)


def capture(root: Arbitrator, step: int) -> GraphSnapshot:
    """Snapshot the evaluation trace left by the last ``execute_step``."""
    nodes: list[NodeRecord] = []

    def walk(arbitrator: Arbitrator, prefix: str) -> None:
        for option, rec in zip(arbitrator.options, arbitrator.records):
            path = f"{prefix}{option.name}"
            is_arb = isinstance(option.child, Arbitrator)
            nodes.append(
                NodeRecord(
                    path=path,
                    kind="arbitrator" if is_arb else "behavior",
                    applicable=rec.applicable,
                    committed=rec.committed,
                    verification=rec.verification,
                    detail=rec.detail,
                    chosen=rec.chosen,
                )
            )
            if is_arb:
                walk(option.child, path + "/")

    walk(root, "")
    any_chosen = any(r.chosen for r in root.records)
    result = Status.PASSED.value if any_chosen else Status.NO_SAFE_OPTION.value
    return GraphSnapshot(step=step, root=root.name, result=result, nodes=tuple(nodes))


# -- text rendering -------------------------------------------------------


def _markers(node: NodeRecord) -> str:
    return "".join(
        [
            "A" if node.applicable else "-",
            "C" if node.committed else "-",
            "X" if node.verification == Status.FAILED.value else "-",
            "*" if node.chosen else "-",
            "E" if node.verification == EXEMPT else "-",
        ]
    )


def render_text(snapshot: GraphSnapshot) -> str:
    """One line per node: indented name, marker column, verification detail.

    Markers are A(pplicable) C(ommitted) X (rejected) * (chosen) E(xempt).
    """
    lines = [f"step {snapshot.step}: {snapshot.root} -> {snapshot.result}"]
    width = max((2 * (n.depth + 1) + len(n.name) for n in snapshot.nodes), default=0)
    for node in snapshot.nodes:
        label = "  " * (node.depth + 1) + node.name
        line = f"{label.ljust(width)}  [{_markers(node)}] {node.verification}"
        if node.detail:
            line += f" ({node.detail})"
        lines.append(line)
    return "\n".join(lines) + "\n"


# -- serialization --------------------------------------------------------

_NODE_FIELDS = [f.name for f in fields(NodeRecord)]
_HEADER_FIELDS = ("format", "step", "root", "result", "nodes")


def to_document(snapshot: GraphSnapshot) -> dict:
    return {
        "format": FORMAT_TAG,
        "step": snapshot.step,
        "root": snapshot.root,
        "result": snapshot.result,
        "nodes": [{k: getattr(n, k) for k in _NODE_FIELDS} for n in snapshot.nodes],
    }


def serialize(snapshot: GraphSnapshot) -> str:
    return yaml.safe_dump(
        to_document(snapshot),
        sort_keys=False,
        indent=2,
        default_flow_style=False,
        allow_unicode=True,
        width=1000,
    )


def _expect(value, kind, path):
    if kind is bool:
        ok = isinstance(value, bool)
    elif kind is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    else:
        ok = isinstance(value, kind)
    if not ok:
        raise SnapshotParseError(path, f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def from_document(doc) -> GraphSnapshot:
    if not isinstance(doc, dict):
        raise SnapshotParseError("$", "document must be a mapping")
    for key in doc:
        if key not in _HEADER_FIELDS:
            raise SnapshotParseError(str(key), "unknown field")
    for key in _HEADER_FIELDS:
        if key not in doc:
            raise SnapshotParseError(key, "missing field")
    if doc["format"] != FORMAT_TAG:
        raise SnapshotParseError("format", f"unsupported format {doc['format']!r}")
    step = _expect(doc["step"], int, "step")
    root = _expect(doc["root"], str, "root")
    result = _expect(doc["result"], str, "result")
    if result not in RESULTS:
        raise SnapshotParseError("result", f"malformed marker {result!r}")
    raw_nodes = _expect(doc["nodes"], list, "nodes")

    nodes = []
    for i, raw in enumerate(raw_nodes):
        base = f"nodes[{i}]"
        if not isinstance(raw, dict):
            raise SnapshotParseError(base, "node must be a mapping")
        for key in raw:
            if key not in _NODE_FIELDS:
                raise SnapshotParseError(f"{base}.{key}", "unknown field")
        for key in _NODE_FIELDS:
            if key not in raw:
                raise SnapshotParseError(f"{base}.{key}", "missing field")
        kind = _expect(raw["kind"], str, f"{base}.kind")
        if kind not in KINDS:
            raise SnapshotParseError(f"{base}.kind", f"malformed marker {kind!r}")
        verification = _expect(raw["verification"], str, f"{base}.verification")
        if verification not in VERIFICATION_MARKERS:
            raise SnapshotParseError(f"{base}.verification", f"malformed marker {verification!r}")
        nodes.append(
            NodeRecord(
                path=_expect(raw["path"], str, f"{base}.path"),
                kind=kind,
                applicable=_expect(raw["applicable"], bool, f"{base}.applicable"),
                committed=_expect(raw["committed"], bool, f"{base}.committed"),
                verification=verification,
                detail=_expect(raw["detail"], str, f"{base}.detail"),
                chosen=_expect(raw["chosen"], bool, f"{base}.chosen"),
            )
        )
    return GraphSnapshot(step=step, root=root, result=result, nodes=tuple(nodes))


def deserialize(text: str) -> GraphSnapshot:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SnapshotParseError("$", f"not a valid document: {exc}") from exc
    return from_document(doc)


def write_snapshot(snapshot: GraphSnapshot, directory: Union[str, Path]) -> Path:
    path = Path(directory) / f"step_{snapshot.step:05d}{SNAPSHOT_SUFFIX}"
    path.write_text(serialize(snapshot), encoding="utf-8")
    return path


# -- timeline -------------------------------------------------------------


@dataclass
class Timeline:
    entries: list[tuple[int, str]] = field(default_factory=list)

    def append(self, step: int, chosen: str) -> None:
        if self.entries and step != self.entries[-1][0] + 1:
            raise ValueError(f"timeline steps must increase by 1, got {step} after {self.entries[-1][0]}")
        self.entries.append((step, chosen))

    def record(self, snapshot: GraphSnapshot) -> None:
        self.append(snapshot.step, snapshot.chosen_leaf)

    def __len__(self) -> int:
        return len(self.entries)

    def chosen(self) -> list[str]:
        return [c for _, c in self.entries]

    def segments(self) -> list[str]:
        """Chosen behaviors with consecutive repeats collapsed."""
        out: list[str] = []
        for _, name in self.entries:
            if not out or out[-1] != name:
                out.append(name)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TIMELINE_HEADER)
        writer.writerows(self.entries)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Timeline":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or tuple(rows[0]) != TIMELINE_HEADER:
            raise ValueError("timeline CSV must start with header 'step,chosen'")
        timeline = cls()
        for step, chosen in rows[1:]:
            timeline.append(int(step), chosen)
        return timeline


def timeline_from(snapshots: Iterable[GraphSnapshot]) -> Timeline:
    timeline = Timeline()
    for snap in snapshots:
        timeline.record(snap)
    return timeline
