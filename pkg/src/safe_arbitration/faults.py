"""Deterministic fault injection for behavior components."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import Behavior, BehaviorError

SIGNAL_FAILURE = "signal-failure"
BAD_COMMAND = "bad-command"
MODES = (SIGNAL_FAILURE, BAD_COMMAND)


@dataclass(frozen=True)
class FaultSpec:
    target: str
    mode: str
    probability: float = 0.0
    steps: Optional[frozenset] = None  # explicit schedule; overrides probability

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"fault mode must be one of {MODES}, got {self.mode!r}")
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"fault probability must lie in [0, 1], got {self.probability!r}")

    @classmethod
    def parse(cls, text: str) -> "FaultSpec":
        """Parse ``<behavior>:<mode>:<probability>``."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"fault spec must look like name:mode:prob, got {text!r}")
        name, mode, prob = parts
        try:
            p = float(prob)
        except ValueError:
            raise ValueError(f"fault probability {prob!r} is not a number") from None
        return cls(name, mode, p)


class FaultInjected(Behavior):
    """Wraps a behavior and corrupts some of its ``get_command`` calls.

    In ``signal-failure`` mode a faulty call raises :class:`BehaviorError`.
    In ``bad-command`` mode it returns ``bad_command(situation, command)``
    where ``command`` is what the healthy behavior would have returned (or
    None if that raised).  The wrapped behavior keeps its name, so graphs and
    snapshots look identical with and without injection.

    The random stream is advanced exactly once per ``get_command`` call.
    """

    def __init__(
        self,
        inner: Behavior,
        spec: FaultSpec,
        rng: np.random.Generator,
        bad_command: Optional[Callable] = None,
    ):
        super().__init__(inner.name)
        if spec.mode == BAD_COMMAND and bad_command is None:
            raise ValueError("bad-command faults need a bad_command factory")
        self.inner = inner
        self.spec = spec
        self.rng = rng
        self.bad_command = bad_command
        self.injected = 0

    def _faulty(self, situation) -> bool:
        draw = self.rng.random()
        if self.spec.steps is not None:
            return getattr(situation, "step", None) in self.spec.steps
        return draw < self.spec.probability

    def check_invocation(self, situation) -> bool:
        return self.inner.check_invocation(situation)

    def check_commitment(self, situation) -> bool:
        return self.inner.check_commitment(situation)

    def gain_control(self, situation) -> None:
        self.inner.gain_control(situation)

    def lose_control(self, situation) -> None:
        self.inner.lose_control(situation)

    def get_command(self, situation):
        if not self._faulty(situation):
            return self.inner.get_command(situation)
        self.injected += 1
        if self.spec.mode == SIGNAL_FAILURE:
            raise BehaviorError("injected fault")
        try:
            healthy = self.inner.get_command(situation)
        except Exception:
            healthy = None
        return self.bad_command(situation, healthy)
