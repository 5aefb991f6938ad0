"""Command verifiers and the generic fallback behaviors built around them."""

from __future__ import annotations

import logging
from typing import Any, Callable, Optional, Sequence

from .core import Behavior, Status, VerificationResult

logger = logging.getLogger(__name__)


class Verifier:
    """A named check ``fn(command, situation) -> VerificationResult``.

    Calling the verifier never raises: an exception inside ``fn`` becomes a
    FAILED result naming the error.  Verifiers only ever report PASSED or
    FAILED; NO_SAFE_OPTION belongs to arbitrators.  Failure details are
    prefixed with the verifier name so rejections can be traced.
    """

    def __init__(self, name: str, fn: Callable[[Any, Any], VerificationResult], *, prefix: bool = True):
        self.name = name
        self.fn = fn
        self.prefix = prefix

    def __call__(self, command, situation) -> VerificationResult:
        try:
            result = self.fn(command, situation)
        except Exception as exc:
            logger.debug("verifier %s raised %r", self.name, exc)
            return VerificationResult.failed(f"{self.name}: internal error: {exc}")
        if not isinstance(result, VerificationResult) or result.status is Status.NO_SAFE_OPTION:
            return VerificationResult.failed(f"{self.name}: invalid verifier result")
        if self.prefix and not result.passed:
            return VerificationResult.failed(f"{self.name}: {result.detail}")
        return result

    def __repr__(self) -> str:
        return f"Verifier({self.name!r})"


def verify(verifier: Callable, command, situation) -> VerificationResult:
    if not isinstance(verifier, Verifier):
        verifier = Verifier(getattr(verifier, "__name__", "verifier"), verifier)
    return verifier(command, situation)


always_pass = Verifier("always_pass", lambda command, situation: VerificationResult.ok())


def all_of(verifiers: Sequence[Verifier], name: Optional[str] = None) -> Verifier:
    """Conjunction of verifiers; stops at the first failure and reports it."""
    members = list(verifiers)
    if not members:
        raise ValueError("all_of needs at least one verifier")
    members = [v if isinstance(v, Verifier) else Verifier(getattr(v, "__name__", "verifier"), v) for v in members]

    def check(command, situation):
        for member in members:
            result = member(command, situation)
            if not result.passed:
                return result
        return VerificationResult.ok()

    return Verifier(name or "+".join(m.name for m in members), check, prefix=False)


class CommandHistory:
    """Last command executed at root level, with the step it was executed in."""

    def __init__(self) -> None:
        self.step = -1
        self.last: Any = None
        self.last_step: Optional[int] = None

    def begin_step(self) -> None:
        self.step += 1

    def record(self, command) -> None:
        self.last = command
        self.last_step = self.step

    def age(self) -> Optional[int]:
        """Steps between the current step and the stored command, or None."""
        if self.last_step is None:
            return None
        return self.step - self.last_step


class ContinueLastCommand(Behavior):
    """Fallback that repeats the last command executed by the whole graph.

    Applicable only while a stored command exists that is at most
    ``staleness_limit`` steps old.  Subclasses may override
    ``continue_command`` to adapt the stored command to elapsed time, which
    is how the driving demo continues a trajectory instead of replaying it.
    """

    def __init__(self, history: CommandHistory, name: str = "ContinueLastCommand", staleness_limit: int = 1):
        super().__init__(name)
        if staleness_limit < 1:
            raise ValueError("staleness_limit must be >= 1")
        self.history = history
        self.staleness_limit = staleness_limit
        self.captured: Any = None

    def _fresh(self) -> bool:
        age = self.history.age()
        return age is not None and age <= self.staleness_limit

    def check_invocation(self, situation) -> bool:
        return self._fresh()

    def continue_command(self, command, age: int, situation):
        return command

    def get_command(self, situation):
        if not self._fresh():
            raise RuntimeError("no fresh command to continue")
        return self.continue_command(self.history.last, self.history.age(), situation)

    def gain_control(self, situation) -> None:
        self.captured = self.history.last

    def lose_control(self, situation) -> None:
        self.captured = None


class ConstantBehavior(Behavior):
    """Always applicable, always returns the same command."""

    def __init__(self, name: str, command):
        super().__init__(name)
        self.command = command

    def check_invocation(self, situation) -> bool:
        return True

    def get_command(self, situation):
        return self.command
