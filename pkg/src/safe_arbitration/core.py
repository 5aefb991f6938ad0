"""Behavior components, arbitrators and verified option selection.

An arbitrator filters its options down to the applicable ones, lets its
strategy rank them, and walks the ranking asking each option for a command.
The first command that its verifier accepts wins.  Options flagged
``verification_exempt`` skip the verifier; they are meant for last-resort
fallbacks that must always yield something executable.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Generic, Optional, TypeVar

logger = logging.getLogger(__name__)

SituationT = TypeVar("SituationT")
CommandT = TypeVar("CommandT")


class Status(enum.Enum):
    PASSED = "PASSED"
    FAILED = "FAILED"
    NO_SAFE_OPTION = "NO_SAFE_OPTION"


@dataclass(frozen=True)
class VerificationResult:
    status: Status
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status is Status.PASSED

    @classmethod
    def ok(cls, detail: str = "") -> "VerificationResult":
        return cls(Status.PASSED, detail)

    @classmethod
    def failed(cls, detail: str) -> "VerificationResult":
        return cls(Status.FAILED, detail)


NO_SAFE_OPTION = VerificationResult(Status.NO_SAFE_OPTION, "no safe option")


@dataclass(frozen=True)
class VerifiedCommand(Generic[CommandT]):
    command: Optional[CommandT]
    result: VerificationResult

    def __post_init__(self) -> None:
        absent = self.command is None
        if absent != (self.result.status is Status.NO_SAFE_OPTION):
            raise ValueError("command must be absent exactly when the result is NO_SAFE_OPTION")

    @property
    def passed(self) -> bool:
        return self.result.passed


class BehaviorError(RuntimeError):
    """Raised by ``get_command`` to signal that no command could be computed."""


class NoSafeOptionError(BehaviorError):
    """A nested arbitrator could not produce a verified command."""


class Behavior(Generic[SituationT, CommandT]):
    """Base class for behavior components.

    Subclasses override ``check_invocation`` and ``get_command``; the
    commitment condition defaults to "never committed" and the control hooks
    to no-ops.
    """

    def __init__(self, name: str):
        self.name = name

    def check_invocation(self, situation: SituationT) -> bool:
        return False

    def check_commitment(self, situation: SituationT) -> bool:
        return False

    def get_command(self, situation: SituationT) -> CommandT:
        raise NotImplementedError

    def gain_control(self, situation: SituationT) -> None:
        pass

    def lose_control(self, situation: SituationT) -> None:
        pass

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"


@dataclass(frozen=True)
class OptionFlags:
    interruptable: bool = False
    verification_exempt: bool = False


@dataclass(frozen=True, eq=False)
class Option:
    child: Behavior
    flags: OptionFlags
    index: int

    @property
    def name(self) -> str:
        return self.child.name

    @property
    def is_arbitrator(self) -> bool:
        return isinstance(self.child, Arbitrator)


@dataclass(frozen=True)
class StepContext:
    """What a strategy may know about control state when ranking options."""

    active: Optional[int]
    committed: bool
    n_options: int


# verification field values in OptionRecord
NOT_EVALUATED = "not-evaluated"
EXEMPT = "exempt"


@dataclass
class OptionRecord:
    """Evaluation trace of one option during the most recent step."""

    applicable: bool = False
    committed: bool = False
    verification: str = NOT_EVALUATED
    detail: str = ""
    chosen: bool = False


def _always_pass(command: Any, situation: Any) -> VerificationResult:
    return VerificationResult.ok()


class Arbitrator(Behavior[SituationT, CommandT]):
    """Selects among child options and verifies the commands they produce.

    An arbitrator is itself a behavior, so arbitrators nest.  ``verifier`` is
    called as ``verifier(command, situation)`` and must return a
    :class:`VerificationResult`; it defaults to accepting everything.
    """

    def __init__(self, name: str, strategy=None, verifier: Optional[Callable] = None):
        super().__init__(name)
        if strategy is None:
            from .strategies import PriorityStrategy

            strategy = PriorityStrategy()
        self.options: list[Option] = []
        self.strategy = strategy
        self.verifier = verifier if verifier is not None else _always_pass
        self.active_option: Optional[int] = None
        self.records: list[OptionRecord] = []
        self._pending: Optional[Option] = None
        self._names: set[str] = set()

    def add_option(
        self,
        child: Behavior,
        *,
        interruptable: bool = False,
        verification_exempt: bool = False,
    ) -> Option:
        if child.name in self._names:
            raise ValueError(f"duplicate option name {child.name!r} in arbitrator {self.name!r}")
        option = Option(child, OptionFlags(interruptable, verification_exempt), len(self.options))
        self.options.append(option)
        self.records.append(OptionRecord())
        self._names.add(child.name)
        if hasattr(self.strategy, "register"):
            self.strategy.register(option)
        return option

    def option(self, name: str) -> Option:
        for option in self.options:
            if option.name == name:
                return option
        raise KeyError(name)

    # -- behavior interface ---------------------------------------------

    def check_invocation(self, situation: SituationT) -> bool:
        return bool(self._applicability(situation)[0])

    def check_commitment(self, situation: SituationT) -> bool:
        if self.active_option is None:
            return False
        applicable, _ = self._applicability(situation)
        return any(o.index == self.active_option for o in applicable)

    def get_command(self, situation: SituationT) -> CommandT:
        verified = self.best_option(situation)
        if not verified.passed:
            raise NoSafeOptionError(verified.result.detail)
        return verified.command

    def gain_control(self, situation: SituationT) -> None:
        pass

    def lose_control(self, situation: SituationT) -> None:
        if self.active_option is not None:
            self.options[self.active_option].child.lose_control(situation)
            self.active_option = None

    # -- arbitration ------------------------------------------------------

    def _applicability(self, situation: SituationT) -> tuple[list[Option], bool]:
        applicable = []
        committed = False
        for option in self.options:
            is_active = option.index == self.active_option
            if is_active and option.child.check_commitment(situation):
                committed = True
                applicable.append(option)
            elif option.child.check_invocation(situation):
                applicable.append(option)
        return applicable, committed

    def applicable_options(self, situation: SituationT) -> list[Option]:
        return self._applicability(situation)[0]

    def _context(self, committed: bool) -> StepContext:
        return StepContext(self.active_option, committed, len(self.options))

    def _rank(self, applicable: list[Option], situation: SituationT, committed: bool) -> list[Option]:
        ranked = list(self.strategy.sort(applicable, situation, self._context(committed)))
        if committed and self.active_option is not None:
            active = self.options[self.active_option]
            if not active.flags.interruptable and active in ranked:
                ranked.remove(active)
                ranked.insert(0, active)
        return ranked

    def sort_options(self, applicable: list[Option], situation: SituationT) -> list[Option]:
        committed = False
        if self.active_option is not None and any(o.index == self.active_option for o in applicable):
            committed = self.options[self.active_option].child.check_commitment(situation)
        return self._rank(applicable, situation, committed)

    def _reset_records(self) -> None:
        self._pending = None
        for i, option in enumerate(self.options):
            self.records[i] = OptionRecord()
            if isinstance(option.child, Arbitrator):
                option.child._reset_records()

    def _verify(self, command: Any, situation: SituationT) -> VerificationResult:
        try:
            result = self.verifier(command, situation)
        except Exception as exc:  # a broken verifier must never let a command through
            logger.warning("verifier of %s raised: %r", self.name, exc)
            return VerificationResult.failed(f"verifier error: {exc}")
        if not isinstance(result, VerificationResult):
            return VerificationResult.failed("verifier returned no result")
        return result

    def _select(self, situation: SituationT) -> VerifiedCommand:
        """Evaluate options without touching control state."""
        self._reset_records()
        applicable, committed = self._applicability(situation)
        for option in applicable:
            rec = self.records[option.index]
            rec.applicable = True
            rec.committed = committed and option.index == self.active_option

        for option in self._rank(applicable, situation, committed):
            rec = self.records[option.index]
            child = option.child
            if isinstance(child, Arbitrator):
                nested = child._select(situation)
                if not nested.passed:
                    rec.verification, rec.detail = Status.FAILED.value, Status.NO_SAFE_OPTION.value
                    continue
                command = nested.command
            else:
                try:
                    command = child.get_command(situation)
                except Exception as exc:
                    rec.verification = Status.FAILED.value
                    rec.detail = f"behavior error: {exc}" if str(exc) else "behavior error"
                    continue

            if option.flags.verification_exempt:
                rec.verification, rec.chosen = EXEMPT, True
                self._pending = option
                return VerifiedCommand(command, VerificationResult.ok(EXEMPT))

            result = self._verify(command, situation)
            if result.passed:
                rec.verification, rec.detail, rec.chosen = Status.PASSED.value, result.detail, True
                self._pending = option
                return VerifiedCommand(command, result)
            rec.verification, rec.detail = Status.FAILED.value, result.detail

        return VerifiedCommand(None, NO_SAFE_OPTION)

    def _commit(self, situation: SituationT) -> None:
        """Transfer control along the path chosen by the last ``_select``."""
        chosen = self._pending
        new_index = chosen.index if chosen is not None else None
        if new_index != self.active_option:
            if self.active_option is not None:
                self.options[self.active_option].child.lose_control(situation)
            self.active_option = new_index
            if chosen is not None:
                chosen.child.gain_control(situation)
        if chosen is not None and isinstance(chosen.child, Arbitrator):
            chosen.child._commit(situation)

    def best_option(self, situation: SituationT) -> VerifiedCommand:
        verified = self._select(situation)
        self._commit(situation)
        return verified

    def chosen_path(self) -> list[str]:
        """Names along the chosen path of the most recent step, root excluded."""
        path: list[str] = []
        node: Arbitrator = self
        while True:
            chosen = next((o for o, r in zip(node.options, node.records) if r.chosen), None)
            if chosen is None:
                return path
            path.append(chosen.name)
            if not isinstance(chosen.child, Arbitrator):
                return path
            node = chosen.child


def execute_step(root: Arbitrator, situation, history=None) -> VerifiedCommand:
    """Run one arbitration cycle on ``root``.

    ``history``, when given, is told about the new step and, on success, about
    the command handed back for execution.  A NO_SAFE_OPTION outcome is
    returned, not raised.
    """
    if history is not None:
        history.begin_step()
    verified = root.best_option(situation)
    if verified.passed:
        if history is not None:
            history.record(verified.command)
    else:
        logger.info("%s: no safe option", root.name)
    return verified
