from helpers import Scripted
from safe_arbitration.core import Arbitrator, Status, VerificationResult, execute_step
from safe_arbitration.verification import (
    CommandHistory,
    ConstantBehavior,
    ContinueLastCommand,
    Verifier,
    all_of,
    always_pass,
)

import pytest


def test_always_pass():
    assert always_pass("anything", None).passed


def test_verifier_prefixes_failure_detail():
    v = Verifier("wall", lambda c, s: VerificationResult.failed("hit"))
    assert v(1, None).detail == "wall: hit"


def test_verifier_never_raises():
    def broken(command, situation):
        raise KeyError("x")

    result = Verifier("broken", broken)(1, None)
    assert result.status is Status.FAILED and "internal error" in result.detail


def test_verifier_cannot_report_no_safe_option():
    v = Verifier("odd", lambda c, s: VerificationResult(Status.NO_SAFE_OPTION))
    assert v(1, None).status is Status.FAILED


def test_verifier_is_pure():
    v = Verifier("even", lambda c, s: VerificationResult.ok() if c % 2 == 0 else VerificationResult.failed("odd"))
    assert [v(c, None) for c in range(6)] == [v(c, None) for c in range(6)]


def test_all_of_all_pass():
    assert all_of([always_pass, always_pass])(0, None).passed


def test_all_of_short_circuits():
    seen = []

    def second(command, situation):
        seen.append(command)
        return VerificationResult.ok()

    first = Verifier("first", lambda c, s: VerificationResult.failed("no"))
    result = all_of([first, Verifier("second", second)])(1, None)
    assert result.detail == "first: no"
    assert seen == []


def test_all_of_reports_second_detail():
    second = Verifier("second", lambda c, s: VerificationResult.failed("bad"))
    assert all_of([always_pass, second])(1, None).detail == "second: bad"


def test_all_of_needs_members():
    with pytest.raises(ValueError):
        all_of([])


def test_continue_last_repeats_command():
    history = CommandHistory()
    history.begin_step()
    history.record("left")
    history.begin_step()
    b = ContinueLastCommand(history)
    assert b.check_invocation(None)
    assert b.get_command(None) == "left"


def test_continue_last_without_history_not_applicable():
    history = CommandHistory()
    history.begin_step()
    assert not ContinueLastCommand(history).check_invocation(None)


def test_continue_last_goes_stale():
    history = CommandHistory()
    history.begin_step()
    history.record("left")
    b = ContinueLastCommand(history, staleness_limit=1)
    history.begin_step()
    assert b.check_invocation(None)
    history.begin_step()  # two idle steps
    assert not b.check_invocation(None)


def test_continue_last_gain_control_captures_command():
    history = CommandHistory()
    history.begin_step()
    history.record(("trajectory", 1))
    b = ContinueLastCommand(history)
    b.gain_control(None)
    assert b.captured == ("trajectory", 1)
    b.lose_control(None)
    assert b.captured is None


def test_staleness_limit_validated():
    with pytest.raises(ValueError):
        ContinueLastCommand(CommandHistory(), staleness_limit=0)


def test_fallback_chain_degrades_step_by_step():
    """Primary fails, continue-last bridges one step, then the last resort takes over."""
    history = CommandHistory()
    primary = Scripted("Primary", command="go")
    root = Arbitrator("root", verifier=lambda c, s: VerificationResult.ok() if c != "bad" else VerificationResult.failed("bad"))
    root.add_option(primary)
    root.add_option(ContinueLastCommand(history, name="Continue"))
    root.add_option(ConstantBehavior("Stop", "stop"), verification_exempt=True)

    out = []
    for step in range(4):
        primary.fails = step >= 1
        out.append((execute_step(root, None, history).command, root.chosen_path()))
    assert out == [
        ("go", ["Primary"]),
        ("go", ["Continue"]),  # repeats the step-0 command
        ("go", ["Continue"]),  # history now holds the repeated command, age 1 again
        ("go", ["Continue"]),
    ]


def test_fallback_chain_reaches_last_resort_when_continue_is_rejected():
    history = CommandHistory()
    primary = Scripted("Primary", command="go")
    accepted = {"go"}
    root = Arbitrator("root", verifier=lambda c, s: VerificationResult.ok() if c in accepted else VerificationResult.failed("no"))
    root.add_option(primary)
    root.add_option(ContinueLastCommand(history, name="Continue"))
    root.add_option(ConstantBehavior("Stop", "stop"), verification_exempt=True)
    execute_step(root, None, history)
    primary.fails = True
    accepted.clear()
    v = execute_step(root, None, history)
    assert v.command == "stop" and root.chosen_path() == ["Stop"]
