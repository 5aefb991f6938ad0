"""Small scripted behaviors shared by the unit tests."""

from safe_arbitration.core import Behavior, BehaviorError, VerificationResult


class Scripted(Behavior):
    """Behavior whose conditions and command are plain attributes.

    Every hook call is appended to ``log`` so tests can check laziness and
    control-transfer order.
    """

    def __init__(self, name, invocable=True, commits=False, command=None, fails=False, log=None):
        super().__init__(name)
        self.invocable = invocable
        self.commits = commits
        self.command = command if command is not None else name.lower()
        self.fails = fails
        self.log = log if log is not None else []
        self.calls = 0

    def check_invocation(self, situation):
        return self.invocable

    def check_commitment(self, situation):
        return self.commits

    def get_command(self, situation):
        self.calls += 1
        self.log.append(("get", self.name))
        if self.fails:
            raise BehaviorError("scripted failure")
        return self.command

    def gain_control(self, situation):
        self.log.append(("gain", self.name))

    def lose_control(self, situation):
        self.log.append(("lose", self.name))


def accept_set(accepted):
    """Verifier passing exactly the commands in ``accepted``."""

    def verifier(command, situation):
        if command in accepted:
            return VerificationResult.ok()
        return VerificationResult.failed(f"rejected {command}")

    return verifier
