import collections
import itertools

import pytest

from helpers import Scripted
from safe_arbitration.core import Arbitrator, Option, OptionFlags, StepContext
from safe_arbitration.strategies import (
    CostStrategy,
    PriorityStrategy,
    RandomStrategy,
    SequenceStrategy,
    make_strategy,
)


def options(names):
    return [Option(Scripted(n), OptionFlags(), i) for i, n in enumerate(names)]


def names(ranked):
    return [o.name for o in ranked]


def all_strategies(opts):
    rnd = RandomStrategy(seed=7)
    for o in opts:
        rnd.register(o)
    return [
        PriorityStrategy(),
        SequenceStrategy(),
        CostStrategy(lambda o, s: (o.index * 7) % 3),
        rnd,
    ]


def test_permutation_property_exhaustive_up_to_six():
    for n in range(7):
        opts = options([f"O{i}" for i in range(n)])
        for r in range(n + 1):
            for subset in itertools.combinations(opts, r):
                for strategy in all_strategies(opts):
                    ctx = StepContext(None, False, n)
                    out = strategy.sort(list(subset), None, ctx)
                    assert sorted(o.index for o in out) == sorted(o.index for o in subset)


def test_priority_is_registration_order():
    a, b, c = options("ABC")
    assert names(PriorityStrategy().sort([c, a])) == ["A", "C"]
    assert PriorityStrategy().sort([]) == []


def test_cost_examples():
    a, b, c = options("ABC")
    costs = {"A": 0.3, "B": 0.1, "C": 0.2}
    assert names(CostStrategy(lambda o, s: costs[o.name]).sort([a, b])) == ["B", "A"]
    assert names(CostStrategy(lambda o, s: costs[o.name]).sort([a, b, c])) == ["B", "C", "A"]
    assert names(CostStrategy(lambda o, s: 1.0).sort([c, b, a])) == ["A", "B", "C"]


def test_cost_estimator_failure_sorts_last():
    a, b, c = options("ABC")
    table = {"A": lambda s: 0.3, "B": lambda s: 1 / 0, "C": lambda s: 0.2}
    strategy = CostStrategy(table)
    assert names(strategy.sort([a, b, c])) == ["C", "A", "B"]
    assert "B" in strategy.errors


def test_cost_rejects_negative_and_nan():
    a, b = options("AB")
    strategy = CostStrategy({"A": lambda s: -1.0, "B": lambda s: float("nan")})
    strategy.sort([a, b])
    assert set(strategy.errors) == {"A", "B"}


def test_cost_head_is_argmin():
    # exact comparison over every table with values from a small grid
    opts = options("ABCDE")
    for costs in itertools.product([0.0, 0.5, 1.0, 2.5], repeat=5):
        table = {o.name: (lambda s, c=c: c) for o, c in zip(opts, costs)}
        head = CostStrategy(table).sort(opts)[0]
        assert costs[head.index] == min(costs)


def test_cost_estimator_called_once_per_option_per_step():
    calls = collections.Counter()

    def est(option, situation):
        calls[option.name] += 1
        return 1.0

    opts = options("ABC")
    CostStrategy(est).sort(opts)
    assert set(calls.values()) == {1}


def test_sequence_fresh_cursor():
    opts = options("ABC")
    assert names(SequenceStrategy().sort(opts, None, StepContext(None, False, 3))) == ["A", "B", "C"]


def test_sequence_cursor_advances_after_completion():
    opts = options("ABC")
    seq = SequenceStrategy()
    seq.sort(opts, None, StepContext(None, False, 3))
    # option 0 held control and released its commitment
    assert names(seq.sort(opts, None, StepContext(0, False, 3))) == ["B", "C", "A"]


def test_sequence_skips_inapplicable_cursor():
    a, b, c = options("ABC")
    seq = SequenceStrategy()
    assert names(seq.sort([b, c], None, StepContext(None, False, 3))) == ["B", "C"]
    assert seq.cursor == 1


def test_sequence_period_is_options_times_k():
    class Timed(Scripted):
        """Stays committed until it has produced k commands in a row."""

        def __init__(self, name, k):
            super().__init__(name)
            self.k = k
            self.holding = False
            self.served = 0

        def check_commitment(self, situation):
            return self.holding and self.served < self.k

        def get_command(self, situation):
            if self.holding:
                self.served += 1
            return self.name

        def gain_control(self, situation):
            self.holding, self.served = True, 1

        def lose_control(self, situation):
            self.holding = False

    for n, k in [(2, 1), (3, 2), (4, 3)]:
        arb = Arbitrator("seq", strategy=SequenceStrategy())
        for i in range(n):
            arb.add_option(Timed(f"S{i}", k))
        chosen = [arb.best_option(None).command for _ in range(6 * n * k)]
        period = n * k
        assert chosen[:period] == [f"S{i}" for i in range(n) for _ in range(k)]
        assert all(chosen[i] == chosen[i + period] for i in range(len(chosen) - period))


def test_random_reproducible_with_seed():
    opts = options("ABCD")
    runs = []
    for _ in range(2):
        s = RandomStrategy({"A": 1, "B": 1, "C": 2, "D": 0.5}, seed=42)
        runs.append([names(s.sort(opts)) for _ in range(20)])
    assert runs[0] == runs[1]


def test_random_rejects_bad_weights():
    for w in (0, -1, float("inf"), float("nan")):
        with pytest.raises(ValueError):
            RandomStrategy({"A": w})


def test_random_single_option():
    (a,) = options("A")
    assert RandomStrategy(seed=1).sort([a]) == [a]


def test_random_head_distribution():
    opts = options("ABC")
    s = RandomStrategy(seed=2024)
    heads = collections.Counter(s.sort(opts)[0].name for _ in range(10_000))
    for name in "ABC":
        assert abs(heads[name] - 3333) <= 200, heads


def test_random_weighted_head_distribution():
    # weights 1:3 -> head B with probability 3/4
    opts = options("AB")
    s = RandomStrategy({"A": 1.0, "B": 3.0}, seed=5)
    heads = collections.Counter(s.sort(opts)[0].name for _ in range(8000))
    assert abs(heads["B"] / 8000 - 0.75) < 0.02


def test_make_strategy():
    assert isinstance(make_strategy("priority"), PriorityStrategy)
    assert isinstance(make_strategy("random", seed=3), RandomStrategy)
    with pytest.raises(ValueError):
        make_strategy("bogus")
