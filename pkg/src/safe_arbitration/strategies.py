"""Ranking strategies for the "sort applicable options" step of arbitration.

Every strategy exposes ``sort(applicable, situation, context)`` returning a
permutation of ``applicable``, best option first.  Ties are always broken by
registration index.
"""

from __future__ import annotations

import math
from typing import Any, Callable, Mapping, Optional, Union

import numpy as np

PRIORITY = "priority"
SEQUENCE = "sequence"
COST = "cost"
RANDOM = "random"


class PriorityStrategy:
    kind = PRIORITY

    def sort(self, applicable, situation=None, context=None):
        return sorted(applicable, key=lambda o: o.index)


class SequenceStrategy:
    """Works through the options in registration order, one after another.

    The cursor stays on an option while it keeps being applicable.  Once the
    cursor option held control and then released its commitment, the cursor
    moves on (wrapping around).  The remaining options follow in cyclic order
    after the cursor.
    """

    kind = SEQUENCE

    def __init__(self) -> None:
        self.cursor = 0

    def sort(self, applicable, situation=None, context=None):
        if not applicable:
            return []
        n = context.n_options if context is not None else max(o.index for o in applicable) + 1
        if context is not None and context.active == self.cursor and not context.committed:
            self.cursor = (self.cursor + 1) % n
        indices = {o.index for o in applicable}
        if self.cursor not in indices:
            self.cursor = min(indices, key=lambda i: (i - self.cursor) % n)
        return sorted(applicable, key=lambda o: (o.index - self.cursor) % n)


CostEstimator = Callable[[Any, Any], float]


class CostStrategy:
    """Ascending by estimated cost.

    ``estimator`` is either one callable ``(option, situation) -> cost`` or a
    mapping from option name to ``situation -> cost``.  An estimator that
    raises, or returns a negative or non-finite value, sorts its option last;
    the reason is kept in ``errors`` for the current step.
    """

    kind = COST

    def __init__(self, estimator: Union[CostEstimator, Mapping[str, Callable[[Any], float]]]):
        self.estimator = estimator
        self.errors: dict[str, str] = {}
        self.last_costs: dict[str, float] = {}

    def _cost(self, option, situation) -> float:
        if isinstance(self.estimator, Mapping):
            fn = self.estimator.get(option.name)
            if fn is None:
                raise KeyError(f"no cost estimator for {option.name!r}")
            value = fn(situation)
        else:
            value = self.estimator(option, situation)
        value = float(value)
        if not math.isfinite(value) or value < 0:
            raise ValueError(f"invalid cost {value!r}")
        return value

    def sort(self, applicable, situation=None, context=None):
        self.errors = {}
        costs = {}
        # one estimator call per option per step
        for option in applicable:
            try:
                costs[option.index] = self._cost(option, situation)
            except Exception as exc:
                self.errors[option.name] = f"cost estimator error: {exc}"
                costs[option.index] = math.inf
        self.last_costs = {o.name: costs[o.index] for o in applicable}
        return sorted(applicable, key=lambda o: (costs[o.index], o.index))


class RandomStrategy:
    """Weighted sampling without replacement.

    Each position of the ranking is drawn with probability proportional to
    the weights of the options not yet placed.  Weights default to 1 and must
    be strictly positive.
    """

    kind = RANDOM

    def __init__(self, weights: Optional[Mapping[str, float]] = None, seed: Union[int, np.random.SeedSequence, None] = 0):
        weights = dict(weights or {})
        for name, w in weights.items():
            if not (isinstance(w, (int, float)) and math.isfinite(w) and w > 0):
                raise ValueError(f"weight for {name!r} must be a positive number, got {w!r}")
        self.weights = weights
        self.rng = np.random.default_rng(seed)

    def register(self, option) -> None:
        self.weights.setdefault(option.name, 1.0)

    def sort(self, applicable, situation=None, context=None):
        remaining = sorted(applicable, key=lambda o: o.index)
        ranked = []
        while remaining:
            if len(remaining) == 1:
                ranked.append(remaining.pop())
                break
            w = np.array([self.weights.get(o.name, 1.0) for o in remaining])
            cumulative = np.cumsum(w)
            draw = self.rng.random() * cumulative[-1]
            pick = int(np.searchsorted(cumulative, draw, side="right"))
            ranked.append(remaining.pop(min(pick, len(remaining) - 1)))
        return ranked


def make_strategy(kind: str, **params):
    """Build a strategy from its configuration name."""
    if kind == PRIORITY:
        return PriorityStrategy()
    if kind == SEQUENCE:
        return SequenceStrategy()
    if kind == COST:
        return CostStrategy(params["estimator"])
    if kind == RANDOM:
        return RandomStrategy(params.get("weights"), params.get("seed", 0))
    raise ValueError(f"unknown strategy kind {kind!r}")
