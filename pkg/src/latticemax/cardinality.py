"""Decreasing-threshold greedy maximization under a cardinality constraint.

Feasible solutions are lattice points y with 0 <= y <= c and y(E) <= r.
Two solver entry points are provided:

* :func:`maximize_dr_cardinality` assumes diminishing-returns submodularity
  and picks the step size along each coordinate by a plain binary search
  (valid because k -> f(k e | y) - k * threshold is then concave).
* :func:`maximize_lattice_cardinality` only assumes lattice submodularity
  and replaces the step search with :func:`binary_search_lattice`, a
  level-set search over geometrically spaced value levels.

Both achieve a (1 - 1/e - O(eps)) fraction of the optimum for monotone
objectives and make O((n/eps) log ||c||_inf log(r/eps)) oracle calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .core import ValueOracle, as_lattice_point, total, unit, zeros


def effective_epsilon(epsilon: float) -> tuple[float, int]:
    """Round epsilon down to the nearest exact reciprocal 1/m.

    Returns (1/m, m) where m = ceil(1/epsilon); a small tolerance absorbs
    float noise in the reciprocal so that e.g. 1/3 round-trips to m = 3.
    """
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    inv = 1.0 / epsilon
    m = round(inv)
    if abs(inv - m) > 1e-9:
        m = math.ceil(inv)
    return 1.0 / m, int(m)


@dataclass(frozen=True)
class SolverConfig:
    """Shared solver knobs: accuracy epsilon and RNG seed."""

    epsilon: float
    seed: int = 0

    def __post_init__(self):
        effective_epsilon(self.epsilon)  # validates the range

    @property
    def effective(self) -> float:
        return effective_epsilon(self.epsilon)[0]

    @property
    def inv_epsilon(self) -> int:
        """1 / effective epsilon, always an integer."""
        return effective_epsilon(self.epsilon)[1]


@dataclass(frozen=True)
class CardinalityConstraint:
    """y <= cap coordinate-wise and y(E) <= budget."""

    cap: tuple[int, ...]
    budget: int

    def __post_init__(self):
        cap = as_lattice_point(np.array(self.cap, dtype=np.int64))
        object.__setattr__(self, "cap", tuple(int(v) for v in cap))
        if self.budget < 0:
            raise ValueError("budget must be non-negative")

    @property
    def n(self) -> int:
        return len(self.cap)

    def cap_vector(self) -> np.ndarray:
        return np.array(self.cap, dtype=np.int64)

    def is_feasible(self, y: np.ndarray) -> bool:
        y = as_lattice_point(y, self.n)
        return bool(np.all(y <= self.cap_vector()) and total(y) <= self.budget)


@dataclass(frozen=True)
class TraceStep:
    threshold: float
    element: int
    step: int
    gain: float
    accepted: bool = True


@dataclass
class GreedyTrace:
    """Per-update log of a threshold greedy run; thresholds non-increasing."""

    steps: list[TraceStep] = field(default_factory=list)

    def add(self, threshold: float, element: int, step: int, gain: float,
            accepted: bool = True) -> None:
        self.steps.append(TraceStep(threshold, element, step, gain, accepted))

    def thresholds(self) -> list[float]:
        return [s.threshold for s in self.steps]


def threshold_schedule(top: float, floor: float, epsilon: float) -> Iterator[float]:
    """Yield top * (1 - eps)^j for j = 0, 1, ... while the value is >= floor.

    Each level is computed from the integer power to avoid cumulative
    multiplication drift.
    """
    if top <= 0:
        return
    j = 0
    while True:
        level = top * (1.0 - epsilon) ** j
        if level < floor:
            return
        yield level
        j += 1


def _max_step_with_gain(
    f: ValueOracle, y: np.ndarray, e: int, k_max: int, threshold: float
) -> tuple[int, float]:
    """Binary search for the largest k <= k_max with f(k e | y) >= k * threshold.

    Also returns the marginal value measured at the returned k (0.0 for
    k = 0).  The base value f(y) is evaluated once, so the search costs
    1 + ceil(log2(k_max + 1)) oracle calls.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    if k_max == 0:
        return 0, 0.0
    base = f.eval(y)
    step = unit(f.n, e)
    lo, hi = 0, k_max
    gain_at_lo = 0.0
    while lo < hi:
        mid = (lo + hi + 1) // 2
        gain = f.eval(y + mid * step) - base
        if gain >= mid * threshold:
            lo, gain_at_lo = mid, gain
        else:
            hi = mid - 1
    return lo, gain_at_lo


def max_step_dr(f: ValueOracle, y, e: int, k_max: int, theta: float) -> int:
    """Largest k in [0, k_max] with f(k e | y) >= k * theta.

    The acceptable k form a prefix interval whenever f is DR-submodular
    (g(k) = f(k e | y) - k * theta is concave with g(0) = 0), which makes
    the binary search exact.  theta must be positive.
    """
    y = as_lattice_point(y, f.n)
    return _max_step_with_gain(f, y, e, k_max, theta)[0]


def maximize_dr_cardinality(
    f: ValueOracle, constraint: CardinalityConstraint, config: SolverConfig
) -> tuple[np.ndarray, GreedyTrace]:
    """Decreasing-threshold greedy for monotone DR-submodular f.

    Guarantees f(y) >= (1 - 1/e - eps) * OPT.  The threshold sweeps from
    d = max_e f(e) down to (eps / r) * d by factors of (1 - eps); at each
    level every element is topped up with the largest step whose average
    gain still clears the threshold.
    """
    cap = constraint.cap_vector()
    if cap.shape[0] != f.n:
        raise ValueError("constraint dimension does not match oracle")
    if np.any(cap > f.box):
        raise ValueError("constraint cap exceeds the oracle box")
    eps = config.effective
    r = constraint.budget
    y = zeros(f.n)
    trace = GreedyTrace()
    if r == 0 or not cap.any():
        return y, trace

    d = max(
        (f.eval(unit(f.n, e)) for e in range(f.n) if cap[e] >= 1),
        default=0.0,
    )
    if d <= 0:
        return y, trace

    for threshold in threshold_schedule(d, (eps / r) * d, eps):
        for e in range(f.n):
            k_cap = min(int(cap[e] - y[e]), r - total(y))
            if k_cap <= 0:
                continue
            k, gain = _max_step_with_gain(f, y, e, k_cap, threshold)
            if k >= 1:
                y[e] += k
                trace.add(threshold, e, k, gain)
    return y, trace


def binary_search_lattice(
    g: ValueOracle, e: int, theta: float, k_max: int, epsilon: float
) -> int | None:
    """Level-set search for a step k with g(k e) >= (1 - eps) * k * theta.

    ``g`` must be monotone along coordinate e (typically a marginal view
    f(. | y)); no concavity is assumed.  Scans value levels h from
    g(k_max e) down by factors of (1 - eps) until below
    (1 - eps) * g(k_min e), where k_min is the first k with positive value;
    at each level the smallest k reaching it is tested against the
    threshold.  Returns None (fail) when no step qualifies.

    Any returned k satisfies g(k e) >= (1 - eps) * k * theta, and whenever
    some k* has g(k* e) >= k* * theta the search does not fail.
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    if k_max == 0:
        return None

    step = unit(g.n, e)
    memo: dict[int, float] = {}

    def val(k: int) -> float:
        if k not in memo:
            memo[k] = g.eval(k * step)
        return memo[k]

    if val(k_max) <= 0:
        return None
    # smallest k with positive value; valid since val is non-decreasing
    lo, hi = 1, k_max
    while lo < hi:
        mid = (lo + hi) // 2
        if val(mid) > 0:
            hi = mid
        else:
            lo = mid + 1
    k_min = lo

    g_min, g_max = val(k_min), val(k_max)
    for level in threshold_schedule(g_max, (1.0 - epsilon) * g_min, epsilon):
        lo, hi = k_min, k_max
        while lo < hi:
            mid = (lo + hi) // 2
            if val(mid) >= level:
                hi = mid
            else:
                lo = mid + 1
        if val(lo) >= (1.0 - epsilon) * lo * theta:
            return lo
    return None


def maximize_lattice_cardinality(
    f: ValueOracle, constraint: CardinalityConstraint, config: SolverConfig
) -> tuple[np.ndarray, GreedyTrace]:
    """Threshold greedy for monotone lattice-submodular f (DR not required).

    Identical sweep to :func:`maximize_dr_cardinality` except that the top
    threshold is d = max_e f(c(e) e) and each step comes from
    :func:`binary_search_lattice` on the marginal view f(. | y).
    """
    cap = constraint.cap_vector()
    if cap.shape[0] != f.n:
        raise ValueError("constraint dimension does not match oracle")
    if np.any(cap > f.box):
        raise ValueError("constraint cap exceeds the oracle box")
    eps = config.effective
    r = constraint.budget
    y = zeros(f.n)
    trace = GreedyTrace()
    if r == 0 or not cap.any():
        return y, trace

    d = max(
        (f.eval(unit(f.n, e, int(cap[e]))) for e in range(f.n) if cap[e] >= 1),
        default=0.0,
    )
    if d <= 0:
        return y, trace

    for threshold in threshold_schedule(d, (eps / r) * d, eps):
        for e in range(f.n):
            k_cap = min(int(cap[e] - y[e]), r - total(y))
            if k_cap <= 0:
                continue
            view = f.shifted(y)
            k = binary_search_lattice(view, e, threshold, k_cap, eps)
            if k is not None and k >= 1:
                gain = view.eval(unit(f.n, e, k))
                y[e] += k
                trace.add(threshold, e, k, gain)
    return y, trace
