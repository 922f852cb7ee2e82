"""Ground-set vectors, evaluation oracles, and submodularity checkers.

Solutions are non-negative integer vectors over a ground set of n elements
(indices 0..n-1), represented as numpy int64 arrays.  Objectives are black
boxes wrapped in :class:`ValueOracle`: an evaluation function on the box
[0, c], normalized so f(0) = 0, with a thread-safe call counter.

The checkers in this module test, either on random witnesses or
exhaustively, whether an oracle is monotone, submodular on the lattice
(f(x) + f(y) >= f(x v y) + f(x ^ y)), weakly diminishing-returns
(f(x v k e_i) - f(x) >= f(y v k e_i) - f(y) for x <= y), or
diminishing-returns submodular (unit marginals non-increasing in the base
point).  DR-submodularity implies the other three for monotone f.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterator, Literal, Mapping

import numpy as np

# Absolute tolerance shared by all inequality checkers.
CHECK_TOLERANCE = 1e-9

PropertyKind = Literal["dr_submodular", "lattice_submodular", "monotone", "weak_dr"]

PROPERTY_KINDS: frozenset[str] = frozenset(
    {"dr_submodular", "lattice_submodular", "monotone", "weak_dr"}
)


class CapacityError(RuntimeError):
    """Raised when an exact routine would exceed its enumeration budget."""


def as_lattice_point(x, n: int | None = None) -> np.ndarray:
    """Validate and return ``x`` as a non-negative int64 vector."""
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise ValueError(f"lattice point must be 1-dimensional, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        if np.issubdtype(arr.dtype, np.floating) and np.all(arr == np.floor(arr)):
            arr = arr.astype(np.int64)
        else:
            raise ValueError("lattice point must have integer entries")
    arr = arr.astype(np.int64, copy=True)
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"expected dimension {n}, got {arr.shape[0]}")
    if np.any(arr < 0):
        raise ValueError("lattice point entries must be non-negative")
    return arr


def as_fractional_point(x, n: int | None = None) -> np.ndarray:
    """Validate and return ``x`` as a non-negative float64 vector."""
    arr = np.asarray(x, dtype=np.float64).copy()
    if arr.ndim != 1:
        raise ValueError(f"point must be 1-dimensional, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"expected dimension {n}, got {arr.shape[0]}")
    if np.any(arr < 0):
        raise ValueError("point entries must be non-negative")
    return arr


def zeros(n: int) -> np.ndarray:
    return np.zeros(n, dtype=np.int64)


def unit(n: int, e: int, k: int = 1) -> np.ndarray:
    """The vector k * e_e in Z^n."""
    if not 0 <= e < n:
        raise ValueError(f"element {e} out of range for ground set of size {n}")
    v = np.zeros(n, dtype=np.int64)
    v[e] = k
    return v


def total(x: np.ndarray) -> int:
    """x(E), the sum of all entries."""
    return int(np.asarray(x).sum())


def iterate_box(box: np.ndarray) -> Iterator[np.ndarray]:
    """Yield every lattice point 0 <= x <= box in lexicographic order."""
    box = as_lattice_point(box)
    for idx in itertools.product(*(range(int(b) + 1) for b in box)):
        yield np.array(idx, dtype=np.int64)


@dataclass(frozen=True)
class GroundSet:
    """A ground set of n elements, addressed by index 0..n-1."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ground set must contain at least one element")

    @property
    def elements(self) -> range:
        return range(self.n)


class CallCounter:
    """Thread-safe evaluation counter shared across oracle views."""

    __slots__ = ("_n", "_lock")

    def __init__(self):
        self._n = 0
        self._lock = threading.Lock()

    def add(self, k: int = 1) -> None:
        with self._lock:
            self._n += k

    @property
    def count(self) -> int:
        return self._n


class ValueOracle:
    """Black-box access to f: [0, c] -> R+ with f(0) = 0.

    Args:
        fn: evaluation function taking an int64 vector and returning a float.
        box: per-coordinate cap c (non-negative integers).
        batch_fn: optional vectorized evaluation taking an (m, n) matrix and
            returning m values; used by sampling-based routines.
        meta: free-form metadata attached by instance constructors.
        counter: shared call counter; views pass their parent's counter so
            the total evaluation count is preserved.

    Every ``eval`` / ``eval_batch`` increments the counter by the number of
    points evaluated, under a lock, so concurrent use is safe as long as
    ``fn`` itself is pure.
    """

    def __init__(
        self,
        fn: Callable[[np.ndarray], float],
        box,
        batch_fn: Callable[[np.ndarray], np.ndarray] | None = None,
        meta: Mapping | None = None,
        counter: CallCounter | None = None,
    ):
        self._fn = fn
        self._batch_fn = batch_fn
        self.box = as_lattice_point(box)
        self.meta = dict(meta) if meta else {}
        self._counter = counter if counter is not None else CallCounter()
        z = float(fn(zeros(self.n)))
        if abs(z) > CHECK_TOLERANCE:
            raise ValueError(f"oracle must satisfy f(0) = 0, got f(0) = {z}")

    @property
    def n(self) -> int:
        return int(self.box.shape[0])

    @property
    def calls(self) -> int:
        return self._counter.count

    def _validate(self, x: np.ndarray) -> None:
        if x.shape != self.box.shape:
            raise ValueError(f"expected shape {self.box.shape}, got {x.shape}")
        if not np.issubdtype(x.dtype, np.integer):
            raise ValueError("oracle arguments must be integer vectors")
        if np.any(x < 0) or np.any(x > self.box):
            raise ValueError(f"point {x.tolist()} outside box {self.box.tolist()}")

    def eval(self, x) -> float:
        x = np.asarray(x)
        self._validate(x)
        self._counter.add(1)
        return float(self._fn(x))

    def eval_batch(self, X) -> np.ndarray:
        """Evaluate m points given as an (m, n) matrix; counts m calls."""
        X = np.asarray(X)
        if X.ndim != 2 or X.shape[1] != self.n:
            raise ValueError(f"expected an (m, {self.n}) matrix, got shape {X.shape}")
        if not np.issubdtype(X.dtype, np.integer):
            raise ValueError("oracle arguments must be integer matrices")
        if np.any(X < 0) or np.any(X > self.box[None, :]):
            raise ValueError("batch contains points outside the box")
        self._counter.add(int(X.shape[0]))
        if self._batch_fn is not None:
            out = np.asarray(self._batch_fn(X), dtype=np.float64)
            if out.shape != (X.shape[0],):
                raise RuntimeError("batch evaluation returned wrong shape")
            return out
        return np.array([float(self._fn(row)) for row in X], dtype=np.float64)

    def shifted(self, y) -> "ValueOracle":
        """The marginal view g(x) = f(x + y) - f(y) on the box c - y.

        The view shares this oracle's call counter; creating it costs one
        evaluation (for f(y)) and each view evaluation costs one more.
        """
        y = as_lattice_point(y, self.n)
        self._validate(y)
        base = self.eval(y)
        fn = lambda x: float(self._fn(x + y)) - base
        batch = None
        if self._batch_fn is not None:
            batch = lambda X: np.asarray(self._batch_fn(X + y[None, :])) - base
        return ValueOracle(fn, self.box - y, batch_fn=batch, counter=self._counter)


def marginal(f: ValueOracle, delta, y) -> float:
    """f(delta | y) = f(y + delta) - f(y).

    Costs two oracle calls, or none when delta = 0 (returns 0.0 directly).
    """
    delta = as_lattice_point(delta, f.n)
    y = as_lattice_point(y, f.n)
    if not delta.any():
        f._validate(y)
        return 0.0
    return f.eval(y + delta) - f.eval(y)


def join_meet(x, y) -> tuple[np.ndarray, np.ndarray]:
    """Coordinate-wise maximum and minimum (x v y, x ^ y)."""
    x = as_lattice_point(x)
    y = as_lattice_point(y, x.shape[0])
    return np.maximum(x, y), np.minimum(x, y)


def multiset_diff(x, y) -> np.ndarray:
    """{x} \\ {y} = (x - y) v 0, the multiset difference."""
    x = as_lattice_point(x)
    y = as_lattice_point(y, x.shape[0])
    return np.maximum(x - y, 0)


@dataclass(frozen=True)
class Witness:
    """A counterexample tuple recorded by a property check.

    ``lhs`` and ``rhs`` are the two sides of the violated inequality
    (the property requires lhs >= rhs up to tolerance).
    """

    x: tuple[int, ...]
    y: tuple[int, ...]
    element: int | None
    step: int | None
    lhs: float
    rhs: float


@dataclass
class PropertyReport:
    """Outcome of a property check over a set of witness tuples."""

    property_name: str
    trials: int
    violations: list[Witness] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def _check_one(
    f: ValueOracle,
    kind: str,
    x: np.ndarray,
    y: np.ndarray,
    e: int | None,
    k: int | None,
    cache: dict | None = None,
) -> Witness | None:
    """Evaluate one witness tuple; return a Witness if the inequality fails."""
    ev = f.eval if cache is None else (
        lambda p: cache.setdefault(tuple(p), f.eval(p))
    )
    if kind == "monotone":
        lhs, rhs = ev(y), ev(x)
        ok = lhs >= rhs - CHECK_TOLERANCE
        if ok:
            return None
        return Witness(tuple(x), tuple(y), None, None, lhs, rhs)
    if kind == "lattice_submodular":
        jn, mt = np.maximum(x, y), np.minimum(x, y)
        lhs = ev(x) + ev(y)
        rhs = ev(jn) + ev(mt)
        if lhs >= rhs - CHECK_TOLERANCE:
            return None
        return Witness(tuple(x), tuple(y), None, None, lhs, rhs)
    if kind == "dr_submodular":
        step = unit(f.n, e)
        lhs = ev(x + step) - ev(x)
        rhs = ev(y + step) - ev(y)
        if lhs >= rhs - CHECK_TOLERANCE:
            return None
        return Witness(tuple(x), tuple(y), e, 1, lhs, rhs)
    if kind == "weak_dr":
        bump = unit(f.n, e, k)
        lhs = ev(np.maximum(x, bump)) - ev(x)
        rhs = ev(np.maximum(y, bump)) - ev(y)
        if lhs >= rhs - CHECK_TOLERANCE:
            return None
        return Witness(tuple(x), tuple(y), e, k, lhs, rhs)
    raise ValueError(f"unknown property kind {kind!r}")


def check_property(f: ValueOracle, kind: str, trials: int, seed: int) -> PropertyReport:
    """Randomized property check on ``trials`` sampled witness tuples.

    Witnesses are drawn by sampling y uniformly from the box and x uniformly
    from [0, y], which covers the x <= y precondition of the monotone and
    diminishing-returns definitions; the lattice check samples x and y
    independently from the box since comparable pairs satisfy it trivially.
    Deterministic for a fixed seed.
    """
    if kind not in PROPERTY_KINDS:
        raise ValueError(f"unknown property kind {kind!r}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    box = f.box
    report = PropertyReport(kind, trials)
    for _ in range(trials):
        if kind == "lattice_submodular":
            x = rng.integers(0, box + 1, dtype=np.int64)
            y = rng.integers(0, box + 1, dtype=np.int64)
            w = _check_one(f, kind, x, y, None, None)
        else:
            y = rng.integers(0, box + 1, dtype=np.int64)
            x = rng.integers(0, y + 1, dtype=np.int64)
            if kind == "monotone":
                w = _check_one(f, kind, x, y, None, None)
            elif kind == "dr_submodular":
                room = np.flatnonzero(y < box)
                if room.size == 0:
                    continue
                e = int(room[rng.integers(room.size)])
                w = _check_one(f, kind, x, y, e, 1)
            else:  # weak_dr
                e = int(rng.integers(f.n))
                k = int(rng.integers(0, box[e] + 1))
                w = _check_one(f, kind, x, y, e, k)
        if w is not None:
            report.violations.append(w)
    return report


def _count_dominated_pairs(box: np.ndarray) -> int:
    # number of pairs x <= y in the box: product of per-coordinate
    # triangular counts (c+1)(c+2)/2
    count = 1
    for c in box:
        count *= (int(c) + 1) * (int(c) + 2) // 2
    return count


def check_property_exhaustive(
    f: ValueOracle, kind: str, max_witnesses: int = 2_000_000
) -> PropertyReport:
    """Check every witness tuple on the full box.

    Point evaluations are cached, so each lattice point costs one oracle
    call.  Raises CapacityError when the tuple count exceeds
    ``max_witnesses``.
    """
    if kind not in PROPERTY_KINDS:
        raise ValueError(f"unknown property kind {kind!r}")
    box = f.box
    n = f.n
    cache: dict = {}
    report = PropertyReport(kind, 0)

    if kind == "lattice_submodular":
        n_points = int(np.prod(box + 1))
        if n_points * n_points > max_witnesses:
            raise CapacityError("box too large for exhaustive lattice check")
        points = list(iterate_box(box))
        for x in points:
            for y in points:
                report.trials += 1
                w = _check_one(f, kind, x, y, None, None, cache)
                if w is not None:
                    report.violations.append(w)
        return report

    pairs = _count_dominated_pairs(box)
    scale = {"monotone": 1, "dr_submodular": n, "weak_dr": n * (int(box.max()) + 1)}[kind]
    if pairs * scale > max_witnesses:
        raise CapacityError("box too large for exhaustive check")

    for y in iterate_box(box):
        for x_idx in itertools.product(*(range(int(v) + 1) for v in y)):
            x = np.array(x_idx, dtype=np.int64)
            if kind == "monotone":
                report.trials += 1
                w = _check_one(f, kind, x, y, None, None, cache)
                if w is not None:
                    report.violations.append(w)
            elif kind == "dr_submodular":
                for e in range(n):
                    if y[e] >= box[e]:
                        continue
                    report.trials += 1
                    w = _check_one(f, kind, x, y, e, 1, cache)
                    if w is not None:
                        report.violations.append(w)
            else:  # weak_dr
                for e in range(n):
                    for k in range(int(box[e]) + 1):
                        report.trials += 1
                        w = _check_one(f, kind, x, y, e, k, cache)
                        if w is not None:
                            report.violations.append(w)
    return report
