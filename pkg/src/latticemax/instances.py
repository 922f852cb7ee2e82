"""Oracle and constraint families with known structure.

Each constructor returns a :class:`ValueOracle` whose property class
(DR-submodular, or only lattice-submodular) is advertised in ``meta`` and
can be certified exhaustively on small boxes.  Construction is pure: equal
parameters produce oracles that agree on every point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import ValueOracle, check_property_exhaustive
from .polymatroid import MAX_ENUMERATION_N, PolymatroidOracle


def make_separable_concave(coeffs, powers, cap) -> ValueOracle:
    """f(x) = sum_e a_e * min(x(e), c(e))^{p_e}, with a >= 0 and p in (0, 1].

    Monotone and DR-submodular (separable with concave pieces).
    """
    a = np.asarray(coeffs, dtype=np.float64)
    p = np.asarray(powers, dtype=np.float64)
    c = np.asarray(cap, dtype=np.int64)
    if not (a.shape == p.shape == c.shape) or a.ndim != 1:
        raise ValueError("coeffs, powers, and cap must be 1-d and equally sized")
    if np.any(a < 0):
        raise ValueError("coefficients must be non-negative")
    if np.any(p <= 0) or np.any(p > 1):
        raise ValueError("powers must lie in (0, 1]")
    coeff = a.tolist()
    power = p.tolist()
    capl = c.tolist()

    def fn(x):
        return sum(
            ai * min(int(xi), ci) ** pi
            for ai, pi, ci, xi in zip(coeff, power, capl, x)
        )

    def batch(X):
        Z = np.minimum(X, c[None, :]).astype(np.float64)
        out = np.zeros(X.shape[0])
        for i in range(len(coeff)):
            col = Z[:, i]
            if power[i] == 1.0:
                v = col
            elif power[i] == 0.5:
                v = np.sqrt(col)
            else:
                v = col ** power[i]
            out += coeff[i] * v
        return out

    meta = {"family": "separable_concave", "dr_submodular": True}
    return ValueOracle(fn, c, batch_fn=batch, meta=meta)


def make_budget_allocation(edges, cap) -> ValueOracle:
    """Expected target coverage of a bipartite influence instance.

    ``edges`` is a list of (source, target, probability) triples with each
    probability in (0, 1); a source assigned x(s) units activates each
    incident target independently with probability 1 - (1 - q_st)^{x(s)}, and

        f(x) = sum_t (1 - prod_{s} (1 - q_st)^{x(s)}).

    Monotone and DR-submodular.  Marginals are accumulated per target, so
    one evaluation costs O(#edges).
    """
    c = np.asarray(cap, dtype=np.int64)
    n = c.shape[0]
    by_target: dict[int, list[tuple[int, float]]] = {}
    for s, t, q in edges:
        s, t, q = int(s), int(t), float(q)
        if not 0 <= s < n:
            raise ValueError(f"edge source {s} out of range")
        if not 0 < q < 1:
            raise ValueError(f"edge probability must lie in (0, 1), got {q}")
        by_target.setdefault(t, []).append((s, 1.0 - q))
    groups = [
        (np.array([s for s, _ in lst]), np.array([om for _, om in lst]))
        for _, lst in sorted(by_target.items())
    ]

    def fn(x):
        tot = 0.0
        for srcs, omq in groups:
            prod = 1.0
            for s, om in zip(srcs, omq):
                prod *= om ** int(x[s])
            tot += 1.0 - prod
        return tot

    def batch(X):
        out = np.zeros(X.shape[0])
        for srcs, omq in groups:
            out += 1.0 - np.prod(omq[None, :] ** X[:, srcs], axis=1)
        return out

    meta = {"family": "budget_allocation", "dr_submodular": True, "targets": len(groups)}
    return ValueOracle(fn, c, batch_fn=batch, meta=meta)


def make_lattice_non_dr(table) -> ValueOracle:
    """Table-lookup oracle certified monotone and lattice-submodular.

    The table is an n-dimensional array over the full box (shape c + 1).
    Construction fails with a witness if monotonicity or lattice
    submodularity is violated.  Whether the table also fails the
    diminishing-returns check is recorded in ``meta['strictly_non_dr']``;
    DR tables are accepted but flagged.
    """
    arr = np.asarray(table, dtype=np.float64)
    if arr.ndim < 1:
        raise ValueError("table must have at least one dimension")
    if np.any(arr < 0):
        raise ValueError("table values must be non-negative")
    box = np.array(arr.shape, dtype=np.int64) - 1

    def fn(x):
        return float(arr[tuple(int(v) for v in x)])

    def batch(X):
        return arr[tuple(X.T)]

    oracle = ValueOracle(fn, box, batch_fn=batch, meta={"family": "lattice_table"})
    for kind in ("monotone", "lattice_submodular"):
        report = check_property_exhaustive(oracle, kind)
        if not report.passed:
            w = report.violations[0]
            raise ValueError(
                f"table violates {kind}: x={w.x}, y={w.y}, lhs={w.lhs}, rhs={w.rhs}"
            )
    dr = check_property_exhaustive(oracle, "dr_submodular").passed
    oracle.meta["dr_submodular"] = dr
    oracle.meta["strictly_non_dr"] = not dr
    return oracle


def _separable_convex_table(g, n: int) -> np.ndarray:
    g = np.asarray(g, dtype=np.float64)
    grids = np.meshgrid(*([g] * n), indexing="ij")
    return sum(grids)


def _coupled_kink_table() -> np.ndarray:
    g = np.array([0.0, 1.0, 3.0, 6.0])
    i, j = np.meshgrid(np.arange(4), np.arange(4), indexing="ij")
    return 2.0 * np.minimum(i + j, 2) + g[i] + g[j]


# Monotone lattice-submodular tables that fail the DR check; certified by
# make_lattice_non_dr at load time in the test suite.
NON_DR_TABLES: dict[str, np.ndarray] = {
    "convex_ladder_2d": _separable_convex_table([0.0, 1.0, 3.0], 2),
    "convex_ladder_3d": _separable_convex_table([0.0, 1.0, 3.0], 3),
    "steep_tail_2d": _separable_convex_table([0.0, 1.0, 2.0, 4.0, 7.0], 2),
    "coupled_kink_2d": _coupled_kink_table(),
}


def search_non_dr_table(shape: tuple[int, int], seed: int, attempts: int = 100) -> np.ndarray:
    """Randomized search for a certified non-DR lattice-submodular 2-d table.

    Tables are generated from non-negative margin increments and
    non-positive mixed second differences (which forces lattice
    submodularity), then certified; the first strictly non-DR table found
    is returned.
    """
    if len(shape) != 2:
        raise ValueError("search supports 2-d tables")
    rng = np.random.default_rng(seed)
    rows, cols = shape
    for _ in range(attempts):
        row_inc = rng.uniform(0.0, 2.0, size=rows - 1)
        col_inc = rng.uniform(0.0, 2.0, size=cols - 1)
        mixed = -rng.uniform(0.0, 0.5, size=(rows - 1, cols - 1))
        # keep increments non-negative after adding mixed terms
        for i in range(rows - 1):
            slack = row_inc[i]
            for j in range(cols - 1):
                mixed[i, j] = max(mixed[i, j], -slack)
                slack += mixed[i, j]
        for j in range(cols - 1):
            slack = col_inc[j]
            for i in range(rows - 1):
                mixed[i, j] = max(mixed[i, j], -slack)
                slack += mixed[i, j]
        table = np.zeros(shape)
        table[1:, 0] = np.cumsum(row_inc)
        table[0, 1:] = np.cumsum(col_inc)
        for i in range(1, rows):
            for j in range(1, cols):
                table[i, j] = (
                    table[i - 1, j] + table[i, j - 1] - table[i - 1, j - 1]
                    + mixed[i - 1, j - 1]
                )
        try:
            oracle = make_lattice_non_dr(table)
        except ValueError:
            continue
        if oracle.meta["strictly_non_dr"]:
            return table
    raise RuntimeError(f"no non-DR table found in {attempts} attempts")


def uniform_polymatroid(n: int, per_element: int, total: int) -> PolymatroidOracle:
    """rho(S) = min(per_element * |S|, total)."""
    if per_element < 0 or total < 0:
        raise ValueError("uniform polymatroid parameters must be non-negative")

    def member(x):
        return bool(x.max(initial=0.0) <= per_element + 1e-9 and x.sum() <= total + 1e-9)

    def rank(S):
        return min(per_element * len(S), total)

    return PolymatroidOracle(n, member, rank, name=f"uniform({per_element},{total})")


def partition_polymatroid(parts, caps, n: int | None = None) -> PolymatroidOracle:
    """Per-element integer caps assigned by part: rho(S) = sum_{e in S} cap(part(e))."""
    parts = [sorted(int(e) for e in part) for part in parts]
    caps = [int(c) for c in caps]
    if len(parts) != len(caps):
        raise ValueError("parts and caps must have equal length")
    if any(c < 0 for c in caps):
        raise ValueError("caps must be non-negative")
    covered = [e for part in parts for e in part]
    if n is None:
        n = max(covered) + 1 if covered else 0
    if sorted(covered) != list(range(n)):
        raise ValueError("parts must partition the ground set 0..n-1")
    cap_by_element = np.zeros(n, dtype=np.int64)
    for part, c in zip(parts, caps):
        for e in part:
            cap_by_element[e] = c

    def member(x):
        return bool(np.all(x <= cap_by_element + 1e-9))

    def rank(S):
        return int(sum(cap_by_element[e] for e in S))

    return PolymatroidOracle(n, member, rank, name="partition")


def table_polymatroid(n: int, rank_table) -> PolymatroidOracle:
    """Arbitrary polymatroid from an explicit rank table.

    ``rank_table`` maps subsets (frozensets or sorted tuples) to integer
    ranks, or is a list indexed by subset bitmask.  Rank axioms
    (normalization, monotonicity, submodularity) are validated exhaustively
    on construction; membership tests every subset constraint, so n is
    capped at MAX_ENUMERATION_N.
    """
    if n > MAX_ENUMERATION_N:
        raise ValueError(f"rank-table polymatroids support at most n={MAX_ENUMERATION_N}")
    size = 1 << n
    rho = np.zeros(size, dtype=np.int64)
    if isinstance(rank_table, (list, tuple, np.ndarray)):
        if len(rank_table) != size:
            raise ValueError(f"rank table must have {size} entries")
        rho[:] = np.asarray(rank_table, dtype=np.int64)
    else:
        for key, value in rank_table.items():
            mask = 0
            for e in key:
                mask |= 1 << int(e)
            rho[mask] = int(value)
    if rho[0] != 0:
        raise ValueError("rank of the empty set must be 0")
    if np.any(rho < 0):
        raise ValueError("ranks must be non-negative")
    for mask in range(size):
        for e in range(n):
            if mask >> e & 1:
                continue
            up = mask | 1 << e
            if rho[up] < rho[mask]:
                raise ValueError(f"rank not monotone at subset mask {mask}, element {e}")
            # local submodularity: adding g cannot raise the marginal of e
            for g in range(n):
                if g == e or mask >> g & 1:
                    continue
                with_g = mask | 1 << g
                if rho[with_g | 1 << e] - rho[with_g] > rho[up] - rho[mask] :
                    raise ValueError(
                        f"rank not submodular at subset mask {mask}, elements {e},{g}"
                    )

    masks = np.array(
        [[mask >> e & 1 for e in range(n)] for mask in range(size)], dtype=np.float64
    )
    rho_f = rho.astype(np.float64)

    def member(x):
        return bool(np.all(masks @ x <= rho_f + 1e-9))

    def rank(S):
        mask = 0
        for e in S:
            mask |= 1 << int(e)
        return int(rho[mask])

    return PolymatroidOracle(n, member, rank, name="rank_table")


def make_polymatroid(family: str, **params) -> PolymatroidOracle:
    """Dispatch constructor used by configuration files."""
    if family == "uniform":
        return uniform_polymatroid(params["n"], params["per_element"], params["total"])
    if family == "partition":
        return partition_polymatroid(params["parts"], params["caps"], params.get("n"))
    if family == "rank_table":
        return table_polymatroid(params["n"], params["table"])
    raise ValueError(f"unknown polymatroid family {family!r}")


def random_separable_concave(seed: int, n: int, cap_high: int) -> ValueOracle:
    rng = np.random.default_rng(seed)
    coeffs = rng.uniform(0.5, 2.0, size=n)
    powers = rng.choice([0.3, 0.5, 0.7, 1.0], size=n)
    cap = rng.integers(1, cap_high + 1, size=n)
    return make_separable_concave(coeffs, powers, cap)


def random_budget_allocation(seed: int, n_sources: int, n_targets: int, cap_high: int) -> ValueOracle:
    rng = np.random.default_rng(seed)
    edges = []
    for s in range(n_sources):
        for t in range(n_targets):
            if rng.random() < 0.7:
                edges.append((s, t, float(rng.uniform(0.1, 0.9))))
    if not edges:
        edges.append((0, 0, float(rng.uniform(0.1, 0.9))))
    cap = rng.integers(1, cap_high + 1, size=n_sources)
    return make_budget_allocation(edges, cap)


@dataclass
class InstanceSpec:
    """Serializable description that fully determines an oracle."""

    family: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def build(self) -> ValueOracle:
        p = self.params
        if self.family == "separable_concave":
            return make_separable_concave(p["coeffs"], p["powers"], p["cap"])
        if self.family == "budget_allocation":
            edges = [tuple(edge) for edge in p["edges"]]
            return make_budget_allocation(edges, p["cap"])
        if self.family == "lattice_table":
            table = p["table"]
            if isinstance(table, str):
                table = NON_DR_TABLES[table]
            return make_lattice_non_dr(table)
        if self.family == "random_separable_concave":
            return random_separable_concave(self.seed, p["n"], p["cap_high"])
        if self.family == "random_budget_allocation":
            return random_budget_allocation(
                self.seed, p["sources"], p["targets"], p["cap_high"]
            )
        raise ValueError(f"unknown instance family {self.family!r}")

    def to_dict(self) -> dict:
        return {"family": self.family, "params": dict(self.params), "seed": self.seed}

    @classmethod
    def from_dict(cls, data: dict) -> "InstanceSpec":
        return cls(
            family=data["family"],
            params=dict(data.get("params", {})),
            seed=int(data.get("seed", 0)),
        )


def build_oracle(spec: InstanceSpec) -> ValueOracle:
    return spec.build()
