import itertools

import numpy as np
import pytest

from latticemax.bruteforce import ExactResult, brute_force_opt, certify_ratio
from latticemax.cardinality import CardinalityConstraint
from latticemax.core import CapacityError, ValueOracle
from latticemax.instances import (
    make_separable_concave,
    partition_polymatroid,
    uniform_polymatroid,
)
from latticemax.knapsack import KnapsackInstance


def modular(weights):
    w = np.asarray(weights, dtype=np.float64)
    return lambda x: float(np.dot(w, x))


def reference_opt(f, box, feasible):
    """Plain product-grid scan, no pruning; the slow second opinion."""
    best, arg = -1.0, None
    for x in itertools.product(*(range(int(b) + 1) for b in box)):
        v = np.array(x)
        if not feasible(v):
            continue
        val = f.eval(v)
        if val > best:
            best, arg = val, x
    return best, arg


def test_zero_oracle():
    f = ValueOracle(lambda x: 0.0, np.array([2, 2]))
    res = brute_force_opt(f, CardinalityConstraint((2, 2), 3))
    assert res.opt_value == 0.0
    assert res.argmax == (0, 0)


def test_modular_cardinality_closed_form():
    # descending weights: pack the budget into the heaviest coordinates
    f = ValueOracle(modular([5.0, 3.0, 1.0]), np.array([2, 2, 2]))
    res = brute_force_opt(f, CardinalityConstraint((2, 2, 2), 3))
    assert res.opt_value == pytest.approx(13.0)
    assert res.argmax == (2, 1, 0)


def test_cardinality_enumeration_count():
    f = ValueOracle(lambda x: 0.0, np.array([2, 2, 2]))
    res = brute_force_opt(f, CardinalityConstraint((2, 2, 2), 2))
    # x <= (2,2,2), sum <= 2: C(2+3-1,2)+C(1+3-1,1)+1 = 6+3+1
    assert res.points_enumerated == 10


def test_knapsack_example():
    f = ValueOracle(modular([3.0, 1.0]), np.array([2, 2]))
    res = brute_force_opt(f, KnapsackInstance((0.5, 0.5), (2, 2)))
    assert res.opt_value == pytest.approx(6.0)
    assert res.argmax == (2, 0)


def test_knapsack_matches_reference():
    f = make_separable_concave([1.0, 2.0, 0.4], [0.5, 1.0, 0.5], [3, 2, 3])
    inst = KnapsackInstance((0.3, 0.45, 0.15), (3, 2, 3))
    res = brute_force_opt(f, inst)
    ref_val, ref_arg = reference_opt(
        make_separable_concave([1.0, 2.0, 0.4], [0.5, 1.0, 0.5], [3, 2, 3]),
        [3, 2, 3],
        inst.is_feasible,
    )
    assert res.opt_value == pytest.approx(ref_val)
    assert res.argmax == ref_arg


def test_cardinality_matches_reference():
    f = make_separable_concave([0.5, 1.5, 1.0], [1.0, 0.5, 0.5], [2, 3, 2])
    cons = CardinalityConstraint((2, 3, 2), 4)
    res = brute_force_opt(f, cons)
    ref_val, ref_arg = reference_opt(
        make_separable_concave([0.5, 1.5, 1.0], [1.0, 0.5, 0.5], [2, 3, 2]),
        [2, 3, 2],
        cons.is_feasible,
    )
    assert res.opt_value == pytest.approx(ref_val)
    assert res.argmax == ref_arg


def test_polymatroid_matches_reference():
    f = make_separable_concave([1.0, 0.8, 1.2], [0.5, 0.5, 1.0], [3, 3, 3])
    P = uniform_polymatroid(3, 2, 4)
    res = brute_force_opt(f, P)
    ref_val, ref_arg = reference_opt(
        make_separable_concave([1.0, 0.8, 1.2], [0.5, 0.5, 1.0], [3, 3, 3]),
        [3, 3, 3],
        lambda v: P.member(v.astype(np.float64)),
    )
    assert res.opt_value == pytest.approx(ref_val)
    assert res.argmax == ref_arg


def test_polymatroid_partition_mode():
    f = ValueOracle(modular([1.0, 1.0, 4.0]), np.array([3, 3, 3]))
    P = partition_polymatroid([[0, 1], [2]], [2, 1])
    res = brute_force_opt(f, P)
    assert res.argmax == (2, 2, 1)
    assert res.opt_value == pytest.approx(8.0)


def test_tie_breaks_lexicographically():
    # every singleton has value 1: the smallest argmax is (0,...,0,1) ordered
    # lexicographically, i.e. (0, 1) loses to... (0, 1) vs (1, 0): lex order
    # compares coordinate 0 first, so (0, 1) is smaller
    f = ValueOracle(lambda x: float(min(x.sum(), 1)), np.array([2, 2]))
    res = brute_force_opt(f, CardinalityConstraint((2, 2), 2))
    assert res.opt_value == pytest.approx(1.0)
    assert res.argmax == (0, 1)


def test_capacity_guard():
    f = ValueOracle(lambda x: 0.0, np.full(12, 9))
    with pytest.raises(CapacityError):
        brute_force_opt(f, KnapsackInstance((0.01,) * 12, (9,) * 12), max_points=1000)
    with pytest.raises(CapacityError):
        brute_force_opt(f, CardinalityConstraint((9,) * 12, 40), max_points=1000)


def test_unsupported_constraint_type():
    f = ValueOracle(lambda x: 0.0, np.array([1]))
    with pytest.raises(TypeError):
        brute_force_opt(f, object())


def test_certify_ratio():
    exact = ExactResult(10.0, (1,), 5)
    assert certify_ratio(6.4, exact, 0.63)
    assert not certify_ratio(6.2, exact, 0.63)
    assert certify_ratio(6.3, exact, 0.63)  # equality passes via slack
    assert certify_ratio(0.0, ExactResult(0.0, (0,), 1), 0.99)
