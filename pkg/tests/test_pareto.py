import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from quadtune.core import Individual
from quadtune.pareto import (
    Dominance,
    ParetoFront,
    crowding_distance,
    dominates,
    front_ranks,
    is_antichain,
    non_dominated_sort,
    normalized_hypervolume,
    relative_coverage,
)


def brute_force_fronts(F):
    """Peel fronts by repeated O(n^2 k) pairwise checks."""
    remaining = list(range(len(F)))
    fronts = []
    while remaining:
        front = [
            i
            for i in remaining
            if not any(np.all(F[j] <= F[i]) and np.any(F[j] < F[i]) for j in remaining if j != i)
        ]
        fronts.append(sorted(front))
        remaining = [i for i in remaining if i not in front]
    return fronts


def test_dominance_examples():
    assert dominates([1, 1, 1, 1], [2, 2, 2, 2]) is Dominance.STRICT
    assert dominates([1, 2], [2, 1]) is Dominance.NONE
    assert dominates([1, 1], [1, 1]) is Dominance.WEAK
    with pytest.raises(ValueError):
        dominates([1, 2], [1, 2, 3])


def test_sort_examples():
    assert non_dominated_sort(np.array([[1, 2], [2, 1]])) == [[0, 1]]
    assert non_dominated_sort(np.array([[1, 1], [2, 2], [3, 3]])) == [[0], [1], [2]]
    with pytest.raises(ValueError):
        non_dominated_sort(np.empty((0, 2)))


def test_sort_matches_brute_force_20_points():
    rng = np.random.default_rng(0)
    F = rng.random((20, 4))
    assert [sorted(f) for f in non_dominated_sort(F)] == brute_force_fronts(F)


points = st.integers(1, 15).flatmap(
    lambda n: arrays(np.float64, (n, 3), elements=st.sampled_from([0.0, 1.0, 2.0, 3.0]))
)


@given(points)
def test_sort_partitions_and_matches_oracle(F):
    fronts = non_dominated_sort(F)
    flat = sorted(itertools.chain.from_iterable(fronts))
    assert flat == list(range(len(F)))
    assert [sorted(f) for f in fronts] == brute_force_fronts(F)
    ranks = front_ranks(F)
    for r, front in enumerate(fronts, start=1):
        assert all(ranks[i] == r for i in front)


@given(arrays(np.float64, 3, elements=st.floats(0, 5)), arrays(np.float64, 3, elements=st.floats(0, 5)),
       arrays(np.float64, 3, elements=st.floats(0, 5)))
def test_weak_dominance_is_transitive(a, b, c):
    if dominates(a, b) is not Dominance.NONE and dominates(b, c) is not Dominance.NONE:
        assert dominates(a, c) is not Dominance.NONE


def test_crowding_boundaries_infinite():
    F = np.array([[0, 4], [1, 2], [2, 1], [4, 0]], dtype=float)
    d = crowding_distance(F)
    assert np.isinf(d[0]) and np.isinf(d[3])
    # interior: neighbour gaps normalised by objective range
    assert d[1] == pytest.approx((2 - 0) / 4 + (4 - 1) / 4)
    assert d[2] == pytest.approx((4 - 1) / 4 + (2 - 0) / 4)
    assert np.all(np.isinf(crowding_distance(F[:2])))


def test_hypervolume_examples():
    assert normalized_hypervolume(np.array([[1, 1, 1, 1]])) == 1.0
    assert normalized_hypervolume(np.array([[1, 2], [2, 1]])) == 2.0
    with pytest.raises(ValueError):
        normalized_hypervolume(np.array([[-1.0, 1.0]]))


@given(arrays(np.float64, (6, 4), elements=st.floats(0.01, 10)), st.floats(0.1, 10))
def test_hypervolume_homogeneity(F, c):
    s = normalized_hypervolume(F)
    assert abs(normalized_hypervolume(c * F) - c**4 * s) <= 1e-12 * max(1.0, c**4 * s)


def test_coverage_examples():
    assert relative_coverage(np.array([[0, 0]]), np.array([[1, 1]])) == (1, 1)
    assert relative_coverage(np.array([[1, 1]]), np.array([[0, 0]])) == (0, 1)
    A = np.array([[1, 3], [2, 2], [3, 1]], dtype=float)
    assert relative_coverage(A, A) == (3, 3)
    B = A + 1
    assert relative_coverage(A, B) == (3, 3)
    assert relative_coverage(B, A) == (0, 3)


def test_coverage_partial_hand_example():
    A = np.array([[1, 4], [3, 2]], dtype=float)
    B = np.array([[2, 5], [2, 3], [4, 1]], dtype=float)
    # (2,5) covered by (1,4); (2,3) by nobody; (4,1) by nobody
    assert relative_coverage(A, B) == (1, 3)
    # (1,4) beats every point of B on f1; (3,2) loses to (2,3) only on f2
    assert relative_coverage(B, A) == (0, 2)
    assert relative_coverage(np.vstack([B, [[3, 2]]]), A) == (1, 2)


def test_duplicates_removed_before_metrics():
    F = np.array([[1, 2], [1, 2], [2, 1]], dtype=float)
    assert relative_coverage(F, F) == (2, 2)
    assert normalized_hypervolume(F) == 2.0


def test_front_rejects_dominated_members():
    with pytest.raises(ValueError):
        ParetoFront.from_arrays([[1, 1], [2, 2]])
    f = ParetoFront.from_population([Individual(np.zeros(1), np.array(v, float)) for v in ([1, 1], [2, 2], [0, 3])])
    assert sorted(map(tuple, f.objectives)) == [(0, 3), (1, 1)]
    assert is_antichain(f.objectives)


def test_best_by_weights():
    f = ParetoFront.from_arrays([[1, 3], [2, 1]], genes=[[10], [20]])
    assert f.best_by([1, 1]).genes.tolist() == [20]
    assert f.best_by([1, 0]).genes.tolist() == [10]
