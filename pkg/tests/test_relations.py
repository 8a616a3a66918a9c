from __future__ import annotations

import numpy as np
import pytest

from hyperpaths.errors import CapacityError, PreconditionError
from hyperpaths.hyperspace import canonicalize, hausdorff_distance
from hyperpaths.metric import TAU, EuclideanSpace
from hyperpaths.relations import (
    MAX_CANDIDATE_PAIRS,
    Relation,
    brute_force_min_relation,
    build_proximal_complete,
    classify,
    reduce_relation,
    trim_to_bound,
)

from conftest import SPACES, min_edge_cover_size, random_set_exact

R1, R2 = EuclideanSpace(1), EuclideanSpace(2)


def S(pts, space=R1):
    return canonicalize(space, pts)


X3, Y3 = S([0, 2, 11]), S([1, 10, 12])
# index form of {(0,1), (2,1), (11,10), (11,12)}
NN_PAIRS = ((0, 0), (1, 0), (2, 1), (2, 2))


def test_relation_validates_indices_and_duplicates():
    with pytest.raises(ValueError):
        Relation(X3, Y3, ((0, 3),))
    with pytest.raises(ValueError):
        Relation(X3, Y3, ((0, 0), (0, 0)))
    assert len(Relation.of(X3, Y3, [(0, 0), (0, 0)])) == 1


def test_classify_identity_singleton():
    x = S([5])
    c = classify(R1, Relation(x, x, ((0, 0),)))
    assert c.complete and c.reduced and c.proximality_factor == 1.0


def test_classify_spaced_example():
    c = classify(R1, Relation(X3, Y3, NN_PAIRS))
    assert c.complete and c.reduced and c.reduced_complete
    assert c.proximality_factor == 1.0


def test_classify_incomplete():
    c = classify(R1, Relation(X3, Y3, ((0, 0),)))
    assert not c.left_complete and not c.complete and not c.reduced_complete


def test_proximality_factor_zero_distance_non_identity_is_infinite():
    x = S([0, 1])
    c = classify(R1, Relation(x, x, ((0, 0), (0, 1), (1, 1))))
    assert c.proximality_factor == float("inf")
    assert c.to_json()["proximality_factor"] == "inf"


def test_nearest_neighbour_relations():
    x = S([4, 7, 9])
    assert build_proximal_complete(R1, x, x).pairs == ((0, 0), (1, 1), (2, 2))
    R = build_proximal_complete(R1, S([0, 10]), S([1, 9]))
    assert R.pairs == ((0, 0), (1, 1))
    assert build_proximal_complete(R1, X3, Y3).pairs == NN_PAIRS


def test_nearest_neighbour_ties_take_smallest_index():
    # 1 is equidistant from 0 and 2
    R = build_proximal_complete(R1, S([1]), S([0, 2]))
    assert R.pairs == ((0, 0), (0, 1))
    R = build_proximal_complete(R1, S([0, 2]), S([1]))
    assert R.pairs == ((0, 0), (1, 0))


def test_trim_examples():
    R = build_proximal_complete(R1, S([0, 10]), S([1, 9]))
    assert trim_to_bound(R1, R) == R
    x = S([0, 1])
    ident = build_proximal_complete(R1, x, x)
    assert trim_to_bound(R1, ident) == ident


def test_nearest_neighbour_relation_has_a_mutual_pair(rng):
    # the globally closest pair is chosen from both sides, so |R| <= |x| + |y| - 1
    for _ in range(200):
        x = S(rng.integers(0, 12, size=3).astype(float))
        y = S(rng.integers(0, 12, size=3).astype(float))
        R = build_proximal_complete(R1, x, y)
        assert len(R) <= len(x) + len(y) - 1


def test_trim_on_three_by_three_instance():
    # alternating points: nearest-neighbour relation has |x| + |y| - 1 = 5 pairs
    x = S([0.0, 2.0, 4.0])
    y = S([1.0, 3.0, 5.0])
    R = build_proximal_complete(R1, x, y)
    assert len(R) == 5
    T = trim_to_bound(R1, R)
    assert len(T) == 4 and classify(R1, T).complete
    brute = brute_force_min_relation(R1, x, y, 1.0)
    assert brute.cardinality <= len(T)


def test_trim_preconditions():
    with pytest.raises(PreconditionError):
        trim_to_bound(R1, build_proximal_complete(R1, S([0]), S([1, 2])))


def test_reduce_examples():
    R = Relation(X3, Y3, NN_PAIRS)
    assert reduce_relation(R1, R) == R
    R = Relation(S([0]), S([1, 2]), ((0, 0), (0, 1)))
    assert reduce_relation(R1, R) == R
    x = S([0, 1])
    full = Relation(x, x, ((0, 0), (0, 1), (1, 0), (1, 1)))
    red = reduce_relation(R1, full)
    assert len(red) == 2 and classify(R1, red).reduced_complete
    assert red.pairs == ((0, 1), (1, 0))  # lexicographic removal order


def test_reduce_requires_complete():
    with pytest.raises(PreconditionError):
        reduce_relation(R1, Relation(X3, Y3, ((0, 0),)))


def test_brute_force_examples():
    x = S([3, 8])
    assert brute_force_min_relation(R1, x, x, 1.0).cardinality == 2
    res = brute_force_min_relation(R1, X3, Y3, 1.0)
    assert res.cardinality == 4 and res.relation.pairs == NN_PAIRS


def test_brute_force_bound_two_matches_edge_cover_oracle():
    res = brute_force_min_relation(R1, X3, Y3, 2.0)
    D = R1.pairwise(X3.coords, Y3.coords)
    dh = hausdorff_distance(R1, X3, Y3)
    allowed = [(i, j) for i in range(3) for j in range(3) if D[i, j] <= 2 * dh + TAU]
    assert res.cardinality == min_edge_cover_size(3, 3, allowed) == 4


def test_brute_force_infeasible():
    # bound below 1 cannot cover the point realizing d_H
    res = brute_force_min_relation(R1, S([0]), S([1, 3]), 0.5)
    assert not res.feasible and res.cardinality is None


def test_brute_force_capacity_error():
    x = S(list(range(5)))
    with pytest.raises(CapacityError):
        brute_force_min_relation(R1, x, S([v + 0.5 for v in range(5)]), 100.0)
    assert MAX_CANDIDATE_PAIRS == 20


def test_brute_force_matches_edge_cover_oracle_on_random_instances(rng):
    for _ in range(60):
        x = random_set_exact(R2, rng, int(rng.integers(1, 5)))
        y = random_set_exact(R2, rng, int(rng.integers(1, 5)))
        bound = float(rng.choice([1.0, 1.5]))
        D = R2.pairwise(x.coords, y.coords)
        dh = hausdorff_distance(R2, x, y)
        allowed = [
            (i, j) for i in range(len(x)) for j in range(len(y)) if D[i, j] <= bound * dh + TAU
        ]
        if len(allowed) > MAX_CANDIDATE_PAIRS:
            continue
        res = brute_force_min_relation(R2, x, y, bound)
        assert res.cardinality == min_edge_cover_size(len(x), len(y), allowed)
        assert classify(R2, res.relation).complete


@pytest.mark.parametrize("name", sorted(SPACES))
def test_trim_and_reduce_invariants_per_space(name, rng):
    space = SPACES[name]
    for _ in range(40):
        x = random_set_exact(space, rng, int(rng.integers(2, 5)))
        y = random_set_exact(space, rng, int(rng.integers(2, 5)))
        R = build_proximal_complete(space, x, y)
        assert classify(space, R).proximality_factor <= 1 + 1e-9
        red = reduce_relation(space, R)
        assert classify(space, red).reduced_complete
        T = trim_to_bound(space, R)
        c = classify(space, T)
        assert c.complete and c.proximality_factor <= 1 + 1e-9
        assert len(T) <= len(x) + len(y) - 2
        assert set(T.pairs) <= set(R.pairs)


def test_relation_json():
    assert Relation(X3, Y3, NN_PAIRS).to_json() == {"pairs": [[0, 0], [1, 0], [2, 1], [2, 2]]}
    assert np.isfinite(classify(R1, Relation(X3, Y3, NN_PAIRS)).proximality_factor)
