from __future__ import annotations

import itertools

import numpy as np
import pytest

from hyperpaths.counterexamples import (
    GROUP_GAP,
    generate_spaced_pair,
    midpoint_lambda_bound,
    taxicab_fs2_obstruction,
    verify_spaced_pair,
)
from hyperpaths.errors import DomainError
from hyperpaths.hyperspace import canonicalize, hausdorff_distance
from hyperpaths.metric import EuclideanSpace, TaxicabCross
from hyperpaths.paths import path_length_estimate, two_leg_quasiconvex_path
from hyperpaths.relations import brute_force_min_relation

from conftest import exhaustive_hausdorff

R1, R2 = EuclideanSpace(1), EuclideanSpace(2)
CASES = [(3, 2), (4, 2), (5, 2)]


def test_first_instance():
    inst = generate_spaced_pair(R1, n=3, s=2, epsilon=1.0)
    assert inst.x == canonicalize(R1, [0, 2, 11])
    assert inst.y == canonicalize(R1, [1, 10, 12])
    assert inst.group_sizes == (3, 3)
    assert exhaustive_hausdorff(R1, inst.x, inst.y) == 1.0


def test_n4_group_sizes():
    inst = generate_spaced_pair(R1, n=4, s=2, epsilon=1.0)
    assert inst.k == 3 and inst.group_sizes == (3, 3, 2)


@pytest.mark.parametrize("n, s", CASES + [(6, 4)])
@pytest.mark.parametrize("eps", [0.5, 1.0, 2.0])
def test_instance_invariants(n, s, eps):
    inst = generate_spaced_pair(R1, n=n, s=s, epsilon=eps)
    assert 2 * n == s + 2 * inst.k
    assert len(inst.x) == len(inst.y) == n
    assert hausdorff_distance(R1, inst.x, inst.y) == eps
    xs = {p for p in inst.x.points}
    for g, size in zip(inst.groups, inst.group_sizes):
        pts = g.points
        members = {p in xs for p in pts}
        assert members == {True, False}  # every group mixes x and y
        span = pts[-1][0] - pts[0][0]
        if size == 3:
            assert span == 2 * eps
            lone = pts[1]
            assert (lone in xs) != (pts[0] in xs)
            assert abs(lone[0] - pts[0][0]) == eps and abs(pts[2][0] - lone[0]) == eps
        else:
            assert span == eps
    for a, b in zip(inst.groups, inst.groups[1:]):
        gap = b.points[0][0] - a.points[-1][0]
        assert gap > 2 * eps and gap == GROUP_GAP * eps


def test_instance_along_a_line_in_the_plane():
    inst = generate_spaced_pair(R2, n=3, s=2, epsilon=1.0)
    assert np.all(inst.x.coords[:, 1] == 0.0)
    assert hausdorff_distance(R2, inst.x, inst.y) == 1.0


@pytest.mark.parametrize(
    "kwargs",
    [dict(n=2), dict(n=3, s=3), dict(n=3, s=0), dict(n=4, s=4), dict(n=3, epsilon=0.0)],
)
def test_infeasible_parameters(kwargs):
    with pytest.raises(DomainError):
        generate_spaced_pair(R1, **kwargs)


@pytest.mark.parametrize("n, s", CASES)
def test_min_relation_counting(n, s):
    inst = generate_spaced_pair(R1, n=n, s=s, epsilon=1.0)
    res = brute_force_min_relation(R1, inst.x, inst.y, 1.0)
    # two pairs per triple and one per pair: 2s + (k - s) = s + k
    assert res.cardinality == s + inst.k >= n + 1


@pytest.mark.parametrize("n, s", CASES)
def test_verification_passes_at_eps_over_20(n, s):
    inst = generate_spaced_pair(R1, n=n, s=s, epsilon=1.0)
    rep = verify_spaced_pair(R1, inst, 1.0 / 20)
    assert rep.passed and rep.counting_witness
    assert rep.min_max_value >= rep.hausdorff - 0.25
    assert rep.implied_lambda_lower_bound >= 2 - 0.5 * 0.05 * 5


def test_verification_first_instance_values():
    inst = generate_spaced_pair(R1, n=3, s=2, epsilon=1.0)
    rep = verify_spaced_pair(R1, inst, 0.05)
    assert rep.min_max_value == 1.0
    assert rep.covering_counts == (2, 2)
    assert rep.threshold == pytest.approx(0.75)


def test_verification_agrees_with_direct_search_on_coarse_grid():
    # independent check: try every z in FS_3 drawn from a coarse lattice
    inst = generate_spaced_pair(R1, n=3, s=2, epsilon=1.0)
    delta = 0.25
    rep = verify_spaced_pair(R1, inst, delta)
    lattice = np.concatenate(
        [np.arange(-1.0, 3.0 + 1e-9, delta), np.arange(9.0, 13.0 + 1e-9, delta)]
    )
    best = np.inf
    for k in range(1, 4):
        for combo in itertools.combinations(lattice, k):
            z = canonicalize(R1, list(combo))
            best = min(best, max(hausdorff_distance(R1, inst.x, z), hausdorff_distance(R1, z, inst.y)))
    assert rep.min_max_value == pytest.approx(best, abs=1e-12)


def test_degenerate_midpoint_z_equals_x():
    inst = generate_spaced_pair(R1, n=3, s=2, epsilon=1.0)
    dh = hausdorff_distance(R1, inst.x, inst.y)
    assert max(hausdorff_distance(R1, inst.x, inst.x), hausdorff_distance(R1, inst.x, inst.y)) == dh


def test_verification_rejects_coarse_grid_and_two_group_variant():
    inst = generate_spaced_pair(R1, n=3, s=2, epsilon=1.0)
    with pytest.raises(DomainError):
        verify_spaced_pair(R1, inst, 0.3)
    tg = generate_spaced_pair(R2, n=4, variant="two-group")
    with pytest.raises(DomainError):
        verify_spaced_pair(R2, tg, 0.05)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_two_group_variant_needs_2n_minus_2_pairs(n):
    inst = generate_spaced_pair(R2, n=n, epsilon=1.0, variant="two-group")
    assert len(inst.x) == len(inst.y) == n
    assert hausdorff_distance(R2, inst.x, inst.y) == pytest.approx(1.0)
    res = brute_force_min_relation(R2, inst.x, inst.y, 1.0)
    assert res.cardinality == 2 * n - 2


def test_two_group_variant_needs_a_plane_above_three():
    with pytest.raises(DomainError):
        generate_spaced_pair(R1, n=4, variant="two-group")


@pytest.mark.parametrize("n, s", CASES)
def test_two_leg_ratio_is_sharp_on_spaced_pairs(n, s):
    inst = generate_spaced_pair(R1, n=n, s=s, epsilon=1.0)
    tl = two_leg_quasiconvex_path(R1, inst.x, inst.y, n)
    dh = hausdorff_distance(R1, inst.x, inst.y)
    ratio = path_length_estimate(R1, tl.path, 8) / dh
    delta = 0.05
    assert 2 - 10 * delta <= ratio <= 2 * (1 + 1e-6)
    assert midpoint_lambda_bound(R1, inst.x, inst.y, tl.path) >= 2 - 10 * delta


def test_taxicab_obstruction_report():
    rep = taxicab_fs2_obstruction(0.01)
    assert rep.hausdorff == 2.0
    assert rep.feasible == ((0.0, 0.0),)
    assert rep.contained_in_origin_ball and rep.obstruction
    assert rep.sanity_extent == pytest.approx(0.5)
    cross = TaxicabCross()
    assert rep.A == canonicalize(cross, [(1, 0), (0, 1)])
    # every pair across A and B is at distance 2
    assert set(cross.pairwise(rep.A.coords, rep.B.coords).ravel()) == {2.0}
