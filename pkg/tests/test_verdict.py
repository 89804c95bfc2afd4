import itertools
import math

import pytest

from curvlink.dihedral import beta_of, symmetric_alpha
from curvlink.errors import DomainError
from curvlink.links import ArtinDefiningGraph, DeltaAssignment, combined_link
from curvlink.metric_graph import is_cat1
from curvlink.verdict import (
    RECIPE_ALPHA_4,
    ReductionInapplicable,
    alpha_plus_two_beta_envelope,
    amn2_graph,
    check,
    enumerate_amn2,
    excluded_triples,
    reference_excluded_list,
    recipe_assignment,
    solve_deltas,
    triples_check,
)

PI = math.pi
TWO_PI = 2 * PI


def random_defining_graph(rng, max_gens=6):
    n = rng.randint(2, max_gens)
    gens = [chr(ord("a") + i) for i in range(n)]
    rel = {}
    for x, y in itertools.combinations(gens, 2):
        m = rng.choice([2, 2, 3, 4, 5, 6, 7, 9, 13, 25, 50, math.inf, math.inf])
        rel[(x, y)] = m
    return ArtinDefiningGraph.from_indices(gens, rel)


def test_basic_examples():
    assert not check(amn2_graph(43, 3)).passed
    assert check(amn2_graph(44, 3)).passed
    assert check(ArtinDefiningGraph.triangle(8, 8, 2)).passed
    assert not check(ArtinDefiningGraph.triangle(2, 2, 2)).passed
    # a single block is always fine
    assert check(ArtinDefiningGraph.from_indices("ab", {("a", "b"): 3})).passed


def test_failing_verdict_names_a_short_cycle():
    g = ArtinDefiningGraph.triangle(5, 5, 5)
    v = check(g)
    assert not v.passed and v.slack < 0
    assert v.cycle and len(v.cycle_tags) == len(v.cycle)


def test_two_pi_exact_passes():
    # three index-2 blocks over a pair and a free generator: torus circles are exactly 2 pi
    g = ArtinDefiningGraph.from_indices("abc", {("a", "b"): 2})
    v = check(g)
    assert v.passed and v.systole == pytest.approx(TWO_PI)


def test_triples_check_agrees_with_full_check(rng):
    for _ in range(500):
        g = random_defining_graph(rng)
        full = check(g)
        tri = triples_check(g)
        assert full.passed == tri.passed, g
        if not tri.passed:
            assert full.systole <= tri.systole + 1e-12


def test_triples_check_refuses_short_edges():
    g = ArtinDefiningGraph.triangle(4, 4, 4)
    d = DeltaAssignment({frozenset(p): math.radians(30) for p in g.finite_pairs()})
    with pytest.raises(ReductionInapplicable):
        triples_check(g, d)
    # the full check still answers
    assert not check(g, d).passed


def test_verdict_reproducible_from_link():
    g = ArtinDefiningGraph.triangle(9, 4, 3)
    v = check(g)
    ok, w = is_cat1(combined_link(g, v.deltas))
    assert ok == v.passed
    assert w.length == pytest.approx(v.systole)


def test_tolerance_is_respected():
    g = ArtinDefiningGraph.triangle(5, 5, 5)
    v = check(g)
    assert check(g, tol=-v.slack + 1e-6).passed


# thresholds

def test_enumerate_amn2_thresholds():
    rows = enumerate_amn2()
    assert [(r.n, r.minimal_m) for r in rows] == [(3, 44), (4, 19), (5, 12), (6, 10), (7, 8), (8, 8)]
    assert rows[0].finite_type_ms == (3, 4, 5)
    assert all(r.finite_type_ms == () for r in rows[1:])


def test_thresholds_are_monotone_in_m():
    for r in enumerate_amn2()[:5]:
        for m in range(r.n, 61):
            assert check(amn2_graph(m, r.n)).passed == (m >= r.minimal_m)


def test_required_alpha_matches_criterion():
    for r in enumerate_amn2(n_range=range(3, 8)):
        assert r.required_alpha == pytest.approx(1.5 * PI - symmetric_alpha(r.n))
        assert symmetric_alpha(r.minimal_m) >= r.required_alpha - 1e-9
        assert symmetric_alpha(r.minimal_m - 1) < r.required_alpha


def test_large_indices_all_pass():
    for m in range(8, 31):
        for n in range(8, 31):
            assert check(amn2_graph(m, n)).passed


def test_enumerate_rejects_small_n():
    with pytest.raises(DomainError):
        enumerate_amn2(n_range=[2])


# excluded triples

def test_excluded_triples_small():
    ex = excluded_triples(8)
    assert ex == reference_excluded_list(8)
    assert (2, 2, 2) in ex and (7, 7, 2) in ex and (5, 5, 5) in ex
    assert (8, 8, 2) not in ex and (6, 6, 6) not in ex


def test_excluded_triples_cross_checked_by_full_check():
    ex = set(excluded_triples(14))
    for m1 in range(2, 15):
        for m2 in range(2, m1 + 1):
            for m3 in range(2, m2 + 1):
                passed = check(ArtinDefiningGraph.triangle(m1, m2, m3)).passed
                assert passed == ((m1, m2, m3) not in ex)


# recipe and envelope

def test_recipe_beta_four():
    assert math.degrees(beta_of(4, RECIPE_ALPHA_4 / 2)) == pytest.approx(91.25, abs=0.01)


def test_recipe_passes_everything_but_444():
    for t in itertools.combinations_with_replacement(range(4, 12), 3):
        g = ArtinDefiningGraph.triangle(*t)
        v = triples_check(g, recipe_assignment(g))
        assert v.passed == (t != (4, 4, 4)), t


def test_recipe_needs_index_four_or_more():
    with pytest.raises(DomainError):
        recipe_assignment(ArtinDefiningGraph.triangle(3, 4, 5))


def test_envelope_stays_below_two_pi():
    rep = alpha_plus_two_beta_envelope(4)
    assert rep.max_value < TWO_PI and rep.margin > 0
    assert math.degrees(rep.argmax_alpha) > 179
    # the sup is only approached as alpha -> pi
    assert rep.argmax_alpha == rep.alphas[-1]
    assert rep.values[-1] > rep.values[0]


# solver

def test_solve_beats_recipe_on_445():
    g = ArtinDefiningGraph.triangle(4, 4, 5)
    res = solve_deltas(g)
    recipe = triples_check(g, recipe_assignment(g))
    assert res.feasible
    assert res.slack >= recipe.slack - 1e-9
    assert check(g, res.deltas).slack == pytest.approx(res.slack, abs=1e-12)


@pytest.mark.parametrize("t", [(4, 4, 4), (7, 7, 2)])
def test_solve_reports_infeasible(t):
    res = solve_deltas(ArtinDefiningGraph.triangle(*t))
    assert not res.feasible and res.slack < 0
    if t == (4, 4, 4):
        assert [e.m for e in res.envelopes] == [4]


def test_solve_symmetric_mode_matches_check():
    g = ArtinDefiningGraph.triangle(5, 4, 3)
    res = solve_deltas(g, mode="symmetric")
    assert res.slack == pytest.approx(check(g).slack)


def test_finer_grid_never_hurts():
    g = ArtinDefiningGraph.triangle(4, 5, 6)
    coarse = solve_deltas(g, grid_step=math.radians(2.0))
    fine = solve_deltas(g, grid_step=math.radians(0.5))
    assert fine.slack >= coarse.slack - 1e-6


def test_solve_validation():
    g = ArtinDefiningGraph.triangle(4, 5, 6)
    with pytest.raises(DomainError):
        solve_deltas(g, mode="nope")
    with pytest.raises(DomainError):
        solve_deltas(g, grid_step=0)
