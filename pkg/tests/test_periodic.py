"""Periodic point search, torus census, multipliers, one-sided probes."""

import math

import numpy as np
import pytest

from charsurf import periodic, surfaces


PT4 = surfaces.pt_params(4.0)
PT5 = surfaces.pt_params(5.0)
LAM = 2.0 + math.sqrt(5.0)


def hausdorff(A, B):
    d = np.max(np.abs(A[:, None, :] - B[None, :, :]), axis=2)
    return max(d.min(axis=1).max(), d.min(axis=0).max())


def orbit_points(found):
    return np.array([q for r in found for q in r.orbit], complex)


def test_default_seeds_are_deterministic_and_cover_the_nodes():
    S1 = periodic.default_seeds(PT5, 2)
    S2 = periodic.default_seeds(PT5, 2)
    assert np.array_equal(S1, S2)
    assert np.all(np.isfinite(S1))
    # on the nodal level the exact nodes are always seeded
    S4 = periodic.default_seeds(PT4, 1)
    for node in surfaces.singular_points(PT4):
        d = np.max(np.abs(S4 - np.array(node, complex)[None, :]), axis=1)
        assert d.min() < 1e-12


def test_fixed_points_on_the_four_nodal_surface_are_its_nodes():
    pts = periodic.find_periodic(PT4, "xyz", 1)
    assert len(pts) == 4
    got = {tuple(np.round(np.array(r.point, complex).real, 9)) for r in pts}
    want = {(2.0, 2.0, 2.0), (2.0, -2.0, -2.0), (-2.0, 2.0, -2.0), (-2.0, -2.0, 2.0)}
    assert got == want
    for r in pts:
        assert r.singular
        assert r.period == 1
        # the node pairs carry the squared expansion rate
        assert abs(r.multipliers[0]) == pytest.approx(LAM ** 2, rel=1e-6)


def test_census_counts_follow_the_determinant_formula():
    N = surfaces.word_monomial("xyz")
    I = ((1, 0), (0, 1))
    from charsurf.words import mat_det, mat_mul

    def matpow(M, k):
        R = I
        for _ in range(k):
            R = mat_mul(R, M)
        return R

    for n, total in ((1, 4), (2, 18), (3, 76), (4, 322)):
        res = periodic.cayley_census(N, n)
        Mn = matpow(N, n)
        plus = abs(mat_det(((Mn[0][0] - 1, Mn[0][1]), (Mn[1][0], Mn[1][1] - 1))))
        minus = abs(mat_det(((Mn[0][0] + 1, Mn[0][1]), (Mn[1][0], Mn[1][1] + 1))))
        assert res.count_plus == plus
        assert res.count_minus == minus
        assert len(res.points) == total
        # the torus involution identifies the two solution families
        assert total == (plus + minus) // 2


def test_census_points_are_periodic_on_the_surface():
    res = periodic.cayley_census(surfaces.word_monomial("xyz"), 2)
    P = np.array(res.points, complex).reshape(-1, 3)
    from charsurf import dynamics
    Q = P.copy()
    for _ in range(2):
        Q = dynamics.apply_word_batch(PT4, "xyz", Q)
    assert np.max(np.abs(Q - P)) < 1e-9
    lvl = np.abs(surfaces.residual(PT4, (P[:, 0], P[:, 1], P[:, 2])))
    assert lvl.max() < 1e-9


def test_search_reproduces_the_census_through_period_three():
    N = surfaces.word_monomial("xyz")
    for n in (1, 2, 3):
        found = periodic.find_periodic(PT4, "xyz", n)
        census = periodic.cayley_census(N, n)
        P = orbit_points(found)
        Q = np.array(census.points, complex).reshape(-1, 3)
        assert len(P) == len(Q)
        assert hausdorff(P, Q) < 1e-8


def test_minimal_periods_partition_the_point_count():
    found = periodic.find_periodic(PT4, "xyz", 2)
    by_period = {}
    for r in found:
        by_period.setdefault(r.period, 0)
        by_period[r.period] += r.period
    # 18 points of period dividing 2: the 4 fixed nodes plus 7 genuine 2-cycles
    assert by_period == {1: 4, 2: 14}


def test_multiplier_product_reflects_area_preservation():
    found = periodic.find_periodic(PT5, "xyz", 2)
    assert len(found) == 11
    for r in found:
        mb, ms = r.multipliers
        assert abs(mb * ms) == pytest.approx(1.0, rel=1e-6)
        assert r.kind == "saddle"


def test_smooth_level_search_is_closed_under_double_sign_changes():
    found = periodic.find_periodic(PT5, "xyz", 2)
    P = orbit_points(found)
    for s in ((1, -1, -1), (-1, 1, -1), (-1, -1, 1)):
        assert hausdorff(P, P * np.array(s)[None, :]) < 1e-9


def test_non_real_orbits_appear_in_conjugate_pairs():
    found = periodic.find_periodic(surfaces.pt_params(2.0), "xyz", 2)
    nonreal = [r for r in found if not r.is_real]
    assert len(nonreal) == 4
    P = orbit_points(nonreal)
    assert hausdorff(P, np.conj(P)) < 1e-9


def test_real_orbits_have_unstable_multiplier_above_the_degree():
    found = periodic.find_periodic(PT5, "xyz", 3)
    assert len(found) == 24
    assert all(r.is_real for r in found)
    min_mod = min(abs(r.multipliers[0]) for r in found)
    assert min_mod >= LAM ** 3 - 0.01


def test_one_sided_probe_returns_flags_for_each_manifold():
    found = periodic.find_periodic(PT5, "xyzxyz", 1)
    probe = periodic.one_sided_probe(PT5, "xyzxyz", found[0])
    assert set(probe) >= {"u_one_sided", "s_one_sided"}
    assert isinstance(probe["u_one_sided"], bool)
    assert isinstance(probe["s_one_sided"], bool)


def test_confinement_report_shape_and_verdicts():
    rep = periodic.real_confinement_report(PT5, "xyz", 2)
    assert rep["connected"] is True
    assert rep["any_found"] is True
    assert rep["all_real"] is True
    assert rep["unstable_bound_ok"] is True
    assert [p["period"] for p in rep["periods"]] == [1, 2]
    n2 = rep["periods"][1]
    assert n2["orbits"] == 11
    assert n2["points"] == 22
    assert n2["fraction_real"] == 1.0


def test_empirical_measure_weights_points_equally():
    em = periodic.empirical_measure(PT5, "xyz", 2)
    S = np.asarray(em.support)
    assert S.shape == (22, 3)
    assert em.period == 2
    assert em.weight * len(S) == pytest.approx(1.0)


def test_disconnected_level_yields_an_empty_real_search():
    found = periodic.find_periodic(surfaces.pt_params(-1.0), "xyz", 1)
    assert all(not r.is_real for r in found)
