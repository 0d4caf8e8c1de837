"""Substitution potentials: transfer cocycles, trace maps, spectra,
box-counting dimension."""

import math

import numpy as np
import pytest

from charsurf import schrodinger, surfaces


FIB = schrodinger.build_substitution("b", "ba")
GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def test_named_substitutions_include_both_golden_forms():
    assert schrodinger.NAMED_SUBSTITUTIONS["fib"] == ("b", "ba")
    assert schrodinger.NAMED_SUBSTITUTIONS["fib-alt"] == ("ab", "a")


def test_substitution_records_abelianization_and_growth():
    assert FIB.abelianization == ((0, 1), (1, 1))
    assert FIB.lambda_plus == pytest.approx(GOLDEN, rel=1e-12)


def test_non_primitive_rules_are_rejected():
    with pytest.raises(ValueError):
        schrodinger.build_substitution("a", "ab")


def test_fixed_word_prefix_is_substitution_invariant():
    w = schrodinger.fixed_word_prefix(FIB, 26)
    assert w == "babbababbabbababbababbabba"
    assert schrodinger.substitute(FIB, w)[:26] == w


def test_prefix_letter_frequency_approaches_the_golden_ratio():
    w = schrodinger.fixed_word_prefix(FIB, 987)
    counts = {ch: w.count(ch) for ch in "ab"}
    assert counts["b"] / counts["a"] == pytest.approx(GOLDEN, abs=2e-3)


def test_depth_for_budget_tracks_word_lengths():
    assert schrodinger.depth_for_budget(FIB, 1000) == 14
    # depth 14 probes words no longer than the budget, depth 15 would exceed it
    assert len(schrodinger.fixed_word_prefix(FIB, 987)) == 987


def test_transfer_matrices_are_unimodular():
    rng = np.random.default_rng(0)
    for _ in range(40):
        k = rng.uniform(0, 3)
        E = rng.uniform(-3, 3)
        w = schrodinger.fixed_word_prefix(FIB, int(rng.integers(1, 30)))
        M = schrodinger.transfer_matrix(k, E, w)
        # det = ad - bc cancels to O(eps * |M|^2) on hyperbolic products
        tol = 1e-12 * max(1.0, float(np.max(np.abs(M))) ** 2)
        assert abs(np.linalg.det(M) - 1.0) <= tol


def test_free_transfer_trace_is_chebyshev():
    rng = np.random.default_rng(1)
    for _ in range(40):
        E = rng.uniform(-1.9, 1.9)
        n = int(rng.integers(1, 40))
        w = schrodinger.fixed_word_prefix(FIB, n)
        tr = np.trace(schrodinger.transfer_matrix(0.0, E, w))
        assert complex(tr).real == pytest.approx(2 * math.cos(n * math.acos(E / 2)), abs=1e-8)


def test_trace_map_matrix_is_the_inverse_abelianization():
    from charsurf.words import mat_inv
    tm = schrodinger.trace_map(FIB)
    assert tm.matrix == mat_inv(FIB.abelianization)


def test_trace_map_reproduces_substituted_word_traces():
    rng = np.random.default_rng(2)
    for sub in (FIB, schrodinger.build_substitution("ab", "a")):
        tm = schrodinger.trace_map(sub)
        for _ in range(50):
            k = rng.uniform(-2, 2)
            E = rng.uniform(-4, 4)
            img = tm(schrodinger.schrodinger_curve(k, E))
            for got, w in zip(img, ("a", "b", "ba")):
                want = np.trace(schrodinger.transfer_matrix(k, E, schrodinger.substitute(sub, w)))
                assert complex(got) == pytest.approx(complex(want), abs=1e-10)


def test_energy_curve_lies_on_the_coupled_level():
    rng = np.random.default_rng(3)
    for _ in range(100):
        k = rng.uniform(-3, 3)
        E = rng.uniform(-6, 6)
        params = surfaces.pt_params(4.0 + k * k)
        assert abs(surfaces.residual(params, schrodinger.schrodinger_curve(k, E))) < 1e-10


def test_free_spectrum_is_a_single_band():
    cfg = schrodinger.SchrodingerConfig(kappa=0.0, window=(-3.0, 3.0), grid=2001,
                                        budget=1000, escape_radius=10.0)
    est = schrodinger.spectrum_estimate(FIB, cfg)
    assert len(est.intervals) == 1
    lo, hi = est.intervals[0]
    step = 6.0 / 2000
    assert abs(lo - (-2.0)) <= step and abs(hi - 2.0) <= step
    assert est.gaps == []
    assert est.config["depth"] == 14


def test_coupled_spectrum_opens_gaps():
    cfg = schrodinger.SchrodingerConfig(kappa=2.0, window=(-2.5, 4.5), grid=2000,
                                        budget=1000, escape_radius=10.0)
    est = schrodinger.spectrum_estimate(FIB, cfg)
    assert len(est.gaps) >= 20
    assert 0.0 < est.dimension < 1.0


def test_spectrum_pairs_with_the_letter_swapped_operator():
    # E -> kappa - E conjugates the operator onto the swapped-word potential
    kappa = 1.0
    grid = 3001
    cfg = schrodinger.SchrodingerConfig(kappa=kappa, window=(-3.0, 4.0), grid=grid,
                                        budget=400, escape_radius=10.0)
    cfg_sw = schrodinger.SchrodingerConfig(kappa=kappa, window=(kappa - 4.0, kappa + 3.0),
                                           grid=grid, budget=400, escape_radius=10.0)
    swapped = schrodinger.build_substitution("ab", "a")
    est = schrodinger.spectrum_estimate(FIB, cfg)
    est_sw = schrodinger.spectrum_estimate(swapped, cfg_sw)
    # the mirrored grid makes the flag vectors equal after reversal
    assert np.array_equal(est.bounded_flags, est_sw.bounded_flags[::-1])


def test_oracle_matches_dense_eigenvalues():
    evs = schrodinger.tridiagonal_oracle(FIB, 1.0, 120)
    w = schrodinger.fixed_word_prefix(FIB, 120)
    diag = np.array([1.0 if ch == "a" else 0.0 for ch in w])
    H = np.diag(diag) + np.diag(np.ones(119), 1) + np.diag(np.ones(119), -1)
    dense = np.linalg.eigvalsh(H)
    assert np.max(np.abs(evs - dense)) < 1e-9


def test_oracle_free_chain_closed_form():
    evs = schrodinger.tridiagonal_oracle(FIB, 0.0, 5)
    want = np.array([-math.sqrt(3), -1.0, 0.0, 1.0, math.sqrt(3)])
    assert np.max(np.abs(evs - want)) < 1e-9


def test_oracle_supports_only_dirichlet_truncation():
    with pytest.raises(ValueError):
        schrodinger.tridiagonal_oracle(FIB, 0.0, 8, boundary="free")


def test_lyapunov_positive_outside_the_free_band():
    ly = schrodinger.lyapunov(FIB, 0.0, 3.0, n=2000)
    want = math.log((3.0 + math.sqrt(5.0)) / 2.0)
    assert ly == pytest.approx(want, abs=2e-4)


def test_lyapunov_vanishes_inside_the_free_band():
    ly = schrodinger.lyapunov(FIB, 0.0, 1.0, n=5000)
    assert abs(ly) < 5e-3


def test_box_dimension_of_the_middle_thirds_set():
    thirds = [(0.0, 1.0)]
    for _ in range(10):
        thirds = [iv for (a, b) in thirds
                  for iv in ((a, a + (b - a) / 3), (b - (b - a) / 3, b))]
    est = schrodinger.box_dimension(thirds, window=(0.0, 1.0))
    assert est.value == pytest.approx(math.log(2) / math.log(3), abs=0.05)
    assert est.residual < 0.05
    assert len(est.scales) == len(est.counts)


def test_box_dimension_of_an_interval_is_one():
    est = schrodinger.box_dimension([(0.0, 1.0)], window=(0.0, 1.0))
    assert est.value == pytest.approx(1.0, abs=0.02)


def test_box_dimension_needs_a_nondegenerate_window():
    with pytest.raises(ValueError):
        schrodinger.box_dimension([(0.5, 0.5)], window=(0.5, 0.5))
