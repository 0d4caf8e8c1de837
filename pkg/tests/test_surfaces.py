"""Surface parameters, conventions, real topology, and the torus cover of the
four-nodal surface."""

import numpy as np
import pytest

from charsurf import dynamics, surfaces, words


def test_pt_params_places_level_in_the_constant_term():
    p = surfaces.pt_params(5.0)
    assert (p.A, p.B, p.C, p.D) == (0.0, 0.0, 0.0, 5.0)
    assert p.convention == surfaces.PT


def test_residual_zero_exactly_on_surface():
    p = surfaces.pt_params(2.0)
    # x^2 + y^2 + z^2 - xyz = D at (1, 1, z) forces z^2 - z = 0
    assert abs(surfaces.residual(p, (1.0, 1.0, 0.0))) < 1e-15
    assert abs(surfaces.residual(p, (1.0, 1.0, 1.0))) < 1e-15
    assert abs(surfaces.residual(p, (1.0, 1.0, 0.5))) > 0.1
    assert surfaces.on_surface(p, (1.0, 1.0, 1.0))
    assert not surfaces.on_surface(p, (1.0, 1.0, 0.5))


def test_convention_conversion_is_an_involution_preserving_membership():
    rng = np.random.default_rng(0)
    p_pt = surfaces.pt_params(3.0)
    for _ in range(50):
        x, y = rng.uniform(-2, 2, 2)
        disc = (x * y) ** 2 - 4 * (x * x + y * y - 3.0)
        if disc < 0:
            continue
        z = 0.5 * (x * y + np.sqrt(disc))
        q = (x, y, z)
        assert surfaces.on_surface(p_pt, q)
        p_fam, q_fam = surfaces.convert_convention(p_pt, q)
        assert p_fam.convention == surfaces.FAM
        assert surfaces.on_surface(p_fam, q_fam)
        p_back, q_back = surfaces.convert_convention(p_fam, q_fam)
        assert p_back.convention == surfaces.PT
        assert np.allclose(q_back, q)


def test_params_from_traces_cayley_case():
    p = surfaces.params_from_traces(-2, 2, 2, 2)
    assert complex(p.A) == 0 and complex(p.B) == 0 and complex(p.C) == 0
    assert complex(p.D) == 4
    assert p.boundary_traces == (-2, 2, 2, 2)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(1)
    p = surfaces.SurfaceParams(0.3, -0.2, 0.7, 1.1, surfaces.FAM)
    h = 1e-6
    for _ in range(30):
        q = rng.uniform(-2, 2, 3)
        g = surfaces.gradient(p, q)
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            num = (surfaces.residual(p, q + e) - surfaces.residual(p, q - e)) / (2 * h)
            assert complex(g[i]) == pytest.approx(complex(num), abs=1e-6)


def test_singular_points_of_the_four_nodal_surface():
    sing = surfaces.singular_points(surfaces.pt_params(4.0))
    assert len(sing) == 4
    P = np.array(sing, float)
    # nodes: (2,2,2) and its double sign changes
    want = {(2.0, 2.0, 2.0), (2.0, -2.0, -2.0), (-2.0, 2.0, -2.0), (-2.0, -2.0, 2.0)}
    assert {tuple(np.round(row, 9)) for row in P} == want
    p4 = surfaces.pt_params(4.0)
    for q in sing:
        assert abs(surfaces.residual(p4, q)) < 1e-9
        assert np.max(np.abs(surfaces.gradient(p4, q))) < 1e-8


def test_smooth_levels_have_no_singular_points():
    assert surfaces.singular_points(surfaces.pt_params(5.0)) == []
    assert surfaces.singular_points(surfaces.pt_params(2.0)) == []


@pytest.mark.parametrize("D,label", [
    (-1.0, surfaces.FOUR_DISKS),
    (0.0, surfaces.FOUR_DISKS_AND_POINT),
    (2.0, surfaces.FOUR_DISKS_AND_SPHERE),
    (4.0, surfaces.CAYLEY_SINGULAR),
    (5.0, surfaces.CONNECTED_FOUR_PUNCTURED),
])
def test_real_topology_classification(D, label):
    assert surfaces.classify_real_topology(surfaces.pt_params(D)) == label


def test_cayley_projection_lands_on_the_four_nodal_surface():
    assert np.allclose(surfaces.cayley_project(1j, 1j), (0.0, 0.0, -2.0))
    rng = np.random.default_rng(2)
    p4 = surfaces.pt_params(4.0)
    for _ in range(100):
        ang = rng.uniform(0, 2 * np.pi, 2)
        q = surfaces.cayley_project(np.exp(1j * ang[0]), np.exp(1j * ang[1]))
        assert abs(surfaces.residual(p4, q)) < 1e-12
        # unit-torus points project to the real compact part
        assert np.max(np.abs(np.imag(np.array(q, complex)))) < 1e-12


def test_word_monomial_of_the_three_letter_word():
    assert surfaces.word_monomial("xyz") == ((3, -2), (-2, 1))


def test_word_monomial_is_a_homomorphism():
    rng = np.random.default_rng(3)
    for _ in range(100):
        u = "".join("xyz"[i] for i in rng.integers(0, 3, int(rng.integers(0, 6))))
        v = "".join("xyz"[i] for i in rng.integers(0, 3, int(rng.integers(0, 6))))
        lhs = surfaces.word_monomial(words.reduce(u + v))
        rhs = words.mat_mul(surfaces.word_monomial(u), surfaces.word_monomial(v))
        assert lhs == rhs


def test_torus_cover_intertwines_word_maps():
    # f_w(project(u, v)) = project(N_w (u, v)) on the unit torus
    rng = np.random.default_rng(4)
    p4 = surfaces.pt_params(4.0)
    for w in ("x", "zy", "xyz", "xzyx"):
        N = surfaces.word_monomial(w)
        for _ in range(40):
            ang = rng.uniform(0, 2 * np.pi, 2)
            u, v = np.exp(1j * ang[0]), np.exp(1j * ang[1])
            lhs = dynamics.apply_word(p4, w, surfaces.cayley_project(u, v))
            rhs = surfaces.cayley_project(*surfaces.monomial_apply(N, (u, v)))
            assert max(abs(complex(a) - complex(b)) for a, b in zip(lhs, rhs)) < 1e-12


def test_boundary_trace_product_drives_connectivity():
    # hyperbolic boundary traces with negative product: connected
    p = surfaces.params_from_traces(-2.5, 2.5, 2.5, 2.5)
    assert surfaces.classify_real_topology(p) == surfaces.CONNECTED_FOUR_PUNCTURED
