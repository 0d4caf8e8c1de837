"""Free-product word calculus and the congruence-matrix dictionary."""

import numpy as np
import pytest

from charsurf import words


RNG_WORDS = "xyz"


def random_word(rng, n):
    return "".join(RNG_WORDS[i] for i in rng.integers(0, 3, n))


def test_reduce_cancels_involution_squares():
    assert words.reduce("xx") == ""
    assert words.reduce("xxy") == "y"
    assert words.reduce("xyyx") == ""
    assert words.reduce("xyzzyx") == ""
    assert words.reduce("xyz") == "xyz"


def test_reduce_is_idempotent_on_random_words():
    rng = np.random.default_rng(0)
    for _ in range(200):
        w = random_word(rng, int(rng.integers(0, 12)))
        r = words.reduce(w)
        assert words.reduce(r) == r
        # reduced words have no equal adjacent letters
        assert all(a != b for a, b in zip(r, r[1:]))


def test_inverse_word_reverses_since_letters_are_involutions():
    assert words.inverse_word("xyz") == "zyx"
    rng = np.random.default_rng(1)
    for _ in range(100):
        w = words.reduce(random_word(rng, int(rng.integers(1, 10))))
        assert words.reduce(w + words.inverse_word(w)) == ""


def test_cyclic_reduce_core_and_conjugator():
    core, conj = words.cyclic_reduce("xyzx")
    assert core == "yz"
    assert conj == "x"
    # conjugating back recovers the original up to free reduction
    assert words.reduce(conj + core + words.inverse_word(conj)) == words.reduce("xyzx")


def test_cyclic_reduce_leaves_cyclically_reduced_words_alone():
    rng = np.random.default_rng(2)
    for _ in range(100):
        w = words.reduce(random_word(rng, int(rng.integers(1, 9))))
        if not w or w[0] == w[-1]:
            continue
        core, conj = words.cyclic_reduce(w)
        assert core == w and conj == ""


def test_check_word_rejects_foreign_letters_and_normalizes_case():
    with pytest.raises(ValueError):
        words.check_word("xqz")
    with pytest.raises(ValueError):
        words.check_word("x1z")
    assert words.check_word("XyZ") == "xyz"


def test_generator_matrices_are_involutions():
    ident = ((1, 0), (0, 1))
    for letter in "xyz":
        m = words.word_to_matrix(letter)
        assert words.mat_det(m) == -1
        assert words.mat_mul(m, m) == ident


def test_word_to_matrix_is_a_homomorphism():
    rng = np.random.default_rng(3)
    for _ in range(150):
        u = random_word(rng, int(rng.integers(0, 7)))
        v = random_word(rng, int(rng.integers(0, 7)))
        lhs = words.word_to_matrix(words.reduce(u + v))
        rhs = words.mat_mul(words.word_to_matrix(u), words.word_to_matrix(v))
        assert lhs == rhs


def test_integer_matrix_arithmetic_against_numpy():
    rng = np.random.default_rng(4)
    for _ in range(100):
        w = random_word(rng, int(rng.integers(1, 9)))
        m = words.word_to_matrix(w)
        a = np.array(m, dtype=np.int64)
        assert words.mat_det(m) == int(round(np.linalg.det(a)))
        assert words.mat_trace(m) == int(np.trace(a))
        inv = np.array(words.mat_inv(m), dtype=np.int64)
        assert np.array_equal(a @ inv, np.eye(2, dtype=np.int64))


def test_matrix_to_word_inverts_up_to_sign():
    rng = np.random.default_rng(5)
    for _ in range(120):
        w = words.reduce(random_word(rng, int(rng.integers(1, 10))))
        m = words.word_to_matrix(w)
        back = words.word_to_matrix(words.matrix_to_word(m))
        assert back in (m, words.mat_neg(m))


def test_congruence_membership():
    assert words.is_congruence_member(words.word_to_matrix("xyz"))
    assert words.is_congruence_member(((1, 0), (0, 1)))
    # even off-diagonal, odd diagonal is the defining pattern mod 2
    assert not words.is_congruence_member(((1, 1), (0, 1)))


def test_classification_by_trace():
    assert words.classify_word("x").kind == words.ELLIPTIC
    assert words.classify_word("xy").kind == words.PARABOLIC
    c = words.classify_word("xyz")
    assert c.kind == words.HYPERBOLIC
    assert c.lam == pytest.approx(4.23606797749979, abs=1e-12)
    assert c.slope == pytest.approx(-1.618033988749895, abs=1e-12)


def test_hyperbolic_lambda_is_spectral_radius():
    rng = np.random.default_rng(6)
    for _ in range(100):
        w = words.reduce(random_word(rng, int(rng.integers(3, 9))))
        c = words.classify_word(w)
        m = np.array(words.word_to_matrix(w), float)
        lam = max(abs(np.linalg.eigvals(m)))
        if c.kind == words.HYPERBOLIC:
            assert c.lam == pytest.approx(lam, rel=1e-10)
        else:
            # defective (parabolic) eigenvalues carry sqrt-size rounding
            assert lam == pytest.approx(1.0, abs=1e-6)


def test_boundary_fixed_points_are_moebius_fixed():
    rng = np.random.default_rng(7)
    for _ in range(60):
        w = words.reduce(random_word(rng, int(rng.integers(3, 9))))
        if words.classify_word(w).kind != words.HYPERBOLIC:
            continue
        (a, b), (c, d) = words.word_to_matrix(w)
        for t in words.boundary_fixed_points(words.word_to_matrix(w)):
            assert (a * t + b) / (c * t + d) == pytest.approx(t, abs=1e-9)


def test_positive_form_example():
    p, conj = words.positive_form(((5, 2), (-2, -1)))
    assert p == ((3, 2), (2, 1))
    assert min(min(row) for row in p) >= 0


def test_positive_form_is_a_conjugate_with_positive_entries():
    rng = np.random.default_rng(8)
    found = 0
    for _ in range(200):
        w = words.reduce(random_word(rng, int(rng.integers(3, 10))))
        m = words.word_to_matrix(w)
        if words.classify_word(w).kind != words.HYPERBOLIC:
            continue
        try:
            pos, g = words.positive_form(m)
        except ValueError:
            continue
        found += 1
        assert min(min(row) for row in pos) >= 0
        conj = words.mat_mul(words.mat_mul(g, m), words.mat_inv(g))
        assert conj in (pos, words.mat_neg(pos))
    assert found > 50


def test_stability_data_for_the_three_letter_word():
    sd = words.stability_data("xyz")
    assert sd.stable is True
    assert sd.ind_f == words.V_Z
    assert sd.ind_finv == words.V_Y


def test_stability_data_rejects_non_hyperbolic():
    with pytest.raises(ValueError):
        words.stability_data("xy")
