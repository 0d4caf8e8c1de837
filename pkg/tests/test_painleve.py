"""Monodromy parameters, loop words, and the consolidated report."""

import math

import numpy as np
import pytest

from charsurf import painleve, surfaces


def test_theta_to_traces_cosine_dictionary():
    a, b, c, d = painleve.theta_to_traces((1, 0, 0, 0))
    assert complex(a) == pytest.approx(-2.0)
    assert complex(b) == complex(c) == complex(d) == pytest.approx(2.0)
    # periodicity in each entry
    t1 = painleve.theta_to_traces((0.3, 0.1, -0.4, 0.8))
    t2 = painleve.theta_to_traces((2.3, 0.1, -0.4, 0.8))
    assert np.allclose(np.array(t1, complex), np.array(t2, complex))


def test_hyperbolic_imaginary_parts_produce_cosh_traces():
    (a, *_rest) = painleve.theta_to_traces((1 + 0.5j, 0, 0, 0))
    assert complex(a).real == pytest.approx(-2.0 * math.cosh(0.5 * math.pi), rel=1e-12)
    assert abs(complex(a).imag) < 1e-12


def test_loop_words_spell_squared_twists():
    assert painleve.LOOP_WORDS == {"l0": "yxyx", "l1": "zyzy", "linf": "xzxz"}
    assert painleve.parse_loop("l0l1") == ["l0", "l1"]
    assert painleve.parse_loop("linf") == ["linf"]
    with pytest.raises(ValueError):
        painleve.parse_loop("l2")


def test_singular_measure_conditions():
    assert painleve.singular_measure_conditions((1, 0, 0, 0))["holds"]
    assert painleve.singular_measure_conditions((1 + 0.7j, 2 - 0.3j, 0, 0))["holds"]
    # even integer sum fails, fractional real part fails
    assert not painleve.singular_measure_conditions((1, 1, 0, 0))["holds"]
    assert not painleve.singular_measure_conditions((0.5, 0, 0, 0))["holds"]


def test_report_short_circuits_on_parabolic_loops():
    rep = painleve.monodromy_report((1, 0, 0, 0), "l0")
    assert rep["kind"] == "parabolic"
    assert rep["entropy"] == 0.0
    assert "parabolic" in rep["short_circuit"]


def test_report_short_circuits_on_failed_conditions():
    rep = painleve.monodromy_report((0.5, 0, 0, 0), "l0l1")
    assert rep["short_circuit"] == "theta conditions fail"
    assert not rep["conditions"]["holds"]


def test_full_report_at_the_nodal_parameters():
    rep = painleve.monodromy_report((1, 0, 0, 0), "l0l1")
    assert rep["kind"] == "hyperbolic"
    assert rep["word"] == "yxyxzyzy"
    assert rep["lambda"] == pytest.approx(7.0 + 4.0 * math.sqrt(3.0), rel=1e-12)
    assert rep["entropy"] == pytest.approx(math.log(7.0 + 4.0 * math.sqrt(3.0)), rel=1e-12)
    assert rep["topology"] == surfaces.CONNECTED_FOUR_PUNCTURED
    conf = rep["confinement"]
    assert conf["connected"] and conf["any_found"]
    assert conf["all_real"] and conf["unstable_bound_ok"]
    assert all(p["fraction_real"] == 1.0 for p in conf["periods"])
    # every torus orbit is bounded here, so the bounded set fills the chart
    assert rep["raster_dimension"]["value"] == pytest.approx(2.0, abs=1e-6)
    assert rep["loop_convention"] == painleve.LOOP_WORDS


def test_entropy_is_invariant_under_cyclic_relabeling():
    reports = [painleve.monodromy_report((1, 0, 0, 0), loop)
               for loop in ("l0l1", "l1linf", "linfl0")]
    ents = [r["entropy"] for r in reports]
    assert ents[0] == pytest.approx(ents[1], rel=1e-12)
    assert ents[0] == pytest.approx(ents[2], rel=1e-12)


def test_integer_odd_sum_parameters_always_classify_connected():
    rng = np.random.default_rng(17)
    for _ in range(20):
        re = rng.integers(-3, 4, 4)
        if int(re.sum()) % 2 == 0:
            re[0] += 1
        im = rng.uniform(-1.5, 1.5, 4)
        theta = tuple(float(r) + 1j * float(i) for r, i in zip(re, im))
        assert painleve.singular_measure_conditions(theta)["holds"]
        params = surfaces.params_from_traces(*painleve.theta_to_traces(theta))
        assert surfaces.classify_real_topology(params) == surfaces.CONNECTED_FOUR_PUNCTURED
