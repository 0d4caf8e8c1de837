"""Painleve VI parameter translation and monodromy dynamics reports.

The four angular parameters theta determine boundary traces a = 2cos(pi
theta_alpha) (and so on), hence a surface in the family; monodromy loops act
through squared-twist words on that surface. When the real parts of theta
are integers with odd sum, every trace satisfies |t| >= 2 with negative
product, the real surface is connected, and the bounded-orbit dynamics of a
hyperbolic loop is confined to the real locus.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .dynamics import params_dict, render_real_chart
from .periodic import real_confinement_report
from .surfaces import classify_real_topology, params_from_traces
from .words import HYPERBOLIC, classify_word

# fixed assignment of monodromy loops to squared-twist words; every reported
# quantity (lambda, entropy, confinement, dimension) is invariant under
# relabeling and conjugation, so the choice is a recorded convention
LOOP_WORDS = {"l0": "yxyx", "l1": "zyzy", "linf": "xzxz"}


def theta_to_traces(theta) -> tuple:
    """Component-wise 2cos(pi theta); feeds params_from_traces."""
    a, b, c, d = (complex(t) for t in theta)
    return tuple(2.0 * cmath.cos(cmath.pi * t) for t in (a, b, c, d))


def singular_measure_conditions(theta) -> dict:
    """Integer real parts with odd sum; returns the integer parts either way."""
    ts = [complex(t) for t in theta]
    ns = [int(round(t.real)) for t in ts]
    integral = all(abs(t.real - n) < 1e-9 for t, n in zip(ts, ns))
    odd = sum(ns) % 2 == 1
    return {"holds": bool(integral and odd), "n": tuple(ns)}


def parse_loop(loop_word) -> list:
    """Normalize a loop description ("l0l1", "l0*l1", or a token list)."""
    if not isinstance(loop_word, str):
        tokens = list(loop_word)
        if any(t not in LOOP_WORDS for t in tokens):
            raise ValueError(f"loop tokens must be from {sorted(LOOP_WORDS)}")
        return tokens
    s = loop_word
    tokens = []
    i = 0
    while i < len(s):
        if s[i] in " *.,":
            i += 1
            continue
        if s.startswith("linf", i):
            tokens.append("linf")
            i += 4
        elif s.startswith("l0", i) or s.startswith("l1", i):
            tokens.append(s[i:i + 2])
            i += 2
        else:
            raise ValueError(f"cannot parse loop word at {s[i:]!r}")
    if not tokens:
        raise ValueError("empty loop word")
    return tokens


def _enc(v: complex):
    v = complex(v)
    return v.real if v.imag == 0 else [v.real, v.imag]


def _raster_dimension(mask: np.ndarray) -> dict | None:
    """2d box-counting slope of a boolean raster over dyadic pixel blocks."""
    if not mask.any():
        return None
    n = mask.shape[0]
    scales = [1, 2, 4, 8, 16, 32]
    counts = []
    for s in scales:
        m = n // s * s
        blocks = mask[:m, :m].reshape(m // s, s, m // s, s)
        counts.append(int(blocks.any(axis=(1, 3)).sum()))
    if any(c == 0 for c in counts):
        return None
    xs = np.log10(1.0 / np.array(scales, float))
    ys = np.log10(np.array(counts, float))
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = float(np.sqrt(np.mean((ys - (slope * xs + intercept)) ** 2)))
    return {"value": float(slope), "residual": resid}


def monodromy_report(theta, loop_word) -> dict:
    """Dynamics report for a monodromy loop at the given parameters.

    Always reports the loop's word, isometry kind, lambda, and entropy. When
    the parameters meet the integer/odd-sum conditions and the loop is
    hyperbolic, adds the real-confinement table (periods up to 3) and a
    box-counting dimension estimate of the bounded set on a real chart
    raster; otherwise the report records why it stopped short.
    """
    tokens = parse_loop(loop_word)
    word = "".join(LOOP_WORDS[t] for t in tokens)
    traces = theta_to_traces(theta)
    params = params_from_traces(*traces)
    conditions = singular_measure_conditions(theta)
    cls = classify_word(word)
    entropy = math.log(cls.lam) if cls.lam > 1 else 0.0
    try:
        topology = classify_real_topology(params)
    except ValueError:
        topology = None
    report = {
        "theta": [_enc(t) for t in theta],
        "traces": [_enc(t) for t in traces],
        "params": params_dict(params),
        "conditions": {"holds": conditions["holds"],
                       "n": list(conditions["n"])},
        "loop": tokens,
        "loop_convention": dict(LOOP_WORDS),
        "word": word,
        "kind": cls.kind,
        "lambda": cls.lam,
        "entropy": entropy,
        "topology": topology,
        "confinement": None,
        "raster_dimension": None,
        "short_circuit": None,
    }
    if not conditions["holds"]:
        report["short_circuit"] = "theta conditions fail"
        return report
    if cls.kind != HYPERBOLIC:
        report["short_circuit"] = f"loop word is {cls.kind}; entropy 0"
        return report
    confinement = real_confinement_report(params, word, 3)
    report["confinement"] = confinement
    raster = render_real_chart(params, word, window=((-3.0, 3.0), (-3.0, 3.0)),
                               sheet=1, grid=192, budget=150, radius=1e3)
    report["raster_dimension"] = _raster_dimension(raster.values == -1)
    return report
