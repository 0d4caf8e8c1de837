"""Point dynamics on the cubic surfaces: orbits, escape, Green functions,
rasters, and the 2x2-matrix action on trace coordinates.

Each letter acts by a quadratic involution that swaps the two roots of the
defining cubic in one coordinate. Orbits of hyperbolic words escape doubly
exponentially, so the iterator moves to log-magnitude shadow coordinates
before float64 overflows and keeps counting steps there. Raster operations
are deterministic for a fixed configuration regardless of worker count: the
grid is cut into fixed row blocks, every block runs identical vectorized
code, and results are written by block index.
"""

from __future__ import annotations

import json
import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .surfaces import FAM, PT, SurfaceParams, gradient, residual
from .words import (HYPERBOLIC, IDENTITY, Mat, check_word, classify_word,
                    inverse_word, mat_det, mat_inv, mat_mul)

# iterate magnitudes in log scale beyond this to avoid overflow
LOG_SHADOW_THRESHOLD = 1e100
# "deep escape" threshold used by the Green function and the rate estimator
DEEP_NORM = 1e10


# ---------------------------------------------------------------------------
# point maps

def apply_generator(params: SurfaceParams, letter: str, p):
    """One involution letter. Components may be scalars or arrays."""
    x, y, z = p
    letter = letter.lower()
    if params.convention == PT:
        if letter == "x":
            return (y * z - x, y, z)
        if letter == "y":
            return (x, x * z - y, z)
        if letter == "z":
            return (x, y, x * y - z)
    else:
        if letter == "x":
            return (params.A - y * z - x, y, z)
        if letter == "y":
            return (x, params.B - x * z - y, z)
        if letter == "z":
            return (x, y, params.C - x * y - z)
    raise ValueError(f"unknown letter {letter!r}")


def apply_word(params: SurfaceParams, w: str, p):
    """Apply a word, rightmost letter first (composition in written order)."""
    w = check_word(w)
    for ch in reversed(w):
        p = apply_generator(params, ch, p)
    return p


def _batch_dtype(params: SurfaceParams, P: np.ndarray):
    # in-place letter updates would silently cast complex coefficients into a
    # real array, so pick the common inexact dtype up front
    dt = np.result_type(
        np.asarray(P).dtype,
        np.asarray(params.A).dtype,
        np.asarray(params.B).dtype,
        np.asarray(params.C).dtype,
    )
    return dt if np.issubdtype(dt, np.inexact) else np.float64


def apply_word_batch(params: SurfaceParams, w: str, P: np.ndarray) -> np.ndarray:
    """Word map on an (m, 3) coordinate array. Returns a new array."""
    w = check_word(w)
    P = np.array(P, dtype=_batch_dtype(params, P), copy=True)
    pt = params.convention == PT
    A, B, C = params.A, params.B, params.C
    x, y, z = P[:, 0], P[:, 1], P[:, 2]
    for ch in reversed(w):
        if ch == "x":
            x[:] = (y * z - x) if pt else (A - y * z - x)
        elif ch == "y":
            y[:] = (x * z - y) if pt else (B - x * z - y)
        else:
            z[:] = (x * y - z) if pt else (C - x * y - z)
    return P


def word_jacobians(params: SurfaceParams, w: str, P: np.ndarray):
    """Word map values and 3x3 Jacobians on an (m, 3) array.

    The Jacobian is accumulated letter by letter with the chain rule; each
    letter rewrites one row of the running Jacobian in place.
    """
    w = check_word(w)
    P = np.array(P, dtype=_batch_dtype(params, P), copy=True)
    m = P.shape[0]
    J = np.zeros((m, 3, 3), P.dtype)
    J[:, 0, 0] = J[:, 1, 1] = J[:, 2, 2] = 1.0
    pt = params.convention == PT
    A, B, C = params.A, params.B, params.C
    x, y, z = P[:, 0], P[:, 1], P[:, 2]
    s = 1.0 if pt else -1.0
    for ch in reversed(w):
        if ch == "x":
            J[:, 0, :] = -J[:, 0, :] + s * z[:, None] * J[:, 1, :] + s * y[:, None] * J[:, 2, :]
            x[:] = (y * z - x) if pt else (A - y * z - x)
        elif ch == "y":
            J[:, 1, :] = -J[:, 1, :] + s * z[:, None] * J[:, 0, :] + s * x[:, None] * J[:, 2, :]
            y[:] = (x * z - y) if pt else (B - x * z - y)
        else:
            J[:, 2, :] = -J[:, 2, :] + s * y[:, None] * J[:, 0, :] + s * x[:, None] * J[:, 1, :]
            z[:] = (x * y - z) if pt else (C - x * y - z)
    return P, J


# ---------------------------------------------------------------------------
# orbits and escape

@dataclass
class OrbitRecord:
    escaped: bool
    escape_time: int | None
    final_log_norm: float
    samples: list | None
    max_residual_drift: float
    iterations: int
    certified: bool = True  # bounded-at-budget is not a proof of boundedness


def _log_norm(logs) -> float:
    lm = max(logs)
    if lm == -math.inf:
        return -math.inf
    s = sum(math.exp(2.0 * (v - lm)) for v in logs)
    return lm + 0.5 * math.log(s)


def _safe_log_norm(cur) -> float:
    # scaled so the squares never overflow (coordinates reach ~1e200 in the
    # last step before the log shadow takes over)
    m = max(abs(c) for c in cur)
    if m == 0.0:
        return -math.inf
    if not math.isfinite(m):
        return math.inf
    s = sum((abs(c) / m) ** 2 for c in cur)
    return math.log(m) + 0.5 * math.log(s)


def _tropical_step(w: str, logs):
    # dominant-monomial recurrence on log magnitudes; the linear terms of the
    # involutions are negligible at 1e100 scale
    lx, ly, lz = logs
    for ch in reversed(w):
        if ch == "x":
            lx = max(ly + lz, lx)
        elif ch == "y":
            ly = max(lx + lz, ly)
        else:
            lz = max(lx + ly, lz)
    return lx, ly, lz


def orbit(params: SurfaceParams, w: str, p, max_iter: int = 10000,
          escape_radius: float = 1e3, keep_points: bool = False) -> OrbitRecord:
    """Iterate the word map, certifying escape or reporting bounded-at-budget.

    Escape is declared when the norm exceeds escape_radius and increased over
    the last steps (monotone once the dominant-monomial regime is entered;
    the growth guard suppresses transient spikes). Beyond 1e100 the iteration
    continues on log magnitudes. max_residual_drift records the worst
    scale-relative drift off the surface while coordinates are representable.
    """
    w = check_word(w)
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    cur = tuple(complex(c) for c in p)
    log_mode = False
    logs = None
    samples = [cur] if keep_points else None
    drift = 0.0
    log_r = math.log(escape_radius)
    prev1 = prev2 = -math.inf
    escape_time = None
    lognorm = -math.inf
    n = 0
    while True:
        if log_mode:
            lognorm = _log_norm(logs)
        else:
            lognorm = _safe_log_norm(cur)
            if lognorm < 0.5 * math.log(LOG_SHADOW_THRESHOLD):
                scale = 1.0 + (math.exp(2.0 * lognorm) if lognorm > -math.inf else 0.0)
                drift = max(drift, abs(residual(params, cur)) / scale)
        if lognorm > log_r and lognorm > prev1 and prev1 >= prev2:
            escape_time = n
            break
        if n >= max_iter:
            break
        if not log_mode and max(abs(c) for c in cur) > LOG_SHADOW_THRESHOLD:
            log_mode = True
            logs = tuple(math.log(abs(c)) if c != 0 else -math.inf for c in cur)
        if log_mode:
            logs = _tropical_step(w, logs)
        else:
            cur = apply_word(params, w, cur)
            if not all(math.isfinite(c.real) and math.isfinite(c.imag) for c in cur):
                # overflow past the shadow threshold in one step: escaped
                escape_time = n + 1
                lognorm = math.inf
                n += 1
                break
            if keep_points:
                samples.append(cur)
        prev2, prev1 = prev1, lognorm
        n += 1
    return OrbitRecord(
        escaped=escape_time is not None,
        escape_time=escape_time,
        final_log_norm=lognorm,
        samples=samples,
        max_residual_drift=drift,
        iterations=n,
    )


@dataclass(frozen=True)
class GreenEstimate:
    value: float
    iterations_used: int
    lam: float


def green_plus(params: SurfaceParams, w: str, p, n_max: int = 60) -> GreenEstimate:
    """Forward Green value lambda^-n log+||f^n(p)|| at the first n past the
    deep-escape threshold, 0.0 if still bounded at n_max. The backward value
    is green_plus with the inverse (reversed) word."""
    w = check_word(w)
    cls = classify_word(w)
    if cls.kind != HYPERBOLIC:
        raise ValueError("green function requires a hyperbolic word")
    lam = cls.lam
    cur = tuple(complex(c) for c in p)
    log_mode = False
    logs = None
    deep = math.log(DEEP_NORM)
    for n in range(n_max + 1):
        lognorm = _log_norm(logs) if log_mode else _safe_log_norm(cur)
        if lognorm > deep:
            return GreenEstimate(max(lognorm, 0.0) / lam ** n, n, lam)
        if not log_mode and max(abs(c) for c in cur) > LOG_SHADOW_THRESHOLD:
            log_mode = True
            logs = tuple(math.log(abs(c)) if c != 0 else -math.inf for c in cur)
        if log_mode:
            logs = _tropical_step(w, logs)
        else:
            cur = apply_word(params, w, cur)
    return GreenEstimate(0.0, n_max, lam)


def green_minus(params: SurfaceParams, w: str, p, n_max: int = 60) -> GreenEstimate:
    return green_plus(params, inverse_word(w), p, n_max)


def escape_rate(params: SurfaceParams, w: str, p, n: int = 25) -> float:
    """Slope estimate of log log||f^k(p)|| between the first deep-escape
    index and k = n; converges to the log of the dynamical degree. Raises if
    the orbit has not escaped deeply by step n."""
    w = check_word(w)
    cur = tuple(complex(c) for c in p)
    log_mode = False
    logs = None
    track: list[float] = []
    for _ in range(n + 1):
        if log_mode:
            track.append(_log_norm(logs))
        else:
            track.append(_safe_log_norm(cur))
            if max(abs(c) for c in cur) > LOG_SHADOW_THRESHOLD:
                log_mode = True
                logs = tuple(math.log(abs(c)) if c != 0 else -math.inf for c in cur)
        if log_mode:
            logs = _tropical_step(w, logs)
        else:
            cur = apply_word(params, w, cur)
    deep = math.log(DEEP_NORM)
    k0 = next((k for k, v in enumerate(track) if v > deep), None)
    if k0 is None or k0 >= n:
        raise RuntimeError("orbit did not escape deeply within the budget; "
                           "increase n or pick an escaping seed")
    return (math.log(track[n]) - math.log(track[k0])) / (n - k0)


# ---------------------------------------------------------------------------
# area form

def area_ratio(params: SurfaceParams, w: str, p) -> float:
    """|f* of the invariant area form / the form itself| at p; contract: 1.

    The form in the chart transverse to axis k is (2-form on the other two
    coordinates) / (gradient component k). The chart with the best-conditioned
    denominators at p and f(p) is chosen; at a singular point all three
    denominators vanish and the ratio is undefined.
    """
    w = check_word(w)
    P = np.array([[complex(c) for c in p]])
    Q, J = word_jacobians(params, w, P)
    q = (Q[0, 0], Q[0, 1], Q[0, 2])
    g0 = np.array(gradient(params, tuple(P[0])), complex)
    g1 = np.array(gradient(params, q), complex)
    k = int(np.argmax(np.minimum(np.abs(g0), np.abs(g1))))
    if min(abs(g0[k]), abs(g1[k])) < 1e-12:
        raise ValueError("all chart denominators degenerate (singular point)")
    i, j = [a for a in (0, 1, 2) if a != k]
    ti = np.zeros(3, complex)
    tj = np.zeros(3, complex)
    ti[i] = 1.0
    ti[k] = -g0[i] / g0[k]
    tj[j] = 1.0
    tj[k] = -g0[j] / g0[k]
    ui = J[0] @ ti
    uj = J[0] @ tj
    det2 = ui[i] * uj[j] - ui[j] * uj[i]
    return float(abs(det2) * abs(g0[k]) / abs(g1[k]))


# ---------------------------------------------------------------------------
# elementary-move action of 2x2 integer matrices on trace coordinates

def _t_power_factors(q: int) -> list[str]:
    if q >= 0:
        return ["T"] * q
    return ["J"] + ["T"] * (-q) + ["J"]


_ELEM = {
    "S": ((0, 1), (1, 0)),
    "T": ((1, 1), (0, 1)),
    "J": ((1, 0), (0, -1)),
}


def elementary_factors(m: Mat) -> list[str]:
    """Factor a det +-1 integer matrix as +- a product of S, T, J, exactly.

    Euclidean reduction on the first column; the returned letters multiply
    left to right to +-m (verified before returning).
    """
    if mat_det(m) not in (1, -1):
        raise ValueError("elementary factorization needs det +-1")
    inv_factors: list[str] = []  # letters of H1^-1, H2^-1, ... in order
    cur = m
    while cur[1][0] != 0:
        a, c = cur[0][0], cur[1][0]
        if abs(a) < abs(c):
            cur = mat_mul(_ELEM["S"], cur)
            inv_factors.append("S")
        else:
            q = int(round(a / c))
            cur = mat_mul(((1, -q), (0, 1)), cur)
            inv_factors.extend(_t_power_factors(q))
    e, f = cur[0][0], cur[1][1]
    b = cur[0][1]
    tail: list[str] = []
    if (e, f) == (1, 1):
        tail = _t_power_factors(b)
    elif (e, f) == (1, -1):
        tail = _t_power_factors(-b) + ["J"]
    elif (e, f) == (-1, 1):
        tail = _t_power_factors(b) + ["J"]
    else:
        tail = _t_power_factors(-b)
    factors = inv_factors + tail
    prod = IDENTITY
    for ch in factors:
        prod = mat_mul(prod, _ELEM[ch])
    if prod != m and prod != tuple(tuple(-v for v in row) for row in m):
        raise AssertionError("elementary factorization is inconsistent")
    return factors


def _move_S(x, y, z):
    return y, x, z


def _move_T(x, y, z):
    return x, z, x * z - y


def _move_J(x, y, z):
    return x, y, x * y - z


_MOVE = {"S": _move_S, "T": _move_T, "J": _move_J}


@dataclass(frozen=True)
class TraceMap:
    """Polynomial automorphism of the pt-convention level sets attached to a
    2x2 integer matrix. Calling it maps (x, y, z) tuples (components may be
    arrays). The matrix -identity acts as the identity map."""

    matrix: Mat
    moves: tuple[str, ...]

    def __call__(self, p):
        x, y, z = p
        for ch in self.moves:
            x, y, z = _MOVE[ch](x, y, z)
        return x, y, z


def nielsen_action(m: Mat) -> TraceMap:
    """Trace-coordinate action of a det +-1 matrix on every pt level set.

    The map is assembled from the elementary moves of the factorization of
    the INVERSE matrix, first factor applied first; with that order the
    assignment is a homomorphism of maps, matrix products compose to map
    compositions in the same order.
    """
    factors = elementary_factors(mat_inv(m))
    return TraceMap(matrix=m, moves=tuple(factors))


# ---------------------------------------------------------------------------
# escape-time rasters

@dataclass
class EscapeRaster:
    """Grid of escape times. values[i, j]: -2 off-surface, -1 bounded at
    budget, >= 0 escape step. Row i runs over the second window axis in
    ascending order."""

    width: int
    height: int
    values: np.ndarray
    window: tuple
    metadata: dict


def escape_times_batch(params: SurfaceParams, w: str, P: np.ndarray,
                       budget: int, radius: float) -> np.ndarray:
    """Vectorized certified escape times for an (m, 3) seed array.

    -1 marks bounded-at-budget. Escape requires crossing the radius with the
    norm having increased over the previous steps (vacuous in the first two).
    """
    m = P.shape[0]
    times = np.full(m, -1, np.int32)
    idx = np.arange(m)
    cur = np.array(P, copy=True)
    n1 = np.full(m, -np.inf)
    n2 = np.full(m, -np.inf)
    r2 = radius * radius
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(budget + 1):
            norm2 = np.abs(cur[:, 0]) ** 2 + np.abs(cur[:, 1]) ** 2 + np.abs(cur[:, 2]) ** 2
            bad = ~np.isfinite(norm2)
            esc = bad | ((norm2 > r2) & (norm2 > n1) & (n1 >= n2))
            if esc.any():
                times[idx[esc]] = n
                keep = ~esc
                cur, idx, norm2 = cur[keep], idx[keep], norm2[keep]
                n1, n2 = n1[keep], n2[keep]
            if idx.size == 0 or n == budget:
                break
            cur = apply_word_batch(params, w, cur)
            n2 = n1
            n1 = norm2
    return times


def escape_times_parallel(params: SurfaceParams, w: str, P: np.ndarray,
                          budget: int, radius: float,
                          workers: int | None = None,
                          chunk: int = 4096) -> np.ndarray:
    """escape_times_batch over fixed-size seed chunks, optionally threaded.

    Chunk boundaries depend only on the seed count, so the result is
    byte-identical for any worker count."""
    P = np.asarray(P)
    blocks = [(a, min(a + chunk, len(P))) for a in range(0, len(P), chunk)]
    if not blocks:
        return np.zeros(0, np.int32)

    def do_block(a, b):
        return escape_times_batch(params, w, P[a:b], budget, radius)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: do_block(*ab), blocks))
    else:
        parts = [do_block(a, b) for a, b in blocks]
    return np.concatenate(parts)


def _row_blocks(height: int, block: int = 16):
    for i in range(0, height, block):
        yield i, min(i + block, height)


def _run_blocks(fn, height: int, workers: int | None):
    blocks = list(_row_blocks(height))
    if not workers or workers <= 1:
        return [fn(a, b) for a, b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futs = [pool.submit(fn, a, b) for a, b in blocks]
        return [f.result() for f in futs]


def render_complex_slice(params: SurfaceParams, w: str, z0: complex,
                         window=((-2.0, 2.0), (-2.0, 2.0)), grid: int = 256,
                         budget: int = 200, radius: float = 1e4,
                         workers: int | None = None) -> EscapeRaster:
    """Escape-time raster of a complex line slice of the surface.

    The slice fixes z = z0; the residual conic x^2 + e xy + y^2 = c (with
    e = z0 in the general convention, e = -z0 in the pt one, c = D - z0^2)
    is parametrized rationally by chords through the base point (sqrt(c), 0),
    and the grid ranges over the complex chord parameter t (real part on the
    first window axis, imaginary part on the second). Degenerate conics
    (c = 0 or e^2 = 4) are rejected.
    """
    w = check_word(w)
    if params.A != 0 or params.B != 0 or params.C != 0:
        raise ValueError("complex slices need A = B = C = 0")
    z0 = complex(z0)
    e = -z0 if params.convention == PT else z0
    c = complex(params.D) - z0 * z0
    if c == 0 or e * e == 4:
        raise ValueError("degenerate conic slice (c = 0 or e^2 = 4)")
    x0 = np.sqrt(complex(c))
    (re_lo, re_hi), (im_lo, im_hi) = window
    width = height = int(grid)
    re = np.linspace(re_lo, re_hi, width)
    im = np.linspace(im_lo, im_hi, height)
    values = np.full((height, width), -2, np.int32)

    def do_block(a: int, b: int):
        t = re[None, :] + 1j * im[a:b, None]
        t = t.ravel()
        denom = 1.0 + e * t + t * t
        ok = np.abs(denom) > 1e-12
        s = np.where(ok, -x0 * (2.0 + e * t) / np.where(ok, denom, 1.0), 0.0)
        P = np.stack([x0 + s, t * s, np.full_like(t, z0)], axis=-1)
        out = np.full(t.shape, -2, np.int32)
        if ok.any():
            out[ok] = escape_times_batch(params, w, P[ok], budget, radius)
        return a, b, out.reshape(b - a, width)

    for a, b, block in _run_blocks(lambda a, b: do_block(a, b), height, workers):
        values[a:b] = block

    meta = {
        "op": "render_complex_slice",
        "word": w,
        "params": params_dict(params),
        "slice": {"z0": [z0.real, z0.imag]},
        "window": [list(window[0]), list(window[1])],
        "grid": [width, height],
        "budget": budget,
        "escape_radius": radius,
    }
    return EscapeRaster(width, height, values, window, meta)


def render_real_chart(params: SurfaceParams, w: str,
                      window=((-10.0, 10.0), (-10.0, 10.0)), sheet: int = 1,
                      grid: int = 256, budget: int = 200, radius: float = 1e3,
                      workers: int | None = None) -> EscapeRaster:
    """Escape-time raster on one sheet of the real surface over an (x, y)
    window. The sheet picks a root of the quadratic in z; pixels with
    negative discriminant are off-surface."""
    w = check_word(w)
    if abs(complex(params.D).imag) > 0:
        raise ValueError("real chart needs real parameters")
    sgn = 1.0 if sheet >= 0 else -1.0
    (x_lo, x_hi), (y_lo, y_hi) = window
    width = height = int(grid)
    xs = np.linspace(x_lo, x_hi, width)
    ys = np.linspace(y_lo, y_hi, height)
    values = np.full((height, width), -2, np.int32)
    pt = params.convention == PT
    A, B, C, D = (complex(v).real for v in (params.A, params.B, params.C, params.D))

    def do_block(a: int, b: int):
        X = np.repeat(xs[None, :], b - a, axis=0).ravel()
        Y = np.repeat(ys[a:b, None], width, axis=1).ravel()
        if pt:
            disc = (X * Y) ** 2 - 4.0 * (X * X + Y * Y - D)
            zb = X * Y
        else:
            disc = (X * Y - C) ** 2 - 4.0 * (X * X + Y * Y - A * X - B * Y - D)
            zb = -(X * Y - C)
        ok = disc >= 0
        Z = np.where(ok, (zb + sgn * np.sqrt(np.where(ok, disc, 0.0))) / 2.0, 0.0)
        out = np.full(X.shape, -2, np.int32)
        if ok.any():
            P = np.stack([X[ok], Y[ok], Z[ok]], axis=-1)
            out[ok] = escape_times_batch(params, w, P, budget, radius)
        return a, b, out.reshape(b - a, width)

    for a, b, block in _run_blocks(lambda a, b: do_block(a, b), height, workers):
        values[a:b] = block

    meta = {
        "op": "render_real_chart",
        "word": w,
        "params": params_dict(params),
        "chart": {"sheet": int(sgn)},
        "window": [list(window[0]), list(window[1])],
        "grid": [width, height],
        "budget": budget,
        "escape_radius": radius,
    }
    return EscapeRaster(width, height, values, window, meta)


def params_dict(params: SurfaceParams) -> dict:
    def enc(v):
        v = complex(v)
        return v.real if v.imag == 0 else [v.real, v.imag]

    d = {"A": enc(params.A), "B": enc(params.B), "C": enc(params.C),
         "D": enc(params.D), "convention": params.convention}
    if params.boundary_traces is not None:
        d["boundary_traces"] = [enc(t) for t in params.boundary_traces]
    return d


def write_pgm(raster: EscapeRaster, path: str, sidecar: bool = True) -> None:
    """16-bit P5 PGM: 0 off-surface, 1 bounded at budget, escape time + 2
    clamped to 65535. A JSON sidecar with the full configuration is written
    next to it."""
    enc = raster.values.astype(np.int64) + 2
    enc = np.clip(enc, 0, 65535).astype(">u2")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{raster.width} {raster.height}\n65535\n".encode())
        fh.write(enc.tobytes())
    if sidecar:
        meta = dict(raster.metadata)
        meta["pgm"] = {"off_surface": 0, "bounded": 1, "time_offset": 2}
        with open(path + ".json", "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")


def orbit_csv_rows(params: SurfaceParams, w: str, p, n: int):
    """(step, x, y, z, log norm) rows for CSV export; stops early on escape
    past the shadow threshold."""
    rec = orbit(params, w, p, max_iter=n, escape_radius=math.inf, keep_points=True)
    return [(k, q[0], q[1], q[2], _safe_log_norm(q))
            for k, q in enumerate(rec.samples)]
