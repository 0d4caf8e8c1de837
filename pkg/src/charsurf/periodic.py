"""Periodic points of word maps: multi-start search, tangent multipliers,
an exact census oracle on the four-nodal surface, saddle empirical measures,
one-sided escape probes, and real-confinement reports.

The search refines the stacked system (f^n(p) - p, level residual) with a
damped Gauss-Newton iteration from a deterministic seed family, completes
each root to its full orbit, and snaps near-misses onto exact singular
points. On the four-nodal surface the torus covering turns the same question
into integer linear congruences, which are solved exactly and used as the
oracle the search is measured against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dynamics import apply_word_batch, word_jacobians
from .surfaces import (CAYLEY_SINGULAR, CONNECTED_FOUR_PUNCTURED,
                       SurfaceParams, cayley_project, classify_real_topology,
                       gradient, residual, singular_points)
from .words import (HYPERBOLIC, Mat, check_word, classify, classify_word,
                    inverse_word, mat_mul)

SADDLE = "saddle"
ELLIPTIC_POINT = "elliptic"
PARABOLIC_LIKE = "parabolic-like"

REFINE_TOL = 1e-10   # accepted stacked residual after refinement
DEDUP_TOL = 1e-6     # max-norm separation below which points are identified
SNAP_TOL = 1e-4      # distance within which a root is snapped to a singular point
SINGULAR_GRAD = 1e-8  # gradient norm below which the tangent plane degenerates


@dataclass
class PeriodicPoint:
    point: tuple
    period: int
    multipliers: tuple
    kind: str
    is_real: bool
    one_sided: dict = field(default_factory=lambda: {"u": None, "s": None})
    orbit: tuple = ()
    singular: bool = False


class PeriodicList(list):
    """List of PeriodicPoint with the search statistics attached."""

    def __init__(self, items=(), stats=None):
        super().__init__(items)
        self.stats = dict(stats or {})


# ---------------------------------------------------------------------------
# refinement engine

def _stacked_system(params: SurfaceParams, w: str, n: int, P: np.ndarray):
    """Residual (f^n(p)-p, level) and its 4x3 Jacobian rows, batched."""
    m = P.shape[0]
    J = np.broadcast_to(np.eye(3, dtype=complex), (m, 3, 3)).copy()
    Q = P
    for _ in range(n):
        Q, Js = word_jacobians(params, w, Q)
        J = Js @ J
    lvl = residual(params, (P[:, 0], P[:, 1], P[:, 2]))
    grad = np.stack(gradient(params, (P[:, 0], P[:, 1], P[:, 2])), axis=-1)
    R = np.concatenate([Q - P, np.asarray(lvl)[:, None]], axis=1)
    A = np.concatenate([J - np.eye(3), grad[:, None, :]], axis=1)
    return R, A


def _orbit_residual(params: SurfaceParams, w: str, n: int, X: np.ndarray):
    m = X.shape[0]
    R = np.zeros((m, 3 * n + 1), complex)
    for k in range(n):
        Q = apply_word_batch(params, w, X[:, k, :])
        R[:, 3 * k:3 * k + 3] = Q - X[:, (k + 1) % n, :]
    R[:, -1] = residual(params, (X[:, 0, 0], X[:, 0, 1], X[:, 0, 2]))
    return R


def _orbit_system(params: SurfaceParams, w: str, n: int, X: np.ndarray):
    """Closed-loop residual (f(q_k) - q_{k+1 mod n}, level) over orbit
    candidates X of shape (m, n, 3), with its block Jacobian, batched."""
    m = X.shape[0]
    dim = 3 * n
    R = np.zeros((m, dim + 1), complex)
    A = np.zeros((m, dim + 1, dim), complex)
    for k in range(n):
        Q, Jk = word_jacobians(params, w, X[:, k, :])
        kp = (k + 1) % n
        R[:, 3 * k:3 * k + 3] = Q - X[:, kp, :]
        A[:, 3 * k:3 * k + 3, 3 * k:3 * k + 3] += Jk
        for i in range(3):
            A[:, 3 * k + i, 3 * kp + i] -= 1.0
    p0 = (X[:, 0, 0], X[:, 0, 1], X[:, 0, 2])
    R[:, dim] = residual(params, p0)
    A[:, dim, 0:3] = np.stack(gradient(params, p0), axis=-1)
    return R, A


LOOP_CHUNK = 4096  # loops refined per block, fixed for reproducibility


def _orbit_refine(params: SurfaceParams, w: str, n: int, loops: np.ndarray,
                  iters: int = 80):
    """Multi-shooting damped Gauss-Newton over closed orbit candidates.

    loops has shape (m, n, 3); a constant loop (q_k = p for all k) is a
    valid start. The closed-loop Jacobian conditions like one step of the
    map instead of n of them, so attraction basins do not shrink with the
    period, and every converged loop delivers its whole orbit at once.
    Returns all orbit positions of the accepted loops plus search counters.
    """
    loops = np.asarray(loops, complex).reshape(-1, n, 3)
    n_seeds = loops.shape[0]
    dim = 3 * n
    I = np.eye(dim)
    out = []
    lost = 0
    with np.errstate(over="ignore", invalid="ignore"):
        for lo in range(0, n_seeds, LOOP_CHUNK):
            X = loops[lo:lo + LOOP_CHUNK]
            best = np.full(len(X), np.inf)
            since = np.zeros(len(X), dtype=int)
            for _ in range(iters):
                if len(X) == 0:
                    break
                R, A = _orbit_system(params, w, n, X)
                rn = np.linalg.norm(R, axis=1)
                keep = np.isfinite(rn) & (np.max(np.abs(X), axis=(1, 2)) < 1e4)
                lost += int((~keep).sum())
                X, R, A, rn = X[keep], R[keep], A[keep], rn[keep]
                best, since = best[keep], since[keep]
                if len(X) == 0:
                    break
                conv = rn < 1e-12
                if conv.any():
                    out.append(X[conv].reshape(-1, 3))
                    nc = ~conv
                    X, R, A, rn = X[nc], R[nc], A[nc], rn[nc]
                    best, since = best[nc], since[nc]
                    if len(X) == 0:
                        break
                # rows that stopped making progress sit at a stationary
                # point of the least-squares landscape; cut them loose
                impr = rn < 0.5 * best
                since = np.where(impr, 0, since + 1)
                best = np.minimum(best, rn)
                live = since < 20
                if not live.all():
                    lost += int((~live).sum())
                    X, R, A, rn = X[live], R[live], A[live], rn[live]
                    best, since = best[live], since[live]
                    if len(X) == 0:
                        break
                AH = np.conj(np.swapaxes(A, 1, 2))
                lhs = AH @ A
                rhs = AH @ R[:, :, None]
                damp = 1e-10 * (1.0 + np.abs(np.einsum("mii->m", lhs)))
                lhs = lhs + damp[:, None, None] * I[None]
                try:
                    step = np.linalg.solve(lhs, rhs)[:, :, 0]
                except np.linalg.LinAlgError:
                    break
                sn = np.linalg.norm(step, axis=1)
                step *= np.where(sn > 0.5, 0.5 / np.maximum(sn, 1e-300), 1.0)[:, None]
                Xf = X.reshape(len(X), dim)
                Xn = Xf - step
                Rn = _orbit_residual(params, w, n, Xn.reshape(-1, n, 3))
                rnn = np.linalg.norm(Rn, axis=1)
                rnn = np.where(np.isfinite(rnn), rnn, np.inf)
                worse = rnn > rn * (1.0 + 1e-12)
                for _ in range(10):
                    if not worse.any():
                        break
                    idx = np.nonzero(worse)[0]
                    step[idx] *= 0.5
                    Xn[idx] = Xf[idx] - step[idx]
                    Rw = _orbit_residual(params, w, n, Xn[idx].reshape(-1, n, 3))
                    rw = np.linalg.norm(Rw, axis=1)
                    rnn[idx] = np.where(np.isfinite(rw), rw, np.inf)
                    worse[idx] = rnn[idx] > rn[idx] * (1.0 + 1e-12)
                # a row still worse after all halvings cannot descend along
                # this direction; hold it in place for the stagnation cut
                if worse.any():
                    Xn[worse] = Xf[worse]
                X = Xn.reshape(-1, n, 3)
            if len(X):
                R = _orbit_residual(params, w, n, X)
                res = np.max(np.abs(R), axis=1)
                good = np.isfinite(res) & (res < REFINE_TOL)
                out.append(X[good].reshape(-1, 3))
    roots = np.concatenate(out) if out else np.zeros((0, 3), complex)
    return roots, {"seeds": n_seeds, "diverged": lost,
                   "converged": len(roots) // max(n, 1)}


def _constant_loops(P: np.ndarray, n: int) -> np.ndarray:
    P = np.asarray(P, complex).reshape(-1, 3)
    return np.repeat(P[:, None, :], n, axis=1)


def _forward_loops(params: SurfaceParams, w: str, n: int, P: np.ndarray,
                   bound: float = 20.0) -> np.ndarray:
    """Loops traced along actual forward orbits that stay moderate; near the
    bounded set these start much closer to a closed orbit than a constant
    loop does."""
    P = np.asarray(P, complex).reshape(-1, 3)
    segs = [P]
    Q = P
    ok = np.ones(len(P), bool)
    for _ in range(n - 1):
        Q = apply_word_batch(params, w, Q)
        with np.errstate(invalid="ignore"):
            am = np.abs(Q).max(axis=1)
        ok &= np.isfinite(am) & (am < bound)
        segs.append(Q)
    X = np.stack(segs, axis=1)
    return X[ok]


def _refine(params: SurfaceParams, w: str, n: int, seeds: np.ndarray,
            iters: int = 60):
    """Damped Gauss-Newton with step cap, backtracking, and compaction.

    Converged rows (stacked residual below 1e-12) are extracted each sweep;
    rows that blow up or go non-finite are dropped. Returns the accepted
    roots and counters for the search report.
    """
    P = np.asarray(seeds, complex).reshape(-1, 3)
    n_seeds = P.shape[0]
    I3 = np.eye(3)
    out = []
    lost = 0
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(iters):
            if len(P) == 0:
                break
            R, A = _stacked_system(params, w, n, P)
            rn = np.linalg.norm(R, axis=1)
            keep = np.isfinite(rn) & (np.max(np.abs(P), axis=1) < 1e4)
            lost += int((~keep).sum())
            P, R, A, rn = P[keep], R[keep], A[keep], rn[keep]
            if len(P) == 0:
                break
            conv = rn < 1e-12
            if conv.any():
                out.append(P[conv])
                P, R, A, rn = P[~conv], R[~conv], A[~conv], rn[~conv]
                if len(P) == 0:
                    break
            AH = np.conj(np.swapaxes(A, 1, 2))
            lhs = AH @ A
            rhs = AH @ R[:, :, None]
            damp = 1e-10 * (1.0 + np.abs(np.einsum("mii->m", lhs)))
            lhs = lhs + damp[:, None, None] * I3[None]
            try:
                step = np.linalg.solve(lhs, rhs)[:, :, 0]
            except np.linalg.LinAlgError:
                break
            sn = np.linalg.norm(step, axis=1)
            step *= np.where(sn > 0.5, 0.5 / np.maximum(sn, 1e-300), 1.0)[:, None]
            for _ in range(10):
                Pn = P - step
                Rn, _ = _stacked_system(params, w, n, Pn)
                rnn = np.linalg.norm(Rn, axis=1)
                rnn = np.where(np.isfinite(rnn), rnn, np.inf)
                worse = rnn > rn * (1.0 + 1e-12)
                if not worse.any():
                    break
                step = np.where(worse[:, None], step * 0.5, step)
            P = Pn
        if len(P):
            R, _ = _stacked_system(params, w, n, P)
            res = np.max(np.abs(R), axis=1)
            out.append(P[np.isfinite(res) & (res < REFINE_TOL)])
    roots = np.concatenate(out) if out else np.zeros((0, 3), complex)
    return roots, {"seeds": n_seeds, "diverged": lost, "converged": len(roots)}


def _symmetry_closure(params: SurfaceParams, roots: np.ndarray) -> np.ndarray:
    """Orbits map to orbits under the surface symmetries that commute with
    every involution: complex conjugation when the parameters are real, and
    the double sign changes when A = B = C = 0. Closing the root set under
    them recovers orbits whose own basins were missed by the seeds."""
    if len(roots) == 0:
        return roots
    abcd = (params.A, params.B, params.C, params.D)
    out = [roots]
    if all(complex(v).imag == 0.0 for v in abcd):
        out.append(np.conj(roots))
    if all(complex(v) == 0.0 for v in abcd[:3]):
        base = np.concatenate(out)
        out = [base]
        for s in ((1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)):
            out.append(base * np.array(s)[None, :])
    return np.concatenate(out)


def _pkey(p):
    return tuple(v for c in p for v in (round(complex(c).real, 9),
                                        round(complex(c).imag, 9)))


def _dedup_rows(P: np.ndarray, tol: float = DEDUP_TOL) -> np.ndarray:
    if len(P) == 0:
        return P
    # collapse near-exact copies on a rounded key first; rounding splits
    # borderline pairs at worst, and the greedy pass below merges those
    key = np.round(np.column_stack([P.real, P.imag]), 8)
    _, idx = np.unique(key, axis=0, return_index=True)
    P = P[np.sort(idx)]
    # lexicographic order so the kept representatives do not depend on seed
    # or worker order
    order = sorted(range(len(P)), key=lambda i: _pkey(P[i]))
    kept = np.empty_like(P)
    cnt = 0
    for i in order:
        p = P[i]
        if cnt and np.min(np.max(np.abs(kept[:cnt] - p[None, :]), axis=1)) < tol:
            continue
        kept[cnt] = p
        cnt += 1
    return kept[:cnt].copy()


def _snap_singular(P: np.ndarray, sing: list) -> np.ndarray:
    if len(P) == 0 or not sing:
        return P
    P = P.copy()
    S = np.array(sing, complex).reshape(-1, 3)
    d = np.max(np.abs(P[:, None, :] - S[None, :, :]), axis=2)
    j = np.argmin(d, axis=1)
    hit = d[np.arange(len(P)), j] < SNAP_TOL
    P[hit] = S[j[hit]]
    return P


def default_seeds(params: SurfaceParams, n: int) -> np.ndarray:
    """Deterministic seed family: both sheets of a real (x, y) grid, a
    complex-jittered copy, and rings around each singular point."""
    D = complex(params.D).real
    lim = max(2.5, 1.1 * (1.0 + math.sqrt(max(abs(D), 1.0))))
    m = 72 if n >= 4 else 60
    pt = params.convention == "pt"
    A, B, C = (complex(v).real for v in (params.A, params.B, params.C))

    def sheets(grid_m, grid_lim):
        g = np.linspace(-grid_lim, grid_lim, grid_m)
        X, Y = np.meshgrid(g, g)
        x, y = X.ravel(), Y.ravel()
        if pt:
            disc = (x * y) ** 2 - 4.0 * (x * x + y * y - D)
            zb = x * y
        else:
            disc = (x * y - C) ** 2 - 4.0 * (x * x + y * y - A * x - B * y - D)
            zb = -(x * y - C)
        mk = disc >= 0
        parts = []
        for s in (1.0, -1.0):
            z = (zb[mk] + s * np.sqrt(disc[mk])) / 2.0
            parts.append(np.stack([x[mk], y[mk], z], axis=-1))
        return np.concatenate(parts) if parts else np.zeros((0, 3))

    S = [sheets(m, lim).astype(complex)]
    rng = np.random.default_rng(11)
    base = sheets(40, lim).astype(complex)
    S.append(base + 0.3 * (rng.standard_normal(base.shape)
                           + 1j * rng.standard_normal(base.shape)))
    sing = singular_points(params)
    for s in sing:
        s = np.array(s, complex)
        S.append(s[None, :])
        for r in (0.05, 0.3):
            dirs = rng.standard_normal((8, 3))
            dirs /= np.linalg.norm(dirs, axis=1)[:, None]
            S.append(s[None, :] + r * dirs)
    return np.concatenate(S)


# ---------------------------------------------------------------------------
# multipliers and classification

def tangent_multipliers(params: SurfaceParams, w: str, n: int, p):
    """Eigenvalues of D(f^n) restricted to the surface tangent plane.

    Returns (mu_big, mu_small, singular). At a singular point the tangent
    plane degenerates and the extreme eigenvalues of the full 3x3
    differential are reported instead.
    """
    P = np.array([p], complex)
    J = np.broadcast_to(np.eye(3, dtype=complex), (1, 3, 3)).copy()
    Q = P
    for _ in range(n):
        Q, Js = word_jacobians(params, w, Q)
        J = Js @ J
    J = J[0]
    g = np.array(gradient(params, tuple(P[0])), complex)
    if np.linalg.norm(g) < SINGULAR_GRAD:
        ev = np.linalg.eigvals(J)
        i = np.argsort(np.abs(ev))
        return ev[i[2]], ev[i[0]], True
    q, _ = np.linalg.qr(np.column_stack([g.conj(), np.eye(3)[:, :2]]))
    B = q[:, 1:]  # orthonormal, grad . B = 0
    M2 = B.conj().T @ J @ B
    ev = np.linalg.eigvals(M2)
    i = np.argsort(np.abs(ev))
    return ev[i[1]], ev[i[0]], False


def _kind_of(mu_big: complex, mu_small: complex) -> str:
    if abs(mu_big) > 1.0 + 1e-6 and abs(mu_small) < 1.0 - 1e-6:
        return SADDLE
    if abs(abs(mu_big) - 1.0) <= 1e-6 and abs(abs(mu_small) - 1.0) <= 1e-6:
        if abs(complex(mu_big).imag) > 1e-6:
            return ELLIPTIC_POINT
    return PARABOLIC_LIKE


# ---------------------------------------------------------------------------
# the search

def find_periodic(params: SurfaceParams, w: str, n: int, seeds=None,
                  tol: float = 1e-8) -> PeriodicList:
    """All period-n points reachable from the seed family, one entry per
    orbit, at true minimal period.

    Closed loops from the multi-shooting stage arrive orbit-complete; they
    are snapped onto exact singular points when within range, polished by
    single-shooting refinement, and grouped at true minimal period. Per-seed
    divergence is silent; the returned list carries seed statistics in
    .stats. Completeness is best effort.
    """
    w = check_word(w)
    if classify_word(w).kind != HYPERBOLIC:
        raise ValueError("periodic-point search needs a hyperbolic word")
    if n < 1:
        raise ValueError("period must be >= 1")
    if seeds is None:
        seeds = default_seeds(params, n)
    seeds = np.asarray(seeds, complex).reshape(-1, 3)
    sing = singular_points(params)
    loops = [_constant_loops(seeds, n)]
    if n > 1:
        loops.append(_forward_loops(params, w, n, seeds))
    roots, stats = _orbit_refine(params, w, n, np.concatenate(loops))
    roots = _dedup_rows(_snap_singular(roots, sing))
    roots = _symmetry_closure(params, roots)
    roots = _dedup_rows(_snap_singular(roots, sing))
    if len(roots):
        # single-shooting polish pins each position to full precision
        roots, _ = _refine(params, w, n, roots, iters=15)
        roots = _dedup_rows(_snap_singular(roots, sing))
    # level filter (already enforced by refinement; honors a looser tol too)
    if len(roots):
        lvl = np.abs(residual(params, (roots[:, 0], roots[:, 1], roots[:, 2])))
        roots = roots[lvl < max(tol, REFINE_TOL)]
    result: list[PeriodicPoint] = []
    used = np.empty((len(roots) + 8, 3), complex)
    used_cnt = 0
    for p in roots:
        if used_cnt and np.min(np.max(np.abs(used[:used_cnt] - p[None, :]), axis=1)) < DEDUP_TOL:
            continue
        orb = [p]
        q = p.copy()
        period = n
        for k in range(1, n + 1):
            q = apply_word_batch(params, w, q[None, :])[0]
            if np.max(np.abs(q - p)) < DEDUP_TOL:
                period = k
                break
            orb.append(q)
        orb = orb[:period]
        rep_i = min(range(period), key=lambda i: _pkey(orb[i]))
        rep = orb[rep_i]
        orb = orb[rep_i:] + orb[:rep_i]
        for o in orb:
            if used_cnt == len(used):
                used = np.concatenate([used, np.empty_like(used)])
            used[used_cnt] = o
            used_cnt += 1
        mu_big, mu_small, is_sing = tangent_multipliers(params, w, period, rep)
        is_real = max(float(np.max(np.abs(np.imag(o)))) for o in orb) < 1e-8
        result.append(PeriodicPoint(
            point=tuple(rep),
            period=period,
            multipliers=(complex(mu_big), complex(mu_small)),
            kind=_kind_of(mu_big, mu_small),
            is_real=is_real,
            orbit=tuple(tuple(o) for o in orb),
            singular=is_sing,
        ))
    result.sort(key=lambda r: (r.period, _pkey(r.point)))
    stats["orbits"] = len(result)
    stats["points"] = sum(r.period for r in result)
    return PeriodicList(result, stats)


# ---------------------------------------------------------------------------
# exact census on the four-nodal surface

def _smith2(K):
    """diag(d1, d2) = U K V over the integers; returns (d1, d2, V)."""
    k = [[int(K[0][0]), int(K[0][1])], [int(K[1][0]), int(K[1][1])]]
    v = [[1, 0], [0, 1]]

    def add_row(i, j, q):
        k[i][0] += q * k[j][0]
        k[i][1] += q * k[j][1]

    def add_col(i, j, q):
        for mrow in (k[0], k[1], v[0], v[1]):
            mrow[i] += q * mrow[j]

    while k[0][1] != 0 or k[1][0] != 0:
        nz = [(abs(k[i][j]), i, j) for i in (0, 1) for j in (0, 1) if k[i][j]]
        _, i, j = min(nz)
        if i == 1:
            k[0], k[1] = k[1], k[0]
        if j == 1:
            add_col(0, 1, 1)
            add_col(1, 0, -1)
            add_col(0, 1, 1)  # column swap up to sign via elementary ops
        p = k[0][0]
        if k[1][0] % p == 0 and k[0][1] % p == 0:
            add_row(1, 0, -(k[1][0] // p))
            add_col(1, 0, -(k[0][1] // p))
        elif k[1][0] % p != 0:
            add_row(1, 0, -(k[1][0] // p))
        else:
            add_col(1, 0, -(k[0][1] // p))
    return abs(k[0][0]), abs(k[1][1]), v


@dataclass
class CensusResult:
    """Exact periodic points of a monomial action on the four-nodal surface,
    listed once per surface point. count_plus and count_minus are the torus
    solution counts |det(M^n -+ identity)| before the 2:1 identification."""

    points: list
    count_plus: int
    count_minus: int
    notes: list

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.points, float)


def cayley_census(M: Mat, n: int) -> CensusResult:
    """Period-n points of the matrix action on the four-nodal surface, by
    solving (M^n -+ identity) t = 0 on the rational torus exactly."""
    if n < 1 or n > 12:
        raise ValueError("census supports 1 <= n <= 12")
    if classify(M).kind != HYPERBOLIC:
        raise ValueError("census needs a hyperbolic matrix")
    Mn = ((1, 0), (0, 1))
    for _ in range(n):
        Mn = mat_mul(Mn, M)
    notes: list[str] = []
    counts = {}
    classes: set[tuple] = set()
    reps: list[tuple[Fraction, Fraction]] = []
    for sign, name in ((1, "plus"), (-1, "minus")):
        K = ((Mn[0][0] - sign, Mn[0][1]), (Mn[1][0], Mn[1][1] - sign))
        det = K[0][0] * K[1][1] - K[0][1] * K[1][0]
        counts[name] = abs(det)
        if det == 0:
            notes.append(f"{name} branch singular over the integers; skipped")
            continue
        d1, d2, v = _smith2(K)
        for i in range(d1):
            for j in range(d2):
                t1 = Fraction(v[0][0] * i, d1) + Fraction(v[0][1] * j, d2)
                t2 = Fraction(v[1][0] * i, d1) + Fraction(v[1][1] * j, d2)
                t1 %= 1
                t2 %= 1
                key = (t1, t2)
                mkey = ((-t1) % 1, (-t2) % 1)
                if key in classes or mkey in classes:
                    continue
                classes.add(key)
                reps.append((t1, t2))
    reps.sort()
    pts = []
    for t1, t2 in reps:
        a1 = 2.0 * math.pi * float(t1)
        a2 = 2.0 * math.pi * float(t2)
        pts.append((2.0 * math.cos(a1), 2.0 * math.cos(a2),
                    2.0 * math.cos(a1 + a2)))
    return CensusResult(pts, counts.get("plus", 0), counts.get("minus", 0), notes)


# ---------------------------------------------------------------------------
# empirical measure

@dataclass(frozen=True)
class EmpiricalMeasure:
    support: tuple
    period: int
    weight: float


def empirical_measure(params: SurfaceParams, w: str, n: int) -> EmpiricalMeasure:
    """Uniform measure on every found point of period dividing n (full
    orbits). Errors when the search finds nothing."""
    found = find_periodic(params, w, n)
    pts: list[tuple] = []
    for rec in found:
        pts.extend(rec.orbit)
    if not pts:
        raise RuntimeError("no periodic points found; empirical measure empty")
    pts.sort(key=_pkey)
    return EmpiricalMeasure(tuple(pts), n, 1.0 / len(pts))


# ---------------------------------------------------------------------------
# one-sided probes

def _real_eigvec(J: np.ndarray, which: str) -> np.ndarray:
    ev, V = np.linalg.eig(J)
    i = int(np.argmax(np.abs(ev)) if which == "max" else np.argmin(np.abs(ev)))
    v = V[:, i]
    v = v / v[int(np.argmax(np.abs(v)))]
    v = v.real
    return v / np.linalg.norm(v)


def _escapes(params: SurfaceParams, w: str, q: np.ndarray, steps: int,
             radius: float) -> bool:
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(steps):
            q = apply_word_batch(params, w, q[None, :])[0]
            m = np.max(np.abs(q))
            if not np.isfinite(m) or m > radius:
                return True
    return False


def one_sided_probe(params: SurfaceParams, w: str, P: PeriodicPoint,
                    steps: int = 5, eps: float = 1e-8,
                    radius: float = 100.0) -> dict:
    """Escape asymmetry of the local invariant manifolds of a real saddle.

    Launches seeds at +-eps along the real unstable eigendirection of the
    return map and iterates forward; the u-side verdict is true when exactly
    one side escapes past the radius within the step budget. The s-side runs
    the same probe with the inverse word along the stable eigendirection.
    At a one-sided point the bounded half-manifold meets the escaping strips
    only on a Cantor set, so at any fixed precision one side lingers for
    several extra steps; the defaults were sized so the two regimes are
    separated by more than a full step on either side.

    Words whose surface action reverses orientation (odd letter count) are
    probed through their square. Saddles with an unstable multiplier too
    close to 1 are inconclusive.
    """
    w = check_word(w)
    if abs(complex(params.D).imag) > 0:
        raise ValueError("one-sided probes need real parameters")
    if not P.is_real:
        raise ValueError("one-sided probes need a real periodic point")
    u_word = w * P.period
    if len(u_word) % 2 == 1:
        u_word = u_word + u_word
    mu = abs(P.multipliers[0])
    if mu < 1.0 + 1e-6:
        return {"u_one_sided": None, "s_one_sided": None, "inconclusive": True}
    p = np.array([complex(c).real for c in P.point])
    _, J = word_jacobians(params, u_word, np.array([p], complex))
    J = J[0].real
    vu = _real_eigvec(J, "max")
    vs = _real_eigvec(J, "min")
    s_word = inverse_word(u_word)
    u_plus = _escapes(params, u_word, p + eps * vu, steps, radius)
    u_minus = _escapes(params, u_word, p - eps * vu, steps, radius)
    s_plus = _escapes(params, s_word, p + eps * vs, steps, radius)
    s_minus = _escapes(params, s_word, p - eps * vs, steps, radius)
    return {
        "u_one_sided": u_plus != u_minus,
        "s_one_sided": s_plus != s_minus,
        "inconclusive": False,
    }


# ---------------------------------------------------------------------------
# real confinement

def real_confinement_report(params: SurfaceParams, w: str, n_max: int) -> dict:
    """Tabulates found periodic points per period, the real fraction, and
    the minimal unstable multiplier modulus, and checks the confinement
    bound min |mu_u| >= lambda^n - tol when the real surface is connected."""
    w = check_word(w)
    lam = classify_word(w).lam
    try:
        topo = classify_real_topology(params)
    except ValueError:
        topo = "other"
    connected = topo in (CONNECTED_FOUR_PUNCTURED, CAYLEY_SINGULAR)
    rows = []
    all_real = True
    bound_ok: bool | None = None
    any_found = False
    for n in range(1, n_max + 1):
        found = find_periodic(params, w, n)
        pts = sum(r.period for r in found)
        n_real = sum(r.period for r in found if r.is_real)
        mus = [abs(r.multipliers[0]) ** (n // r.period) for r in found]
        min_mu = min(mus) if mus else None
        rows.append({
            "period": n,
            "orbits": len(found),
            "points": pts,
            "real_points": n_real,
            "fraction_real": (n_real / pts) if pts else None,
            "min_unstable_modulus": min_mu,
            "seed_stats": found.stats,
        })
        if pts:
            any_found = True
            if n_real < pts:
                all_real = False
            if connected and min_mu is not None:
                ok = min_mu >= lam ** n - 0.01
                bound_ok = ok if bound_ok is None else (bound_ok and ok)
    return {
        "word": w,
        "lambda": lam,
        "topology": topo,
        "connected": connected,
        "periods": rows,
        "any_found": any_found,
        "all_real": all_real if any_found else None,
        "unstable_bound_ok": bound_ok,
    }


def periodic_csv_rows(points: list) -> list:
    """(point, period, multipliers, flags) rows for CSV export."""
    rows = []
    for r in points:
        rows.append((
            r.point[0], r.point[1], r.point[2], r.period,
            r.multipliers[0], r.multipliers[1],
            r.kind, r.is_real, r.singular,
            r.one_sided.get("u"), r.one_sided.get("s"),
        ))
    return rows
