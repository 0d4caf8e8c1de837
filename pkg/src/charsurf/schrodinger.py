"""Substitution Schrodinger operators through trace-map dynamics.

A two-letter substitution with unimodular, primitive abelianization carries a
discrete Schrodinger operator whose transfer-matrix traces evolve under a
polynomial surface automorphism: the energy curve

    s(E) = (E - kappa, E, E(E - kappa) - 2)

lies on the level x^2 + y^2 + z^2 - xyz = 4 + kappa^2, and one application
of the trace map advances every coordinate from the trace over a word to the
trace over its substituted word. Energies whose curve point has a bounded
forward orbit estimate the spectrum; a truncated tridiagonal operator solved
by Sturm bisection serves as an independent oracle.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import TraceMap, nielsen_action
from .words import Mat, mat_inv, mat_mul

AB = ("a", "b")


# ---------------------------------------------------------------------------
# substitutions

@dataclass(frozen=True)
class Substitution:
    rule_a: str
    rule_b: str
    abelianization: Mat
    lambda_plus: float

    @property
    def rules(self) -> dict:
        return {"a": self.rule_a, "b": self.rule_b}


def build_substitution(rule_a: str, rule_b: str) -> Substitution:
    """Validated substitution: unimodular abelianization and primitivity
    (some power up to 4 of the occurrence matrix entrywise positive)."""
    for rule in (rule_a, rule_b):
        if not rule or any(ch not in AB for ch in rule):
            raise ValueError("rules must be nonempty words over {a, b}")
    m: Mat = ((rule_a.count("a"), rule_b.count("a")),
              (rule_a.count("b"), rule_b.count("b")))
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if det not in (1, -1):
        raise ValueError("abelianization determinant must be +-1 "
                         f"(got {det}); the substitution cannot be invertible")
    power = m
    for _ in range(3):
        if all(v > 0 for row in power for v in row):
            break
        power = mat_mul(power, m)
    if not all(v > 0 for row in power for v in row):
        raise ValueError("substitution is not primitive "
                         "(no power <= 4 of the occurrence matrix is positive)")
    tr = m[0][0] + m[1][1]
    lam = (tr + math.sqrt(tr * tr - 4 * det)) / 2.0
    return Substitution(rule_a, rule_b, m, lam)


NAMED_SUBSTITUTIONS = {
    "fib": ("b", "ba"),
    "fib-alt": ("ab", "a"),
}


def substitute(sub: Substitution, word: str) -> str:
    rules = sub.rules
    return "".join(rules[ch] for ch in word)


def fixed_word_prefix(sub: Substitution, n: int) -> str:
    """First n letters of the infinite fixed word, grown from a letter whose
    rule image begins with itself (which makes the result prefix-stable)."""
    if n < 1:
        raise ValueError("prefix length must be >= 1")
    seed = next((ch for ch in AB if sub.rules[ch].startswith(ch)), None)
    if seed is None:
        raise ValueError("no rule starts with its own letter; "
                         "the substitution has no fixed word to grow")
    w = seed
    while len(w) < n:
        w = substitute(sub, w)
    return w[:n]


# ---------------------------------------------------------------------------
# transfer matrices and the energy curve

def transfer_matrix(kappa: complex, E: complex, word: str) -> np.ndarray:
    """Product of letter transfer matrices, rightmost letter first."""
    m = np.eye(2, dtype=complex)
    for ch in word:
        if ch == "a":
            step = np.array([[E - kappa, -1.0], [1.0, 0.0]], complex)
        elif ch == "b":
            step = np.array([[E, -1.0], [1.0, 0.0]], complex)
        else:
            raise ValueError(f"letter {ch!r} not in {{a, b}}")
        m = step @ m
    return m


def schrodinger_curve(kappa, E):
    """(E-kappa, E, E(E-kappa)-2): the transfer-trace triple of (a, b, ab),
    on the level 4 + kappa^2 identically. Components may be arrays."""
    return (E - kappa, E, E * (E - kappa) - 2.0)


def trace_map(sub: Substitution) -> TraceMap:
    """Surface automorphism advancing transfer traces by one substitution
    round: trace_map(s(E)) = traces of (iota(a), iota(b), iota(ab))."""
    return nielsen_action(mat_inv(sub.abelianization))


# ---------------------------------------------------------------------------
# spectrum estimation

@dataclass(frozen=True)
class SchrodingerConfig:
    kappa: float = 0.0
    window: tuple | None = None
    grid: int = 2001
    budget: int = 1000
    escape_radius: float = 10.0

    def __post_init__(self):
        if self.grid < 2:
            raise ValueError("grid must be >= 2")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")


def depth_for_budget(sub: Substitution, budget: int) -> int:
    """Trace-map iterations whose probed words stay within the budget.

    One trace-map step advances traces over iota^n words; their lengths are
    the column sums of the abelianization powers. The depth is the largest n
    with every image length <= budget (at least 1)."""
    m = sub.abelianization
    depth = 0
    cur: Mat = ((1, 0), (0, 1))
    while depth < 10000:
        nxt = mat_mul(cur, m)
        if max(nxt[0][0] + nxt[1][0], nxt[0][1] + nxt[1][1]) > budget:
            break
        cur = nxt
        depth += 1
    return max(depth, 1)


@dataclass
class SpectrumEstimate:
    energies: np.ndarray
    bounded_flags: np.ndarray
    escape_steps: np.ndarray
    intervals: list
    gaps: list
    dimension: float | None
    dimension_residual: float | None
    config: dict


def _resolve_window(config: SchrodingerConfig) -> tuple:
    if config.window is not None:
        lo, hi = config.window
        if not hi > lo:
            raise ValueError("energy window must have positive length")
        return float(lo), float(hi)
    k = float(config.kappa)
    return (min(-2.5, k - 2.5), max(2.5, k + 2.5))


def _escape_steps_chunk(fmap: TraceMap, kappa: float, E: np.ndarray,
                        depth: int, radius: float) -> np.ndarray:
    steps = np.full(E.shape, -1, np.int32)
    x, y, z = schrodinger_curve(kappa, E.astype(complex))
    idx = np.arange(len(E))
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(depth + 1):
            mag = np.maximum(np.maximum(np.abs(x), np.abs(y)), np.abs(z))
            esc = (mag > radius) | ~np.isfinite(mag)
            if esc.any():
                steps[idx[esc]] = k
                keep = ~esc
                x, y, z, idx = x[keep], y[keep], z[keep], idx[keep]
            if idx.size == 0 or k == depth:
                break
            x, y, z = fmap((x, y, z))
    return steps


def spectrum_estimate(sub: Substitution, config: SchrodingerConfig,
                      workers: int | None = None) -> SpectrumEstimate:
    """Grid spectrum estimate: an energy is flagged bounded when the forward
    trace-map orbit of its curve point stays below the escape radius for the
    whole depth the budget affords. Bounded runs merge into intervals; a gap
    is reported between bounded nodes more than two grid steps apart.
    Deterministic for a fixed config regardless of worker count."""
    lo, hi = _resolve_window(config)
    energies = np.linspace(lo, hi, config.grid)
    depth = depth_for_budget(sub, config.budget)
    fmap = trace_map(sub)
    radius = float(config.escape_radius)
    kappa = float(config.kappa)
    chunk = 2048
    blocks = [(a, min(a + chunk, config.grid)) for a in range(0, config.grid, chunk)]

    def do_block(a, b):
        return _escape_steps_chunk(fmap, kappa, energies[a:b], depth, radius)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: do_block(*ab), blocks))
    else:
        parts = [do_block(a, b) for a, b in blocks]
    steps = np.concatenate(parts)
    bounded = steps < 0
    b_idx = np.flatnonzero(bounded)
    intervals = []
    gaps = []
    if b_idx.size:
        run_start = b_idx[0]
        prev = b_idx[0]
        for i in b_idx[1:]:
            if i != prev + 1:
                intervals.append((float(energies[run_start]), float(energies[prev])))
                if i - prev > 2:
                    gaps.append((float(energies[prev]), float(energies[i])))
                run_start = i
            prev = i
        intervals.append((float(energies[run_start]), float(energies[prev])))
    dim_val = dim_res = None
    if b_idx.size:
        try:
            fit = box_dimension((energies, bounded), window=(lo, hi))
            dim_val, dim_res = fit.value, fit.residual
        except ValueError:
            pass
    cfg = {
        "kappa": kappa,
        "window": [lo, hi],
        "grid": int(config.grid),
        "budget": int(config.budget),
        "escape_radius": radius,
        "depth": int(depth),
        "substitution": {"a": sub.rule_a, "b": sub.rule_b},
    }
    return SpectrumEstimate(energies, bounded, steps, intervals, gaps,
                            dim_val, dim_res, cfg)


# ---------------------------------------------------------------------------
# tridiagonal oracle

def tridiagonal_oracle(sub: Substitution, kappa: float, N: int,
                       boundary: str = "dirichlet") -> np.ndarray:
    """All eigenvalues of the N-site Dirichlet truncation of the substitution
    operator (off-diagonals 1, diagonal kappa on the letter-a sites of the
    fixed word), by Sturm-sequence bisection to 1e-10. Independent of the
    dynamics machinery."""
    if boundary.lower() != "dirichlet":
        raise ValueError("only Dirichlet truncation is supported")
    if N < 2:
        raise ValueError("N must be >= 2")
    prefix = fixed_word_prefix(sub, N)
    d = np.array([kappa if ch == "a" else 0.0 for ch in prefix])

    def count_below(x: np.ndarray) -> np.ndarray:
        # Sturm sequence: number of eigenvalues strictly below each x
        q = d[0] - x
        q = np.where(np.abs(q) < 1e-300, -1e-300, q)
        cnt = (q < 0).astype(np.int64)
        for i in range(1, N):
            q = d[i] - x - 1.0 / q
            q = np.where(np.abs(q) < 1e-300, -1e-300, q)
            cnt += q < 0
        return cnt

    lo = np.full(N, d.min() - 2.0 - 1e-9)
    hi = np.full(N, d.max() + 2.0 + 1e-9)
    ks = np.arange(N)
    for _ in range(80):
        if np.max(hi - lo) < 1e-10:
            break
        mid = 0.5 * (lo + hi)
        above = count_below(mid) > ks
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Lyapunov exponent

def lyapunov(sub: Substitution, kappa: float, E: complex, n: int = 1000) -> float:
    """(1/n) log norm of the transfer product over the length-n prefix of the
    fixed word, renormalizing every 32 factors."""
    if n < 1:
        raise ValueError("n must be >= 1")
    prefix = fixed_word_prefix(sub, n)
    ma = np.array([[E - kappa, -1.0], [1.0, 0.0]], complex)
    mb = np.array([[E, -1.0], [1.0, 0.0]], complex)
    P = np.eye(2, dtype=complex)
    acc = 0.0
    for i, ch in enumerate(prefix):
        P = (ma if ch == "a" else mb) @ P
        if (i + 1) % 32 == 0:
            nrm = np.linalg.norm(P)
            acc += math.log(nrm)
            P /= nrm
    return (acc + math.log(np.linalg.norm(P))) / n


# ---------------------------------------------------------------------------
# box dimension

@dataclass(frozen=True)
class DimensionEstimate:
    value: float
    residual: float
    scales: tuple
    counts: tuple


def box_dimension(data, window: tuple | None = None,
                  scales=None) -> DimensionEstimate:
    """Least-squares box-counting slope over dyadic scales.

    data: a SpectrumEstimate, an (energies, flags) pair, a list of (lo, hi)
    intervals, or a 1d array of points. Default scales run from window/4
    down to window/4096 (11 dyadic steps spanning 3 decades); at least 4
    scales over 3 decades are required, and an empty set is an error.
    """
    intervals: list[tuple[float, float]] = []
    points: np.ndarray | None = None
    if isinstance(data, SpectrumEstimate):
        points = data.energies[data.bounded_flags]
        if window is None:
            window = (float(data.energies[0]), float(data.energies[-1]))
    elif (isinstance(data, tuple) and len(data) == 2
          and np.asarray(data[0]).ndim == 1
          and np.asarray(data[1]).dtype == bool):
        grid, flags = np.asarray(data[0], float), np.asarray(data[1])
        points = grid[flags]
        if window is None and grid.size:
            window = (float(grid[0]), float(grid[-1]))
    else:
        arr = np.asarray(data, float)
        if arr.ndim == 1:
            points = arr
        else:
            intervals = [(float(a), float(b)) for a, b in arr]
    if points is not None and points.size == 0 and not intervals:
        raise ValueError("box dimension of an empty set")
    if points is None and not intervals:
        raise ValueError("box dimension of an empty set")
    if window is None:
        vals = (points if points is not None
                else np.array([v for ab in intervals for v in ab]))
        window = (float(vals.min()), float(vals.max()))
    lo, hi = window
    width = hi - lo
    if not width > 0:
        raise ValueError("degenerate window")
    if scales is None:
        scales = [width / 2.0 ** k for k in range(2, 13)]
    scales = sorted(float(s) for s in scales)
    if len(scales) < 4:
        raise ValueError("need at least 4 scales")
    if math.log10(scales[-1] / scales[0]) < 3.0 - 1e-9:
        raise ValueError("scales must span at least 3 decades")
    counts = []
    for delta in scales:
        nbox = max(int(math.ceil(width / delta)), 1)
        occupied: set[int] = set()
        if points is not None:
            idx = np.floor((points - lo) / delta).astype(np.int64)
            idx = np.clip(idx, 0, nbox - 1)
            occupied.update(np.unique(idx).tolist())
        for a, b in intervals:
            a, b = max(a, lo), min(b, hi)
            if b < a:
                continue
            i0 = min(max(int((a - lo) / delta), 0), nbox - 1)
            i1 = min(max(int((b - lo) / delta), 0), nbox - 1)
            occupied.update(range(i0, i1 + 1))
        counts.append(len(occupied))
    if any(c == 0 for c in counts):
        raise ValueError("box dimension of an empty set")
    xs = np.log10(1.0 / np.array(scales))
    ys = np.log10(np.array(counts, float))
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = float(np.sqrt(np.mean((ys - (slope * xs + intercept)) ** 2)))
    return DimensionEstimate(float(slope), resid, tuple(scales), tuple(counts))
