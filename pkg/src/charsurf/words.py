"""Word algebra for the group generated by the three trace involutions.

The group is a free product of three copies of Z/2Z with generators written
x, y, z. Words are plain strings over that alphabet, composition in written
order: "xyz" means the x-involution applied last. Each word carries a 2x2
integer matrix (its action on the homology of the punctured torus), and the
matrix drives the classification into elliptic, parabolic and hyperbolic
classes, the algebraic-stability test, and the indeterminacy vertices of the
induced birational map at infinity.

Matrices are nested tuples of Python ints so that all products, determinants
and congruence tests are exact at any word length.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

LETTERS = "xyz"

ELLIPTIC = "elliptic"
PARABOLIC = "parabolic"
HYPERBOLIC = "hyperbolic"

Mat = tuple[tuple[int, int], tuple[int, int]]

IDENTITY: Mat = ((1, 0), (0, 1))

# generator matrices for the letters x, y, z
R_X: Mat = ((-1, -2), (0, 1))
R_Y: Mat = ((-1, 0), (0, 1))
R_Z: Mat = ((1, 0), (-2, -1))

GENERATOR_MATRIX = {"x": R_X, "y": R_Y, "z": R_Z}


def check_word(w: str) -> str:
    """Normalize to lowercase and reject letters outside {x, y, z}."""
    w = w.lower()
    bad = set(w) - set(LETTERS)
    if bad:
        raise ValueError(f"word letters must be in 'xyz', got {sorted(bad)!r}")
    return w


def mat_mul(a: Mat, b: Mat) -> Mat:
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def mat_det(m: Mat) -> int:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def mat_neg(m: Mat) -> Mat:
    return ((-m[0][0], -m[0][1]), (-m[1][0], -m[1][1]))


def mat_inv(m: Mat) -> Mat:
    """Exact inverse of an integer matrix with det +-1."""
    d = mat_det(m)
    if d not in (1, -1):
        raise ValueError(f"det must be +-1, got {d}")
    return ((m[1][1] * d, -m[0][1] * d), (-m[1][0] * d, m[0][0] * d))


def mat_trace(m: Mat) -> int:
    return m[0][0] + m[1][1]


def mat_abs_sum(m: Mat) -> int:
    return abs(m[0][0]) + abs(m[0][1]) + abs(m[1][0]) + abs(m[1][1])


def is_congruence_member(m: Mat) -> bool:
    """Entries congruent to the identity mod 2 and det +-1."""
    if mat_det(m) not in (1, -1):
        return False
    return (
        m[0][0] % 2 == 1
        and m[1][1] % 2 == 1
        and m[0][1] % 2 == 0
        and m[1][0] % 2 == 0
    )


def reduce(w: str) -> str:
    """Free-product normal form: cancel equal adjacent letters, repeatedly.

    Idempotent; the empty word is the identity.
    """
    w = check_word(w)
    out: list[str] = []
    for ch in w:
        if out and out[-1] == ch:
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def cyclic_reduce(w: str) -> tuple[str, str]:
    """Return (core, conjugator) with w = conjugator * core * conjugator^-1.

    The core is cyclically reduced: length <= 1 or first letter != last
    letter. The conjugator inverse is its reverse (all letters are
    involutions).
    """
    core = reduce(w)
    conj: list[str] = []
    while len(core) >= 2 and core[0] == core[-1]:
        conj.append(core[0])
        core = core[1:-1]
        # stripping the ends of a reduced word can expose a new cancellation
        core = reduce(core)
    return core, "".join(conj)


def inverse_word(w: str) -> str:
    """Inverse in the free product: reverse the string (letters are involutions)."""
    return check_word(w)[::-1]


def word_to_matrix(w: str) -> Mat:
    """Homomorphic matrix realization; letters map to the frozen generators."""
    w = check_word(w)
    m = IDENTITY
    for ch in w:
        m = mat_mul(m, GENERATOR_MATRIX[ch])
    return m


def _sign_canon(m: Mat) -> Mat:
    for row in m:
        for v in row:
            if v != 0:
                return m if v > 0 else mat_neg(m)
    return m


def matrix_to_word(m: Mat) -> str:
    """Invert word_to_matrix up to sign: word_to_matrix(result) = +-m.

    Reflection-group descent on the absolute entry sum, stripping generators
    from the left. The sum is not strictly monotone along geodesics (short
    plateaus occur, e.g. the two-letter parabolics), so this is a best-first
    search that admits equal-sum steps, with matrices tracked up to sign and
    ties broken in the order x, y, z.
    """
    m = ((int(m[0][0]), int(m[0][1])), (int(m[1][0]), int(m[1][1])))
    if not is_congruence_member(m):
        raise ValueError("matrix is not congruent to the identity mod 2 with det +-1")
    ident = _sign_canon(IDENTITY)
    start = _sign_canon(m)
    seen = {start}
    heap = [(mat_abs_sum(start), 0, "", start)]
    w = None
    while heap:
        s, k, word, cur = heapq.heappop(heap)
        if cur == ident:
            w = word
            break
        for ch in LETTERS:
            cand = _sign_canon(mat_mul(GENERATOR_MATRIX[ch], cur))
            if mat_abs_sum(cand) <= s and cand not in seen:
                seen.add(cand)
                heapq.heappush(heap, (mat_abs_sum(cand), k + 1, word + ch, cand))
    if w is None:
        raise ValueError("descent stuck: matrix is not realized by a word")
    chk = word_to_matrix(w)
    if chk != m and chk != mat_neg(m):
        raise AssertionError("descent produced an inconsistent word")
    return w


@dataclass(frozen=True)
class IsometryClass:
    kind: str  # ELLIPTIC | PARABOLIC | HYPERBOLIC
    lam: float  # spectral radius, 1.0 unless hyperbolic
    slope: float | None = None  # contracting eigenline slope of the positive form


def classify(m: Mat) -> IsometryClass:
    """Classify a det +-1 integer matrix by its projective action.

    Hyperbolic iff spectral radius > 1, elliptic iff m^2 = +-identity,
    parabolic otherwise. lambda solves t^2 - |tr| t + det = 0 exactly.
    For hyperbolic input the slope of the contracting eigenline of the
    positive-entry conjugate is attached (always negative).
    """
    d = mat_det(m)
    if d not in (1, -1):
        raise ValueError(f"det must be +-1, got {d}")
    tr = abs(mat_trace(m))
    disc = tr * tr - 4 * d
    hyper = disc > 0 and (tr > 2 if d == 1 else tr > 0)
    if hyper:
        lam = (tr + math.sqrt(disc)) / 2.0
        n, _ = positive_form(m)
        return IsometryClass(HYPERBOLIC, lam, _contracting_slope(n))
    m2 = mat_mul(m, m)
    if m2 == IDENTITY or m2 == mat_neg(IDENTITY):
        return IsometryClass(ELLIPTIC, 1.0)
    return IsometryClass(PARABOLIC, 1.0)


def classify_word(w: str) -> IsometryClass:
    """Classification of a word via its cyclically reduced core."""
    core, _ = cyclic_reduce(w)
    return classify(word_to_matrix(core))


def _contracting_slope(n: Mat) -> float:
    # n has positive entries, so trace > 0 and the contracting eigenvalue is
    # (tr - sqrt(tr^2 - 4 det)) / 2; its eigenvector (n12, mu - n11) has
    # components of opposite sign, giving a negative slope.
    tr = mat_trace(n)
    disc = tr * tr - 4 * mat_det(n)
    mu = (tr - math.sqrt(disc)) / 2.0
    return (mu - n[0][0]) / n[0][1]


# conjugator moves for the positive-form search
_CONJ_MOVES: tuple[Mat, ...] = (
    ((1, 1), (0, 1)),
    ((1, -1), (0, 1)),
    ((1, 0), (1, 1)),
    ((1, 0), (-1, 1)),
    ((0, 1), (1, 0)),
)


def positive_form(m: Mat, max_depth: int = 20) -> tuple[Mat, Mat]:
    """Conjugate a hyperbolic matrix to one with four positive entries.

    Returns (n, p) with n = +-p m p^-1 entrywise positive. Breadth-first
    search over short products of elementary moves; raises if the depth
    bound is exceeded (desk-scale inputs need only a few moves).
    """
    d = mat_det(m)
    if d not in (1, -1):
        raise ValueError(f"det must be +-1, got {d}")
    tr = abs(mat_trace(m))
    if not ((d == 1 and tr > 2) or (d == -1 and tr > 0)):
        raise ValueError("positive_form requires a hyperbolic matrix")

    def positive(c: Mat) -> bool:
        return all(c[i][j] > 0 for i in (0, 1) for j in (0, 1))

    frontier: list[tuple[Mat, Mat]] = [(m, IDENTITY)]
    seen = {m}
    for _ in range(max_depth + 1):
        for cur, p in frontier:
            if positive(cur):
                return cur, p
            if positive(mat_neg(cur)):
                return mat_neg(cur), p
        nxt: list[tuple[Mat, Mat]] = []
        for cur, p in frontier:
            for g in _CONJ_MOVES:
                cand = mat_mul(mat_mul(g, cur), mat_inv(g))
                if cand not in seen:
                    seen.add(cand)
                    nxt.append((cand, mat_mul(g, p)))
        frontier = nxt
        if not frontier:
            break
    raise RuntimeError(f"no positive conjugate found within depth {max_depth}")


V_X = "v_x"
V_Y = "v_y"
V_Z = "v_z"


@dataclass(frozen=True)
class StabilityData:
    stable: bool
    ind_f: str  # vertex blown down by f, one of v_x, v_y, v_z
    ind_finv: str  # vertex blown down by the inverse


def _vertex_of_boundary_point(t: float) -> str:
    # boundary markers sit at -1 (x), 0 (y), infinity (z); the three
    # complementary intervals select the vertices
    if t > 0:
        return V_X
    if t < -1:
        return V_Y
    return V_Z


def boundary_fixed_points(m: Mat) -> tuple[float, float]:
    """(attracting, repelling) fixed points of the projective action on the
    boundary line. Requires a hyperbolic matrix; the fixed points are
    quadratic irrationals, never at the markers -1, 0, infinity."""
    a, b = m[0]
    c, dd = m[1]
    if c == 0:
        raise ValueError("hyperbolic congruence matrices have m21 != 0")
    det = mat_det(m)
    disc = (a + dd) ** 2 - 4 * det
    root = math.sqrt(disc)
    t1 = ((a - dd) + root) / (2 * c)
    t2 = ((a - dd) - root) / (2 * c)

    def deriv_mod(t: float) -> float:
        return abs(det) / (c * t + dd) ** 2

    if deriv_mod(t1) < 1.0:
        return t1, t2
    return t2, t1


def stability_data(w: str) -> StabilityData:
    """Algebraic stability of the birational extension plus the two
    indeterminacy vertices.

    stable iff the word is cyclically reduced and uses all three letters.
    The vertex indeterminate for the inverse map is read off from the
    boundary interval containing the attracting fixed point; the forward
    vertex from the repelling one.
    """
    w = reduce(w)
    core, _ = cyclic_reduce(w)
    if classify(word_to_matrix(core)).kind != HYPERBOLIC:
        raise ValueError("stability data is defined for hyperbolic words")
    # reduced + equal to its own cyclic core <=> cyclically reduced
    stable = w == core and set(w) == set(LETTERS)
    omega, alpha = boundary_fixed_points(word_to_matrix(w))
    return StabilityData(
        stable=stable,
        ind_f=_vertex_of_boundary_point(alpha),
        ind_finv=_vertex_of_boundary_point(omega),
    )
