"""Parameter handling for the cubic surface family and its special models.

The general convention ("fam") is the quartic-compatible form

    x^2 + y^2 + z^2 + xyz = A x + B y + C z + D,

optionally derived from four boundary traces (a,b,c,d). The punctured-torus
sign convention ("pt"), x^2 + y^2 + z^2 = xyz + D, is only used with
A = B = C = 0 and is reached by negating all three coordinates. The D = 4
member of the pt family is the four-nodal surface uniformized by the map
pi(u,v) = (u + 1/u, v + 1/v, uv + 1/(uv)) from the doubled torus; 2x2
integer matrices act on (u,v) by monomial substitution and descend to the
surface.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .words import IDENTITY, Mat, check_word, mat_mul

FAM = "fam"
PT = "pt"

# real-topology labels for the pt one-parameter family and the trace test
FOUR_DISKS = "four_disks"
FOUR_DISKS_AND_POINT = "four_disks_and_point"
FOUR_DISKS_AND_SPHERE = "four_disks_and_sphere"
CAYLEY_SINGULAR = "cayley_singular"
CONNECTED_FOUR_PUNCTURED = "connected_four_punctured"
OTHER = "other"


@dataclass(frozen=True)
class SurfaceParams:
    A: complex = 0.0
    B: complex = 0.0
    C: complex = 0.0
    D: complex = 0.0
    convention: str = FAM
    boundary_traces: tuple | None = field(default=None)

    def __post_init__(self):
        if self.convention not in (FAM, PT):
            raise ValueError(f"convention must be '{FAM}' or '{PT}'")
        if self.convention == PT and (self.A != 0 or self.B != 0 or self.C != 0):
            raise ValueError("pt convention requires A = B = C = 0")


def pt_params(D: complex) -> SurfaceParams:
    return SurfaceParams(0.0, 0.0, 0.0, D, convention=PT)


def params_from_traces(a: complex, b: complex, c: complex, d: complex) -> SurfaceParams:
    """Surface parameters carried by four boundary traces."""
    A = a * b + c * d
    B = a * d + b * c
    C = a * c + b * d
    D = 4 - a * a - b * b - c * c - d * d - a * b * c * d
    return SurfaceParams(A, B, C, D, convention=FAM, boundary_traces=(a, b, c, d))


def residual(params: SurfaceParams, p) -> complex:
    """Defining-polynomial residual at p = (x, y, z); zero iff on the surface.

    Works elementwise when the components are arrays.
    """
    x, y, z = p
    if params.convention == PT:
        return x * x + y * y + z * z - x * y * z - params.D
    return (
        x * x + y * y + z * z + x * y * z
        - params.A * x - params.B * y - params.C * z - params.D
    )


def gradient(params: SurfaceParams, p):
    """Gradient of the defining polynomial at p, same convention as residual."""
    x, y, z = p
    if params.convention == PT:
        return (2 * x - y * z, 2 * y - x * z, 2 * z - x * y)
    return (
        2 * x + y * z - params.A,
        2 * y + x * z - params.B,
        2 * z + x * y - params.C,
    )


def on_surface(params: SurfaceParams, p, tol: float = 1e-9) -> bool:
    """Scale-aware membership: |residual| < tol * (1 + |p|^2)."""
    x, y, z = p
    scale = 1.0 + abs(x) ** 2 + abs(y) ** 2 + abs(z) ** 2
    return bool(abs(residual(params, p)) < tol * scale)


def convert_convention(params: SurfaceParams, p):
    """Toggle fam <-> pt (A = B = C = 0 only); the point negates. Involutive."""
    if params.A != 0 or params.B != 0 or params.C != 0:
        raise ValueError("convention conversion requires A = B = C = 0")
    other = PT if params.convention == FAM else FAM
    q = SurfaceParams(0.0, 0.0, 0.0, params.D, convention=other,
                      boundary_traces=params.boundary_traces)
    x, y, z = p
    return q, (-x, -y, -z)


def singular_points(params: SurfaceParams, search_box: float = 3.5,
                    tol: float = 1e-9) -> list[tuple]:
    """Points where the gradient and the residual vanish simultaneously.

    Multi-start Gauss-Newton on the stacked 4-equation system over a real
    seed grid in [-search_box, search_box]^3, deduplicated. The two
    reference surfaces (fam all-zero and pt D=4) return their known exact
    answers. An empty list means the surface is smooth inside the box.
    """
    if params.convention == FAM and (params.A, params.B, params.C, params.D) == (0, 0, 0, 0):
        return [(0.0, 0.0, 0.0)]
    if params.convention == PT and params.D == 4 and params.A == 0:
        return [(2.0, 2.0, 2.0), (2.0, -2.0, -2.0), (-2.0, 2.0, -2.0), (-2.0, -2.0, 2.0)]

    g = np.linspace(-search_box, search_box, 7)
    X, Y, Z = np.meshgrid(g, g, g)
    P = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=-1).astype(complex)
    for _ in range(60):
        x, y, z = P[:, 0], P[:, 1], P[:, 2]
        gx, gy, gz = gradient(params, (x, y, z))
        r = residual(params, (x, y, z))
        F = np.stack([gx, gy, gz, r], axis=-1)
        s = -1.0 if params.convention == PT else 1.0
        # rows: d(grad)/dp and d(residual)/dp
        J = np.empty(P.shape[:1] + (4, 3), complex)
        two = np.full_like(x, 2.0)
        J[:, 0, 0], J[:, 0, 1], J[:, 0, 2] = two, s * z, s * y
        J[:, 1, 0], J[:, 1, 1], J[:, 1, 2] = s * z, two, s * x
        J[:, 2, 0], J[:, 2, 1], J[:, 2, 2] = s * y, s * x, two
        J[:, 3, 0], J[:, 3, 1], J[:, 3, 2] = gx, gy, gz
        JH = np.conj(np.swapaxes(J, 1, 2))
        lhs = JH @ J + 1e-12 * np.eye(3)
        rhs = JH @ F[:, :, None]
        step = np.linalg.solve(lhs, rhs)[:, :, 0]
        P = P - step
        if np.max(np.abs(step)) < 1e-14:
            break
    out: list[tuple] = []
    for p in P:
        x, y, z = p
        gx, gy, gz = gradient(params, (x, y, z))
        ok = (abs(residual(params, (x, y, z))) < tol
              and max(abs(gx), abs(gy), abs(gz)) < 1e-7
              and max(abs(x), abs(y), abs(z)) < search_box + 1.0)
        if ok and not any(max(abs(p[0] - q[0]), abs(p[1] - q[1]), abs(p[2] - q[2])) < 1e-6
                          for q in out):
            out.append((complex(x), complex(y), complex(z)))
    return out


def classify_real_topology(params: SurfaceParams) -> str:
    """Real-topology label.

    With boundary traces: connected iff no trace lies in the open interval
    (-2, 2) and the product of the traces is negative; otherwise "other".
    Without traces the parameters must have A = B = C = 0 and the label
    follows the one-parameter family table in D.
    """
    if params.boundary_traces is not None:
        tr = [complex(t) for t in params.boundary_traces]
        if any(abs(t.imag) > 1e-12 for t in tr):
            raise ValueError("real-topology classification needs real traces")
        vals = [t.real for t in tr]
        prod = vals[0] * vals[1] * vals[2] * vals[3]
        if all(abs(v) >= 2 for v in vals) and prod < 0:
            return CONNECTED_FOUR_PUNCTURED
        return OTHER
    if params.A != 0 or params.B != 0 or params.C != 0:
        raise ValueError("need A = B = C = 0 or boundary traces")
    D = complex(params.D)
    if abs(D.imag) > 1e-12:
        raise ValueError("real-topology classification needs a real D")
    d = D.real
    if d < 0:
        return FOUR_DISKS
    if d == 0:
        return FOUR_DISKS_AND_POINT
    if d < 4:
        return FOUR_DISKS_AND_SPHERE
    if d == 4:
        return CAYLEY_SINGULAR
    return CONNECTED_FOUR_PUNCTURED


def cayley_project(u, v):
    """Doubled-torus covering of the pt D=4 surface; invariant under
    (u,v) -> (1/u, 1/v)."""
    return (u + 1.0 / u, v + 1.0 / v, u * v + 1.0 / (u * v))


def monomial_apply(m: Mat, c):
    """Monomial action (u,v) -> (u^m11 v^m12, u^m21 v^m22); a left action."""
    u, v = c
    (a, b), (cc, d) = m
    return (u ** a * v ** b, u ** cc * v ** d)


# Monomial matrices realizing the three involution letters through the
# covering; found once by integer search and frozen, each exact up to the
# (u,v) -> (1/u,1/v) identification that cayley_project quotients out.
N_X: Mat = ((1, 2), (0, -1))
N_Y: Mat = ((-1, 0), (2, 1))
N_Z: Mat = ((1, 0), (0, -1))

LETTER_MONOMIAL = {"x": N_X, "y": N_Y, "z": N_Z}


def word_monomial(w: str) -> Mat:
    """Monomial matrix whose action covers the word's surface map.

    The word composes in written order (last letter acts first on points),
    which on the covering multiplies the letter matrices left to right.
    """
    m = IDENTITY
    for ch in check_word(w):
        m = mat_mul(m, LETTER_MONOMIAL[ch])
    return m
