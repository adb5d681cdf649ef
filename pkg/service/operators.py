"""
Differential and integral operators on spectral fields.

Channel formulas (Lambda = sqrt(l(l+1)), D = d/dr, all per (l, m)):

    grad f      R = D f                 S = Lambda f / r
    div V       D V_R + 2 V_R / r - Lambda V_S / r
    curl V      R = Lambda T / r        S = D T + T / r
                T = -(D S + S / r) + Lambda R / r
    L f         T = Lambda f            (L = -r x grad)
    N f         R = Lambda^2 f / r      S = Lambda (D f + f / r)
    M f         S = -Lambda r f         (M = -r x L)
    r x V       S = r T                 T = -r S

Cartesian component operators (x_i, d_i, L_i, N_i, M_i) go through pointwise
synthesis and re-analysis, so they raise the angular degree by one; callers
keep their inputs below l_max accordingly. The vector Laplacian and its
inverse act on the vector-harmonic channels Y_{l,l-1,m}, Y_{l,l,m},
Y_{l,l+1,m} instead and stay inside the band.
"""

from functools import lru_cache
from typing import Callable
import logging
import math

import numpy as np

from core.config import config
from core.errors import DomainError, GaugeViolationError, LayoutError
from core.grid import (
    R,
    S,
    T,
    ScalarField,
    SphericalGrid,
    VectorField,
    analyze_scalar,
    analyze_vector,
    check_support,
    norm,
    synthesize_scalar,
    synthesize_vector,
)

logger = logging.getLogger("vsf")


def _r(grid: SphericalGrid) -> np.ndarray:
    return grid.r_nodes[:, None]


def _d(grid: SphericalGrid, coef: np.ndarray) -> np.ndarray:
    return grid.diff_matrix @ coef


# ---------------------------------------------------------------------------
# scalar -> vector
# ---------------------------------------------------------------------------


def gradient(f: ScalarField) -> VectorField:
    g = f.grid
    return VectorField.from_channels(g, R=_d(g, f.coef), S=g.lam * f.coef / _r(g))


def apply_L(f: ScalarField) -> VectorField:
    g = f.grid
    return VectorField.from_channels(g, T=g.lam * f.coef)


def apply_N(f: ScalarField) -> VectorField:
    g = f.grid
    r = _r(g)
    return VectorField.from_channels(
        g,
        R=g.lam**2 * f.coef / r,
        S=g.lam * (_d(g, f.coef) + f.coef / r),
    )


def apply_M(f: ScalarField) -> VectorField:
    g = f.grid
    return VectorField.from_channels(g, S=-g.lam * _r(g) * f.coef)


def position_times(f: ScalarField) -> VectorField:
    """The vector field f(r) r."""
    g = f.grid
    return VectorField.from_channels(g, R=_r(g) * f.coef)


# ---------------------------------------------------------------------------
# vector -> scalar / vector
# ---------------------------------------------------------------------------


def divergence(V: VectorField) -> ScalarField:
    g = V.grid
    r = _r(g)
    vr, vs = V.coef[R], V.coef[S]
    return ScalarField(g, _d(g, vr) + 2.0 * vr / r - g.lam * vs / r)


def curl(V: VectorField) -> VectorField:
    g = V.grid
    r = _r(g)
    vr, vs, vt = V.coef
    return VectorField.from_channels(
        g,
        R=g.lam * vt / r,
        S=_d(g, vt) + vt / r,
        T=-(_d(g, vs) + vs / r) + g.lam * vr / r,
    )


def r_dot(V: VectorField) -> ScalarField:
    return ScalarField(V.grid, _r(V.grid) * V.coef[R])


def r_cross(V: VectorField) -> VectorField:
    g = V.grid
    r = _r(g)
    return VectorField.from_channels(g, S=r * V.coef[T], T=-r * V.coef[S])


def L_dot(V: VectorField) -> ScalarField:
    """L . V = -r . curl V."""
    return ScalarField(V.grid, -V.grid.lam * V.coef[T])


# ---------------------------------------------------------------------------
# scalar -> scalar
# ---------------------------------------------------------------------------


def radial_derivative(f: ScalarField) -> ScalarField:
    return ScalarField(f.grid, _d(f.grid, f.coef))


def euler(field):
    """r d/dr, channelwise on vector fields."""
    g = field.grid
    if isinstance(field, VectorField):
        return VectorField(g, g.r_nodes[None, :, None] * np.einsum("ij,cjh->cih", g.diff_matrix, field.coef))
    return ScalarField(g, _r(g) * _d(g, field.coef))


def multiply_radial(field, values: np.ndarray):
    """Multiply by a radial profile given on the nodes."""
    g = field.grid
    if isinstance(field, VectorField):
        return VectorField(g, field.coef * values[None, :, None])
    return ScalarField(g, field.coef * values[:, None])


def multiply_r2(field):
    return multiply_radial(field, field.grid.r_nodes**2)


def angular_laplacian(f: ScalarField) -> ScalarField:
    """L^2 f, coefficientwise -l(l+1)."""
    return ScalarField(f.grid, -(f.grid.lam**2) * f.coef)


def laplacian(f: ScalarField) -> ScalarField:
    return divergence(gradient(f))


# ---------------------------------------------------------------------------
# Cartesian scalarization
# ---------------------------------------------------------------------------


def cartesian_components(V: VectorField) -> tuple[ScalarField, ScalarField, ScalarField]:
    g = V.grid
    samples = synthesize_vector(V)
    return tuple(analyze_scalar(g, samples[i]) for i in range(3))


def from_cartesian(fx: ScalarField, fy: ScalarField, fz: ScalarField) -> VectorField:
    g = fx.grid
    if fy.grid != g or fz.grid != g:
        raise LayoutError("components live on different grids")
    return analyze_vector(g, np.stack([synthesize_scalar(c) for c in (fx, fy, fz)]))


def _axis(i: int) -> int:
    if i not in (0, 1, 2):
        raise DomainError(f"Cartesian axis must be 0, 1 or 2, got {i}")
    return i


def multiply_coordinate(f: ScalarField, i: int) -> ScalarField:
    g = f.grid
    return analyze_scalar(g, synthesize_scalar(f) * g.points[_axis(i)])


def component(V: VectorField, i: int) -> ScalarField:
    g = V.grid
    return analyze_scalar(g, synthesize_vector(V)[_axis(i)])


def partial(f: ScalarField, i: int) -> ScalarField:
    return component(gradient(f), i)


def L_component(f: ScalarField, i: int) -> ScalarField:
    return component(apply_L(f), i)


def N_component(f: ScalarField, i: int) -> ScalarField:
    return component(apply_N(f), i)


def M_component(f: ScalarField, i: int) -> ScalarField:
    return component(apply_M(f), i)


def _vsh_map(V: VectorField, radial_op: Callable[[int, np.ndarray], np.ndarray]) -> VectorField:
    """
    Apply a radial operator of orbital degree j to each vector-harmonic channel
    f(r) Y_{l,j,m}, j = l-1, l, l+1. The Laplacian acts on these channels as the
    scalar radial Laplacian of degree j, so no degree leaves the band.
    """
    g = V.grid
    out = np.zeros_like(V.coef)
    for l in range(g.l_max + 1):
        cols = slice(l * l, (l + 1) ** 2)
        vr, vs, vt = (V.coef[c][:, cols] for c in (R, S, T))
        s, up, down = math.sqrt(2 * l + 1), math.sqrt(l + 1), math.sqrt(l)
        a_minus = (down * vr + up * vs) / s
        a_plus = radial_op(l + 1, (up * vr - down * vs) / s)
        if l >= 1:
            a_minus = radial_op(l - 1, a_minus)
            out[T][:, cols] = radial_op(l, vt)
        out[R][:, cols] = (down * a_minus + up * a_plus) / s
        out[S][:, cols] = (up * a_minus - down * a_plus) / s
    return VectorField(g, out)


def _radial_laplacian(grid: SphericalGrid, j: int, coef: np.ndarray) -> np.ndarray:
    r = _r(grid)
    d = _d(grid, coef)
    return _d(grid, d) + 2.0 * d / r - j * (j + 1) * coef / r**2


def vector_laplacian(V: VectorField) -> VectorField:
    return _vsh_map(V, lambda j, c: _radial_laplacian(V.grid, j, c))


def vector_inverse_laplacian(V: VectorField) -> VectorField:
    """Free-space inverse Laplacian, channel by channel; V must be supported inside r_max."""
    g = V.grid
    check_support(V, config.tolerance.DECAY_TOL, "vector source")
    return _vsh_map(V, lambda j, c: _green_matrix(g, j) @ c)


# ---------------------------------------------------------------------------
# inverses
# ---------------------------------------------------------------------------


@lru_cache(maxsize=256)
def _green_matrix(grid: SphericalGrid, l: int) -> np.ndarray:
    """
    Nodal matrix of the radial Green function of degree l:

        g(r) = -1/(2l+1) [ r^-(l+1) int_a^r s^(l+2) f ds + r^l int_r^R s^(1-l) f ds ]

    with a = r_inner (0 on a ball). Both integrals use Gauss quadrature on
    the sub-interval and barycentric interpolation of f.
    """
    n_q = grid.n_r + l + 8
    x, w = np.polynomial.legendre.leggauss(n_q)
    a, b = grid.r_inner, grid.r_max
    G = np.zeros((grid.n_r, grid.n_r))
    for i, r in enumerate(grid.r_nodes):
        s_in = a + 0.5 * (r - a) * (x + 1.0)
        w_in = 0.5 * (r - a) * w * (s_in / r) ** (l + 1) * s_in
        s_out = r + 0.5 * (b - r) * (x + 1.0)
        w_out = 0.5 * (b - r) * w * (r / s_out) ** l * s_out
        G[i] = w_in @ grid.interpolation_matrix(s_in) + w_out @ grid.interpolation_matrix(s_out)
    return -G / (2 * l + 1)


def inverse_laplacian(f: ScalarField, label: str = "source") -> ScalarField:
    """Free-space inverse Laplacian of a field supported inside r_max."""
    g = f.grid
    check_support(f, config.tolerance.DECAY_TOL, label)
    out = np.zeros_like(f.coef)
    for l in range(g.l_max + 1):
        cols = slice(l * l, (l + 1) ** 2)
        out[:, cols] = _green_matrix(g, l) @ f.coef[:, cols]
    return ScalarField(g, out)


def monopole_norm(f: ScalarField) -> float:
    g = f.grid
    return math.sqrt(float(np.sum(g.r_weights * g.r_nodes**2 * np.abs(f.coef[:, 0]) ** 2)))


def inverse_L2(f: ScalarField, tol: float | None = None, scale: float = 0.0) -> ScalarField:
    """
    Inverse of the angular Laplacian on fields with zero spherical means.

    Raises GaugeViolationError when the l = 0 content exceeds
    tol * max(||f||, scale).
    """
    tol = config.tolerance.TOL if tol is None else tol
    l0 = monopole_norm(f)
    reference = max(norm(f), scale)
    if l0 > tol * reference:
        logger.error(f"❌ GAUGE VIOLATION: l=0 content {l0:.3e} above {tol:.1e} x {reference:.3e}")
        raise GaugeViolationError("inverse_L2 needs fields with zero spherical means", norm=l0)
    lam2 = f.grid.lam**2
    inv = np.divide(-1.0, lam2, out=np.zeros_like(lam2), where=lam2 > 0)
    return ScalarField(f.grid, f.coef * inv)
