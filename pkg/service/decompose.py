"""
Helmholtz split, harmonic gauge fields and Debye scalarization.

    V = grad(lap^-1 div V) - curl(lap^-1 curl V)        (compact V)
    V = grad(phi) + L psi + N chi

With L = -r x grad one has L.(L psi) = L^2 psi and r.(N chi) = -L^2 chi, so

    phi = lap^-1 div V                (l = 0 shifted so that phi(r_max) = 0)
    psi = L^-2 (L . V)  = -L^-2 (r . curl V)
    chi = L^-2 (r d/dr phi - r . V)

The vector inverse Laplacian acts per vector-harmonic channel and keeps the
full band. The L . V route goes through Cartesian components; its degree
l_max + 1 parts cancel in the sum, so it is exact on the band as well.
"""

from dataclasses import dataclass
import logging
from typing import Literal

import numpy as np

from core.config import config
from core.errors import DomainError, LayoutError
from core.grid import (
    R,
    ScalarField,
    SphericalGrid,
    VectorField,
    inner,
    make_grid,
    norm,
)
from service.operators import (
    L_component,
    angular_laplacian,
    apply_L,
    apply_N,
    cartesian_components,
    curl,
    divergence,
    euler,
    gradient,
    inverse_L2,
    inverse_laplacian,
    r_dot,
    vector_inverse_laplacian,
)

logger = logging.getLogger("vsf")


@dataclass(frozen=True)
class HelmholtzParts:
    longitudinal: VectorField
    transverse: VectorField
    potential: ScalarField
    residual: float
    orthogonality: float


@dataclass(frozen=True)
class DebyePotentials:
    phi: ScalarField
    psi: ScalarField
    chi: ScalarField
    psi_route_residual: float = 0.0


@dataclass(frozen=True)
class GaugeFieldSpec:
    l: int
    m: int
    branch: Literal["regular", "singular"] = "regular"
    coefficient: complex = 1.0

    def __post_init__(self):
        if self.l < 1 or abs(self.m) > self.l:
            raise DomainError(f"gauge field needs l >= 1 and |m| <= l, got l={self.l}, m={self.m}")
        if self.branch not in ("regular", "singular"):
            raise DomainError(f"unknown branch {self.branch!r}")

    @property
    def kappa(self) -> int:
        return self.l if self.branch == "regular" else -self.l - 1


def _relative(a, b) -> float:
    scale = max(norm(a), norm(b))
    return norm(a - b) / scale if scale > 0 else 0.0


# ---------------------------------------------------------------------------
# Helmholtz
# ---------------------------------------------------------------------------


def exterior_tail(f: ScalarField) -> float:
    """
    integral over r > r_max of |grad phi|^2, where phi = lap^-1 f continues
    outside as sum_lm a_lm r^-(l+1) Y_lm.
    """
    g = f.grid
    total = 0.0
    for l in range(g.l_max + 1):
        cols = slice(l * l, (l + 1) ** 2)
        a = -np.sum((g.r_weights * g.r_nodes ** (l + 2))[:, None] * f.coef[:, cols], axis=0) / (2 * l + 1)
        total += (l + 1) * float(np.sum(np.abs(a) ** 2)) * g.r_max ** (-2 * l - 1)
    return total


def helmholtz(V: VectorField) -> HelmholtzParts:
    div_v = divergence(V)
    phi = inverse_laplacian(div_v, label="div V")
    longitudinal = gradient(phi)
    transverse = -curl(vector_inverse_laplacian(curl(V)))
    v_norm = norm(V)
    residual = norm(V - longitudinal - transverse) / v_norm if v_norm > 0 else 0.0
    # the transverse part equals -grad(phi) outside the ball
    cross = inner(longitudinal, transverse).real - exterior_tail(div_v)
    orthogonality = abs(cross) / v_norm**2 if v_norm > 0 else 0.0
    logger.info(f"🔧 HELMHOLTZ: residual={residual:.3e}, orthogonality={orthogonality:.3e}")
    return HelmholtzParts(longitudinal, transverse, phi, residual, orthogonality)


# ---------------------------------------------------------------------------
# gauge fields
# ---------------------------------------------------------------------------


def curl_r_cross_grad(f: ScalarField) -> VectorField:
    """curl((r x grad) f) = -N f."""
    return -apply_N(f)


def gauge_field(spec: GaugeFieldSpec, grid: SphericalGrid, route: str = "curl") -> VectorField:
    """
    V_N = curl((r x grad) C r^kappa Y_lm), kappa = l or -l-1; route "grad"
    builds the same field as -(kappa+1) C grad(r^kappa Y_lm).
    """
    if spec.branch == "singular" and not grid.is_annulus:
        raise DomainError("singular gauge branch needs an annular grid (r_inner > 0)")
    kappa = spec.kappa
    f = ScalarField.from_profile(grid, lambda r: spec.coefficient * r**kappa, spec.l, spec.m)
    if route == "curl":
        return curl_r_cross_grad(f)
    if route == "grad":
        return gradient(f) * (-(kappa + 1))
    raise DomainError(f"unknown construction route {route!r}")


def footnote_relation(l: int, m: int, kappa: int, grid: SphericalGrid) -> float:
    """
    Relative residual of curl((r x grad) r^k Y) = -(k+1) grad(r^k Y)
    + (k-l)(k+l+1) r^(k-2) Y r.
    """
    f = ScalarField.from_profile(grid, lambda r: r**kappa, l, m)
    lhs = curl_r_cross_grad(f)
    radial = VectorField.from_channels(
        grid, R=(kappa - l) * (kappa + l + 1) * f.coef * grid.r_nodes[:, None] ** -1
    )
    rhs = gradient(f) * (-(kappa + 1)) + radial
    return _relative(lhs, rhs)


# ---------------------------------------------------------------------------
# Debye
# ---------------------------------------------------------------------------


def _boundary_shift(phi: ScalarField) -> ScalarField:
    g = phi.grid
    edge = g.interpolation_matrix([g.r_max])[0] @ phi.coef[:, 0]
    coef = phi.coef.copy()
    coef[:, 0] -= edge
    return ScalarField(g, coef)


def L_dot_cartesian(V: VectorField) -> ScalarField:
    """sum_i L_i V_i with L_i acting on the Cartesian components."""
    parts = cartesian_components(V)
    return sum((L_component(c, i) for i, c in enumerate(parts)), ScalarField.zeros(V.grid))


def debye_decompose(V: VectorField, tol: float | None = None) -> DebyePotentials:
    tol = config.tolerance.TOL if tol is None else tol
    g = V.grid
    phi = _boundary_shift(inverse_laplacian(divergence(V), label="div V"))

    v_norm = norm(V)
    l_dot_v = L_dot_cartesian(V)
    r_curl = r_dot(curl(V))
    psi = inverse_L2(l_dot_v, tol, scale=max(norm(r_curl), v_norm))
    chi_source = euler(phi) - r_dot(V)
    chi = inverse_L2(chi_source, tol, scale=max(norm(r_dot(V)), g.r_max * v_norm))
    psi_alt = inverse_L2(-r_curl, tol, scale=max(norm(r_curl), v_norm))
    route_scale = max(norm(r_curl), v_norm)
    route_residual = norm(psi - psi_alt) / route_scale if route_scale > 0 else 0.0
    if route_residual > tol:
        logger.warning(f"⚠️ PSI ROUTES DISAGREE: relative residual {route_residual:.3e} above {tol:.1e}")
    return DebyePotentials(phi, psi, chi, route_residual)


def debye_synthesize(p: DebyePotentials) -> VectorField:
    if not (p.phi.grid == p.psi.grid == p.chi.grid):
        raise LayoutError("Debye potentials live on different grids")
    return gradient(p.phi) + apply_L(p.psi) + apply_N(p.chi)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def gauge_transport_check(l: int, m: int, grid: SphericalGrid) -> dict:
    """
    (1/l) curl(r x grad) r^l Y_lm against -((l+1)/l) grad r^l Y_lm, directly
    and through L^-2 L^2. The literal chain curl(r x grad) L^-2 (r.grad) r^l Y
    is reported alongside as a ratio to grad r^l Y.
    """
    if l < 1:
        raise DomainError("transport check needs l >= 1")
    f = ScalarField.from_profile(grid, lambda r: r**l, l, m)
    target = gradient(f) * (-(l + 1) / l)
    direct = curl_r_cross_grad(f) * (1.0 / l)
    via_inverse = curl_r_cross_grad(inverse_L2(angular_laplacian(f))) * (1.0 / l)
    literal = curl_r_cross_grad(inverse_L2(euler(f)))
    grad_f = gradient(f)
    g2 = inner(grad_f, grad_f).real
    return {
        "l": l,
        "m": m,
        "residual": max(_relative(direct, target), _relative(via_inverse, target)),
        "ratio": inner(grad_f, direct).real / g2,
        "literal_chain_ratio": inner(grad_f, literal).real / g2,
    }


def restrict(V, r0: float, r1: float):
    """Resample a field onto the shell r0 < r < r1 of its grid."""
    g = V.grid
    if not (g.r_inner <= r0 < r1 <= g.r_max):
        raise DomainError(f"annulus [{r0}, {r1}] not inside grid [{g.r_inner}, {g.r_max}]")
    sub = make_grid(g.l_max, g.n_r, r1, r0, g.n_theta, g.n_phi)
    P = g.interpolation_matrix(sub.r_nodes)
    if isinstance(V, VectorField):
        return VectorField(sub, np.einsum("ij,cjh->cih", P, V.coef))
    return ScalarField(sub, P @ V.coef)


def uniqueness_check(V: VectorField, r0: float, r1: float, tol: float) -> dict:
    """
    On the shell r0 < r < r1: if V_R, div V and curl V all vanish (below
    tol), V itself must vanish. Returns the measured norms; "ok" is false only
    when the premise holds and ||V|| exceeds 10 tol.
    """
    W = restrict(V, r0, r1)
    radial = VectorField.from_channels(W.grid, R=W.coef[R])
    norms = {
        "radial": norm(radial),
        "div": norm(divergence(W)),
        "curl": norm(curl(W)),
        "field": norm(W),
    }
    premise = max(norms["radial"], norms["div"], norms["curl"]) < tol
    ok = (not premise) or norms["field"] < 10.0 * tol
    return {"ok": ok, "premise": premise, "norms": norms}


def least_constrained_field(grid: SphericalGrid, l: int, m: int, level: float) -> tuple[VectorField, float]:
    """
    The (l, m) field on an annulus whose radial channel, divergence and curl
    are smallest relative to its own norm, scaled so that those three together
    have norm `level`. Built from the smallest singular pair of the discrete
    map V -> (V_R, div V, curl V) in quadrature-weighted norms; returns the
    field and that singular value. A singular value bounded away from zero is
    the discrete form of uniqueness: the three constraints pin V to zero.
    """
    if not grid.is_annulus:
        raise DomainError("least constrained field needs an annular grid (r_inner > 0)")
    if l < 1 or abs(m) > l or l > grid.l_max:
        raise DomainError(f"(l={l}, m={m}) outside 1 <= l <= {grid.l_max}")
    n = grid.n_r
    lam = np.sqrt(l * (l + 1.0))
    D = grid.diff_matrix
    eye = np.eye(n)
    rinv = np.diag(1.0 / grid.r_nodes)
    zero = np.zeros((n, n))
    # columns (R, S, T); rows V_R, div, curl_R, curl_S, curl_T
    C = np.block([
        [eye, zero, zero],
        [D + 2.0 * rinv, -lam * rinv, zero],
        [zero, zero, lam * rinv],
        [zero, zero, D + rinv],
        [lam * rinv, -(D + rinv), zero],
    ])
    w = np.sqrt(grid.r_weights * grid.r_nodes**2)
    A = np.tile(w, 5)[:, None] * C / np.tile(w, 3)[None, :]
    _, s, vh = np.linalg.svd(A)
    x = vh[-1] / np.tile(w, 3) * (level / s[-1])
    coef = np.zeros((3, n, grid.n_h), dtype=complex)
    coef[:, :, l * (l + 1) + m] = x.reshape(3, n)
    return VectorField(grid, coef), float(s[-1])
