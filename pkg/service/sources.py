"""
Built-in analytic current densities.

gaussian_dipole     J = A z_hat exp(-|r - c|^2 / sigma^2)
magnetic_loop       azimuthal ring current, Gaussian cross-section of width sigma
toroidal_solenoid   poloidal current wound on a torus (major radius R, tube a),
                    J = curl(G (-y, x, 0)) with the shell profile
                    G = A exp(-(d^2 - a^2)^2 / (4 a^2 sigma^2)), d the distance
                    to the ring rho = R, z = 0; divergence-free by construction
from_file           a vsf-1 vector field on disk
"""

import logging
import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field

from core.config import config
from core.errors import ConfigurationError, FieldFormatError
from core.field_io import read_field
from core.grid import ScalarField, SphericalGrid, VectorField, analyze_vector
from service.operators import curl, divergence

logger = logging.getLogger("vsf")

# samples farther than this many widths from the source are below 1e-12 of peak
SUPPORT_WIDTHS = 5.3
# fraction of the radial extent next to r_max watched for leaked current
OUTER_BAND = 0.05
# default torus and a grid (l_max, n_r, r_max) resolving its shell profile to roundoff
TORUS_DEFAULTS = {"sigma": 0.5, "radius": 3.0, "tube": 1.0}
TORUS_GRID = (8, 128, 6.0)


class SourceSpec(BaseModel):
    kind: Literal["gaussian_dipole", "magnetic_loop", "toroidal_solenoid", "from_file"]
    amplitude: float = 1.0
    sigma: float = Field(1.0, gt=0)
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    radius: float = Field(2.0, gt=0, description="loop radius / torus major radius R")
    tube: float = Field(1.0, gt=0, description="torus tube radius a")
    path: str | None = None


def _support_check(extent: float, grid: SphericalGrid, kind: str):
    if extent > grid.r_max:
        raise ConfigurationError(
            f"{kind} extends to r={extent:.3g}, beyond r_max={grid.r_max:.3g}"
        )


def _resolution_check(width: float, grid: SphericalGrid, radius: float, kind: str):
    spacing = max(grid.r_max / grid.n_r, math.pi * radius / (2 * (grid.l_max + 1)))
    if 2.0 * width < spacing:
        logger.warning(
            f"⚠️ UNDER-RESOLVED SOURCE: {kind} feature width {width:.3g} below half the grid spacing "
            f"{spacing:.3g}; requires finer grid"
        )


def outer_shell_fraction(J: VectorField, band: float = OUTER_BAND) -> float:
    """sqrt of the share of ||J||^2 carried by the shells with r > (1 - band) r_max."""
    g = J.grid
    energy = g.r_weights * g.r_nodes**2 * np.sum(np.abs(J.coef) ** 2, axis=(0, 2))
    total = float(energy.sum())
    if total == 0.0:
        return 0.0
    outer = g.r_nodes > g.r_inner + (1.0 - band) * (g.r_max - g.r_inner)
    return math.sqrt(float(energy[outer].sum()) / total)


def _edge_check(J: VectorField, kind: str) -> bool:
    """Warn when a built source leaks current into the shells next to r_max."""
    fraction = outer_shell_fraction(J)
    if fraction > config.tolerance.EDGE_TOL:
        logger.warning(
            f"⚠️ UNDER-RESOLVED SOURCE: {kind} carries {fraction:.3e} of its norm in the outer shells "
            f"(threshold {config.tolerance.EDGE_TOL:.1e}); requires more radial nodes"
        )
        return False
    return True


def _azimuthal(grid: SphericalGrid, profile: np.ndarray) -> VectorField:
    """Analyze profile(x, y, z) * (-y, x, 0)."""
    x, y, _ = grid.points
    samples = np.stack([-y * profile, x * profile, np.zeros_like(profile)])
    return analyze_vector(grid, samples)


def gaussian_dipole(spec: SourceSpec, grid: SphericalGrid) -> VectorField:
    c = np.asarray(spec.center)
    _support_check(float(np.linalg.norm(c)) + SUPPORT_WIDTHS * spec.sigma, grid, spec.kind)
    x, y, z = grid.points
    d2 = (x - c[0]) ** 2 + (y - c[1]) ** 2 + (z - c[2]) ** 2
    g = spec.amplitude * np.exp(-d2 / spec.sigma**2)
    return analyze_vector(grid, np.stack([np.zeros_like(g), np.zeros_like(g), g]))


def magnetic_loop(spec: SourceSpec, grid: SphericalGrid) -> VectorField:
    _support_check(spec.radius + SUPPORT_WIDTHS * spec.sigma, grid, spec.kind)
    _resolution_check(spec.sigma, grid, spec.radius, spec.kind)
    x, y, z = grid.points
    rho = np.hypot(x, y)
    ring = spec.amplitude * np.exp(-((rho - spec.radius) ** 2 + z**2) / spec.sigma**2)
    return _azimuthal(grid, np.divide(ring, rho, out=np.zeros_like(rho), where=rho > 0))


def torus_extent(spec: SourceSpec) -> float:
    """Radius beyond which the shell profile is below exp(-SUPPORT_WIDTHS^2)."""
    a = spec.tube
    return spec.radius + math.sqrt(a**2 + 2.0 * a * spec.sigma * SUPPORT_WIDTHS)


def toroidal_solenoid(spec: SourceSpec, grid: SphericalGrid) -> VectorField:
    R, a, sigma = spec.radius, spec.tube, spec.sigma
    if a >= R:
        raise ConfigurationError(f"torus tube a={a} must be smaller than R={R}")
    _support_check(torus_extent(spec), grid, spec.kind)
    _resolution_check(min(a, sigma), grid, R, spec.kind)
    x, y, z = grid.points
    # d^2 is not smooth on the z axis; the profile there is exp(-((R^2 - a^2) / (2 a sigma))^2)
    d2 = (np.hypot(x, y) - R) ** 2 + z**2
    G = spec.amplitude * np.exp(-((d2 - a**2) ** 2) / (4.0 * a**2 * sigma**2))
    return curl(_azimuthal(grid, G))


def make_source(spec: SourceSpec, grid: SphericalGrid, with_charge_rate: bool = False):
    """
    Build the current density of spec on grid. With with_charge_rate the
    continuity-equation charge rate -div J is returned alongside.
    """
    if spec.kind == "gaussian_dipole":
        J = gaussian_dipole(spec, grid)
    elif spec.kind == "magnetic_loop":
        J = magnetic_loop(spec, grid)
    elif spec.kind == "toroidal_solenoid":
        J = toroidal_solenoid(spec, grid)
    else:
        if not spec.path:
            raise ConfigurationError("from_file source needs a path")
        J = read_field(spec.path)
        if not isinstance(J, VectorField):
            raise FieldFormatError(f"{spec.path} holds a scalar field, expected a current", key="kind")
    if spec.kind != "from_file":
        _edge_check(J, spec.kind)
    logger.info(f"🔧 SOURCE BUILT: {spec.kind}")
    if with_charge_rate:
        rho_dot: ScalarField = -divergence(J)
        return J, rho_dot
    return J
