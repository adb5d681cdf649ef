"""
Spectral representation of scalar and vector fields on a ball (or annulus).

Radial direction: values at Gauss-Legendre nodes (nodal representation).
Angular direction: spherical-harmonic coefficients, flat index h = l(l+1)+m.
Vector fields carry three channels (R, S, T) on the bases Y r_hat, Psi, Phi
of core.harmonics.
"""

from dataclasses import dataclass
from functools import cached_property
import logging
import math

import numpy as np
from scipy.interpolate import BarycentricInterpolator

from core.errors import ConfigurationError, LayoutError
from core.harmonics import degrees, n_harmonics, tangential_basis, unit_vectors

logger = logging.getLogger("vsf")

R, S, T = 0, 1, 2
CHANNELS = ("R", "S", "T")


@dataclass(frozen=True)
class SphericalGrid:
    l_max: int
    n_r: int
    r_max: float
    n_theta: int
    n_phi: int
    r_inner: float = 0.0

    @property
    def n_h(self) -> int:
        return n_harmonics(self.l_max)

    @property
    def is_annulus(self) -> bool:
        return self.r_inner > 0.0

    @cached_property
    def _radial(self) -> tuple[np.ndarray, np.ndarray]:
        x, w = np.polynomial.legendre.leggauss(self.n_r)
        half = 0.5 * (self.r_max - self.r_inner)
        return self.r_inner + half * (x + 1.0), half * w

    @property
    def r_nodes(self) -> np.ndarray:
        return self._radial[0]

    @property
    def r_weights(self) -> np.ndarray:
        return self._radial[1]

    @cached_property
    def _angular(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        x, w = np.polynomial.legendre.leggauss(self.n_theta)
        theta = np.arccos(x)
        phi = 2.0 * math.pi * np.arange(self.n_phi) / self.n_phi
        tt, pp = np.meshgrid(theta, phi, indexing="ij")
        weights = np.repeat(w, self.n_phi) * (2.0 * math.pi / self.n_phi)
        return tt.ravel(), pp.ravel(), weights

    @property
    def theta(self) -> np.ndarray:
        """Colatitude of every angular sample, theta-major."""
        return self._angular[0]

    @property
    def phi(self) -> np.ndarray:
        return self._angular[1]

    @property
    def angular_weights(self) -> np.ndarray:
        return self._angular[2]

    @cached_property
    def basis(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(Y, Y r_hat, Psi, Phi) sampled on the angular grid."""
        return tangential_basis(self.l_max, self.theta, self.phi)

    @cached_property
    def degree(self) -> np.ndarray:
        return degrees(self.l_max)

    @cached_property
    def lam(self) -> np.ndarray:
        """sqrt(l(l+1)) per flat index."""
        return np.sqrt(self.degree * (self.degree + 1.0))

    @cached_property
    def points(self) -> np.ndarray:
        """Cartesian sample positions, shape (3, n_r, n_theta, n_phi)."""
        r_hat, _, _ = unit_vectors(self.theta, self.phi)
        xyz = r_hat[:, None, :] * self.r_nodes[None, :, None]
        return xyz.reshape(3, self.n_r, self.n_theta, self.n_phi)

    @cached_property
    def diff_matrix(self) -> np.ndarray:
        """Barycentric differentiation matrix d/dr on the radial nodes."""
        r = self.r_nodes
        diff = r[:, None] - r[None, :]
        np.fill_diagonal(diff, 1.0)
        # barycentric weights, rescaled to keep the products finite
        bw = 1.0 / np.prod(diff * (4.0 / (self.r_max - self.r_inner)), axis=1)
        D = (bw[None, :] / bw[:, None]) / diff
        np.fill_diagonal(D, 0.0)
        np.fill_diagonal(D, -D.sum(axis=1))
        return D

    def interpolation_matrix(self, r) -> np.ndarray:
        """Matrix mapping nodal values to values at radii r, shape (len(r), n_r)."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        return BarycentricInterpolator(self.r_nodes, np.eye(self.n_r))(r).reshape(r.size, self.n_r)


def make_grid(
    l_max: int,
    n_r: int,
    r_max: float,
    r_inner: float = 0.0,
    n_theta: int | None = None,
    n_phi: int | None = None,
) -> SphericalGrid:
    if l_max < 0:
        raise ConfigurationError(f"l_max must be >= 0, got {l_max}")
    if n_r < 2:
        raise ConfigurationError(f"n_r must be >= 2, got {n_r}")
    if not r_max > 0:
        raise ConfigurationError(f"r_max must be > 0, got {r_max}")
    if r_inner < 0 or r_inner >= r_max:
        raise ConfigurationError(f"r_inner must lie in [0, r_max), got {r_inner}")
    n_theta = l_max + 2 if n_theta is None else n_theta
    n_phi = 2 * l_max + 4 if n_phi is None else n_phi
    if n_theta < l_max + 1 or n_phi < 2 * l_max + 1:
        raise ConfigurationError(
            f"angular grid {n_theta}x{n_phi} too coarse for l_max={l_max}"
        )
    return SphericalGrid(l_max, n_r, float(r_max), n_theta, n_phi, float(r_inner))


def annulus(grid: SphericalGrid, r_inner: float) -> SphericalGrid:
    """Same resolution on the shell r_inner < r < r_max."""
    return make_grid(grid.l_max, grid.n_r, grid.r_max, r_inner, grid.n_theta, grid.n_phi)


def _same_grid(a: "ScalarField | VectorField", b: "ScalarField | VectorField"):
    if a.grid != b.grid:
        raise LayoutError("fields live on different grids")


@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: SphericalGrid
    coef: np.ndarray

    def __post_init__(self):
        expected = (self.grid.n_r, self.grid.n_h)
        if np.shape(self.coef) != expected:
            raise LayoutError(f"scalar coefficients {np.shape(self.coef)} != {expected}")
        object.__setattr__(self, "coef", np.asarray(self.coef, dtype=complex))

    @classmethod
    def zeros(cls, grid: SphericalGrid) -> "ScalarField":
        return cls(grid, np.zeros((grid.n_r, grid.n_h), dtype=complex))

    @classmethod
    def from_profile(cls, grid: SphericalGrid, profile, l: int, m: int) -> "ScalarField":
        """f = profile(r) Y_lm, profile a callable or an array over the radial nodes."""
        coef = np.zeros((grid.n_r, grid.n_h), dtype=complex)
        values = profile(grid.r_nodes) if callable(profile) else profile
        coef[:, l * (l + 1) + m] = values
        return cls(grid, coef)

    def __add__(self, other):
        _same_grid(self, other)
        return ScalarField(self.grid, self.coef + other.coef)

    def __sub__(self, other):
        _same_grid(self, other)
        return ScalarField(self.grid, self.coef - other.coef)

    def __mul__(self, c):
        return ScalarField(self.grid, self.coef * c)

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(self.grid, -self.coef)


@dataclass(frozen=True, eq=False)
class VectorField:
    grid: SphericalGrid
    coef: np.ndarray

    def __post_init__(self):
        expected = (3, self.grid.n_r, self.grid.n_h)
        if np.shape(self.coef) != expected:
            raise LayoutError(f"vector coefficients {np.shape(self.coef)} != {expected}")
        coef = np.array(self.coef, dtype=complex)
        coef[1:, :, 0] = 0.0
        object.__setattr__(self, "coef", coef)

    @classmethod
    def zeros(cls, grid: SphericalGrid) -> "VectorField":
        return cls(grid, np.zeros((3, grid.n_r, grid.n_h), dtype=complex))

    @classmethod
    def from_channels(cls, grid, R=None, S=None, T=None) -> "VectorField":
        coef = np.zeros((3, grid.n_r, grid.n_h), dtype=complex)
        for c, part in enumerate((R, S, T)):
            if part is not None:
                coef[c] = part
        return cls(grid, coef)

    def channel(self, c: int) -> ScalarField:
        return ScalarField(self.grid, self.coef[c])

    def __add__(self, other):
        _same_grid(self, other)
        return VectorField(self.grid, self.coef + other.coef)

    def __sub__(self, other):
        _same_grid(self, other)
        return VectorField(self.grid, self.coef - other.coef)

    def __mul__(self, c):
        return VectorField(self.grid, self.coef * c)

    __rmul__ = __mul__

    def __neg__(self):
        return VectorField(self.grid, -self.coef)


def _flat_samples(grid: SphericalGrid, samples, lead: tuple) -> np.ndarray:
    shape = lead + (grid.n_r, grid.n_theta, grid.n_phi)
    if np.shape(samples) != shape:
        raise LayoutError(f"samples {np.shape(samples)} do not match grid layout {shape}")
    return np.asarray(samples).reshape(lead + (grid.n_r, grid.n_theta * grid.n_phi))


def analyze_scalar(grid: SphericalGrid, samples) -> ScalarField:
    """Samples shaped (n_r, n_theta, n_phi) -> coefficients."""
    flat = _flat_samples(grid, samples, ())
    Y = grid.basis[0]
    coef = flat @ (np.conj(Y) * grid.angular_weights).T
    return ScalarField(grid, coef)


def synthesize_scalar(f: ScalarField) -> np.ndarray:
    grid = f.grid
    return (f.coef @ grid.basis[0]).reshape(grid.n_r, grid.n_theta, grid.n_phi)


def analyze_vector(grid: SphericalGrid, samples) -> VectorField:
    """Cartesian samples shaped (3, n_r, n_theta, n_phi) -> channel coefficients."""
    flat = _flat_samples(grid, samples, (3,))
    w = grid.angular_weights
    _, YR, Psi, Phi = grid.basis
    coef = np.stack(
        [np.einsum("hia,ira->rh", np.conj(B) * w, flat) for B in (YR, Psi, Phi)]
    )
    return VectorField(grid, coef)


def synthesize_vector(V: VectorField) -> np.ndarray:
    grid = V.grid
    _, YR, Psi, Phi = grid.basis
    out = sum(np.einsum("rh,hia->ira", V.coef[c], B) for c, B in enumerate((YR, Psi, Phi)))
    return out.reshape(3, grid.n_r, grid.n_theta, grid.n_phi)


def integrate_volume(field, grid: SphericalGrid | None = None) -> complex:
    """
    Ball (or shell) integral. Accepts a ScalarField or pointwise samples
    shaped (n_r, n_theta, n_phi) together with their grid.
    """
    if isinstance(field, ScalarField):
        g = field.grid
        return complex(np.sum(g.r_weights * g.r_nodes**2 * field.coef[:, 0]) * math.sqrt(4 * math.pi))
    if grid is None:
        raise LayoutError("pointwise samples need their grid")
    flat = _flat_samples(grid, field, ())
    shells = flat @ grid.angular_weights
    return complex(np.sum(grid.r_weights * grid.r_nodes**2 * shells))


def inner(a, b) -> complex:
    """Volume inner product <a, b> = integral conj(a) b, scalar or vector."""
    _same_grid(a, b)
    g = a.grid
    radial = g.r_weights * g.r_nodes**2
    prod = np.conj(a.coef) * b.coef
    if prod.ndim == 3:
        prod = prod.sum(axis=0)
    return complex(np.sum(radial * prod.sum(axis=-1)))


def norm(field) -> float:
    return math.sqrt(max(inner(field, field).real, 0.0))


def shell_norms(field) -> np.ndarray:
    """Angular L2 norm on every radial shell."""
    c = np.abs(field.coef) ** 2
    if c.ndim == 3:
        c = c.sum(axis=0)
    return np.sqrt(c.sum(axis=-1))


def check_support(field, decay_tol: float, label: str = "field") -> bool:
    """
    Compact-support check: the angular norm extrapolated to r_max must stay
    below decay_tol times the peak shell norm. Logs a warning otherwise.
    """
    g = field.grid
    coef = field.coef if field.coef.ndim == 3 else field.coef[None]
    edge_row = g.interpolation_matrix([g.r_max])[0]
    edge = math.sqrt(sum(float(np.sum(np.abs(edge_row @ c) ** 2)) for c in coef))
    peak = float(shell_norms(field).max())
    if peak > 0 and edge > decay_tol * peak:
        logger.warning(
            f"⚠️ SUPPORT LEAK: {label} at r_max is {edge / peak:.3e} of peak (threshold {decay_tol:.1e})"
        )
        return False
    return True
