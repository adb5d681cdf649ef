"""
Scalar and vector spherical harmonics, Legendre polynomials and spherical
Bessel functions.

Conventions used by every other module:

* complex orthonormal harmonics with the Condon-Shortley phase,
  Y_{l,-m} = (-1)^m conj(Y_lm);
* flat index h = l(l+1) + m;
* tangential basis Psi_lm = r grad_S Y_lm / sqrt(l(l+1)) and
  Phi_lm = L Y_lm / sqrt(l(l+1)) with L = -r x grad, so Phi = -r_hat x Psi;
* vector harmonics Y_{l,l-1,m} = (sqrt(l) Y r_hat + sqrt(l+1) Psi)/sqrt(2l+1),
  Y_{l,l,m} = Phi_lm, Y_{l,l+1,m} = (sqrt(l+1) Y r_hat - sqrt(l) Psi)/sqrt(2l+1).
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import factorial2

from core.errors import DomainError


def flat_index(l: int, m: int) -> int:
    return l * (l + 1) + m


def degree_order(h: int) -> tuple[int, int]:
    l = math.isqrt(h)
    return l, h - l * (l + 1)


def n_harmonics(l_max: int) -> int:
    return (l_max + 1) ** 2


def degrees(l_max: int) -> np.ndarray:
    """Degree l of every flat index up to l_max."""
    return np.array([degree_order(h)[0] for h in range(n_harmonics(l_max))])


def double_factorial(n: int) -> int:
    return int(factorial2(n, exact=True)) if n > 0 else 1


@dataclass(frozen=True)
class HarmonicIndex:
    l: int
    m: int

    def __post_init__(self):
        if self.l < 0 or abs(self.m) > self.l:
            raise DomainError(f"invalid harmonic index l={self.l}, m={self.m}")

    @property
    def h(self) -> int:
        return flat_index(self.l, self.m)


@dataclass(frozen=True)
class VectorHarmonicIndex:
    l: int
    lp: int
    m: int

    def __post_init__(self):
        if self.l < 1 or abs(self.m) > self.l or self.lp not in (self.l - 1, self.l, self.l + 1):
            raise DomainError(f"invalid vector harmonic index l={self.l}, lp={self.lp}, m={self.m}")


def legendre_tables(l_max: int, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Normalized associated Legendre functions for m >= 0.

    Returns (P, Q), both shaped (l_max+1, l_max+1, n_points) and indexed [l, m]:
    Y_lm = P[l, m] e^{i m phi} and Q[l, m] = P[l, m] / sin(theta) for m >= 1
    (finite at the poles).
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    x, s = np.cos(theta), np.sin(theta)
    P = np.zeros((l_max + 1, l_max + 1, theta.size))
    Q = np.zeros_like(P)
    pmm = np.full(theta.size, 1.0 / math.sqrt(4.0 * math.pi))
    qmm = np.zeros(theta.size)
    for m in range(l_max + 1):
        if m == 1:
            qmm = -math.sqrt(1.5) * pmm
            pmm = qmm * s
        elif m > 1:
            factor = -math.sqrt((2 * m + 1) / (2 * m))
            qmm = factor * s * qmm
            pmm = factor * s * pmm
        P[m, m], Q[m, m] = pmm, qmm
        if m + 1 <= l_max:
            P[m + 1, m] = math.sqrt(2 * m + 3) * x * pmm
            Q[m + 1, m] = math.sqrt(2 * m + 3) * x * qmm
        for l in range(m + 2, l_max + 1):
            a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
            b = math.sqrt((4 * (l - 1) ** 2 - 1) / ((l - 1) ** 2 - m * m))
            P[l, m] = a * (x * P[l - 1, m] - P[l - 2, m] / b)
            Q[l, m] = a * (x * Q[l - 1, m] - Q[l - 2, m] / b)
    return P, Q


def ylm_table(l_max: int, theta, phi) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Harmonics and their angular derivatives at paired points.

    Returns (Y, dY_dtheta, dY_dphi_over_sin), each shaped (n_harmonics, n_points).
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.broadcast_to(np.atleast_1d(np.asarray(phi, dtype=float)), theta.shape)
    P, Q = legendre_tables(l_max + 1, theta)
    H = n_harmonics(l_max + 1)
    Y = np.zeros((H, theta.size), dtype=complex)
    B = np.zeros_like(Y)
    for l in range(l_max + 2):
        for m in range(l + 1):
            e = np.exp(1j * m * phi)
            y = P[l, m] * e
            b = 1j * m * Q[l, m] * e
            Y[flat_index(l, m)], B[flat_index(l, m)] = y, b
            if m:
                sign = (-1) ** m
                Y[flat_index(l, -m)] = sign * np.conj(y)
                B[flat_index(l, -m)] = sign * np.conj(b)
    Hout = n_harmonics(l_max)
    dT = np.zeros((Hout, theta.size), dtype=complex)
    for l in range(l_max + 1):
        for m in range(-l, l + 1):
            acc = np.zeros(theta.size, dtype=complex)
            if m + 1 <= l:
                acc += math.sqrt((l - m) * (l + m + 1)) * np.exp(-1j * phi) * Y[flat_index(l, m + 1)]
            if m - 1 >= -l:
                acc -= math.sqrt((l + m) * (l - m + 1)) * np.exp(1j * phi) * Y[flat_index(l, m - 1)]
            dT[flat_index(l, m)] = 0.5 * acc
    return Y[:Hout], dT, B[:Hout]


def unit_vectors(theta, phi) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """r_hat, theta_hat, phi_hat as (3, n_points) Cartesian arrays."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.broadcast_to(np.atleast_1d(np.asarray(phi, dtype=float)), theta.shape)
    st, ct, sp, cp = np.sin(theta), np.cos(theta), np.sin(phi), np.cos(phi)
    r_hat = np.stack([st * cp, st * sp, ct])
    t_hat = np.stack([ct * cp, ct * sp, -st])
    p_hat = np.stack([-sp, cp, np.zeros_like(phi)])
    return r_hat, t_hat, p_hat


def tangential_basis(l_max: int, theta, phi) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Cartesian components of the three channel bases at paired points.

    Returns (Y, YR, Psi, Phi): Y is (H, n); YR = Y r_hat, Psi and Phi are (H, 3, n).
    Psi and Phi vanish identically for l = 0.
    """
    Y, dT, B = ylm_table(l_max, theta, phi)
    r_hat, t_hat, p_hat = unit_vectors(theta, phi)
    lam = np.sqrt(degrees(l_max) * (degrees(l_max) + 1.0))
    inv = np.divide(1.0, lam, out=np.zeros_like(lam), where=lam > 0)[:, None, None]
    grad_s = dT[:, None, :] * t_hat[None] + B[:, None, :] * p_hat[None]
    curl_s = B[:, None, :] * t_hat[None] - dT[:, None, :] * p_hat[None]
    return Y, Y[:, None, :] * r_hat[None], grad_s * inv, curl_s * inv


def eval_ylm(idx: HarmonicIndex, theta: float, phi: float) -> complex:
    if not 0.0 <= theta <= math.pi:
        raise DomainError(f"colatitude {theta} outside [0, pi]")
    Y, _, _ = ylm_table(idx.l, theta, phi)
    return complex(Y[idx.h, 0])


def eval_legendre(l: int, x: float) -> float:
    if abs(x) > 1.0:
        raise DomainError(f"Legendre argument {x} outside [-1, 1]")
    if l < 0:
        raise DomainError(f"negative Legendre degree {l}")
    p_prev, p = 1.0, x
    if l == 0:
        return 1.0
    for n in range(1, l):
        p_prev, p = p, ((2 * n + 1) * x * p - n * p_prev) / (n + 1)
    return p


def eval_vector_harmonic(idx: VectorHarmonicIndex, theta: float, phi: float) -> np.ndarray:
    """Cartesian components of Y_{l,lp,m} at one direction."""
    if not 0.0 <= theta <= math.pi:
        raise DomainError(f"colatitude {theta} outside [0, pi]")
    Y, YR, Psi, Phi = tangential_basis(idx.l, theta, phi)
    h = flat_index(idx.l, idx.m)
    l = idx.l
    norm = math.sqrt(2 * l + 1)
    if idx.lp == l - 1:
        v = (math.sqrt(l) * YR[h] + math.sqrt(l + 1) * Psi[h]) / norm
    elif idx.lp == l:
        v = Phi[h]
    else:
        v = (math.sqrt(l + 1) * YR[h] - math.sqrt(l) * Psi[h]) / norm
    return v[:, 0]


def _bessel_series(l: int, x: np.ndarray) -> np.ndarray:
    lead = x**l / double_factorial(2 * l + 1)
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 200):
        term = term * (-0.5 * x * x) / (k * (2 * l + 2 * k + 1))
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return lead * total


def _bessel_downward(l: int, x: np.ndarray) -> np.ndarray:
    # Miller recurrence, renormalized against the closed forms of j_0 / j_1
    start = int(max(l, x.max()) + 30 + math.sqrt(40.0 * x.max()))
    f_next = np.zeros_like(x)
    f = np.full_like(x, 1e-30)
    f_l = np.zeros_like(x)
    for n in range(start, 0, -1):
        f_prev = (2 * n + 1) / x * f - f_next
        f_next, f = f, f_prev
        if n - 1 == l:
            f_l = f.copy()
        big = np.abs(f) > 1e200
        if np.any(big):
            f = np.where(big, f * 1e-200, f)
            f_next = np.where(big, f_next * 1e-200, f_next)
            f_l = np.where(big, f_l * 1e-200, f_l)
    f_0, f_1 = f, f_next
    j0 = np.sin(x) / x
    j1 = np.sin(x) / x**2 - np.cos(x) / x
    use_j0 = np.abs(j0) >= np.abs(j1)
    scale = np.where(use_j0, j0 / f_0, j1 / f_1)
    return f_l * scale


def spherical_bessel_j(l: int, x) -> np.ndarray:
    """
    Regular spherical Bessel function j_l(x) for x >= 0: power series below
    x = max(l, 1), downward recurrence above.
    """
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    if np.any(flat < 0):
        raise DomainError("spherical_bessel_j needs x >= 0")
    out = np.empty_like(flat)
    small = flat < max(l, 1)
    if np.any(small):
        out[small] = _bessel_series(l, flat[small])
    if np.any(~small):
        out[~small] = _bessel_downward(l, flat[~small])
    return out.reshape(x.shape) if x.ndim else out[0]
