import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from core.errors import DomainError
from core.harmonics import (
    HarmonicIndex,
    VectorHarmonicIndex,
    degree_order,
    double_factorial,
    eval_legendre,
    eval_vector_harmonic,
    eval_ylm,
    flat_index,
    n_harmonics,
    spherical_bessel_j,
    tangential_basis,
    unit_vectors,
    ylm_table,
)

colatitudes = st.floats(min_value=0.0, max_value=math.pi)
longitudes = st.floats(min_value=0.0, max_value=2 * math.pi)
degrees = st.integers(min_value=0, max_value=10)


def test_flat_index_walks_every_harmonic_once():
    seen = [flat_index(l, m) for l in range(6) for m in range(-l, l + 1)]
    assert seen == list(range(n_harmonics(5)))
    assert all(degree_order(flat_index(l, m)) == (l, m) for l in range(6) for m in range(-l, l + 1))


def test_double_factorial():
    assert double_factorial(5) == 15
    assert double_factorial(7) == 105
    assert double_factorial(0) == 1
    assert double_factorial(-1) == 1


def test_invalid_indices_raise():
    with pytest.raises(DomainError):
        HarmonicIndex(2, 3)
    with pytest.raises(DomainError):
        HarmonicIndex(-1, 0)
    with pytest.raises(DomainError):
        VectorHarmonicIndex(0, 1, 0)
    with pytest.raises(DomainError):
        VectorHarmonicIndex(2, 4, 0)
    with pytest.raises(DomainError):
        eval_ylm(HarmonicIndex(1, 0), 4.0, 0.0)
    with pytest.raises(DomainError):
        eval_legendre(2, 1.5)
    with pytest.raises(DomainError):
        spherical_bessel_j(1, -0.5)


@settings(max_examples=50, deadline=None)
@given(colatitudes, longitudes)
def test_ylm_matches_scipy(theta, phi):
    Y, _, _ = ylm_table(6, theta, phi)
    for l in range(7):
        for m in range(-l, l + 1):
            expected = special.sph_harm(m, l, phi, theta)
            assert abs(Y[flat_index(l, m), 0] - expected) < 1e-12


@settings(max_examples=50, deadline=None)
@given(colatitudes, longitudes)
def test_conjugation_symmetry(theta, phi):
    Y, _, _ = ylm_table(5, theta, phi)
    for l in range(6):
        for m in range(1, l + 1):
            assert abs(Y[flat_index(l, -m), 0] - (-1) ** m * np.conj(Y[flat_index(l, m), 0])) < 1e-13


@settings(max_examples=50, deadline=None)
@given(colatitudes, longitudes, degrees)
def test_addition_theorem(theta, phi, l):
    Y, _, _ = ylm_table(10, theta, phi)
    total = sum(abs(Y[flat_index(l, m), 0]) ** 2 for m in range(-l, l + 1))
    assert total == pytest.approx((2 * l + 1) / (4 * math.pi), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=0.05, max_value=math.pi - 0.05), longitudes)
def test_theta_derivative_matches_finite_difference(theta, phi):
    _, dT, _ = ylm_table(4, theta, phi)
    h = 1e-6
    Yp, _, _ = ylm_table(4, theta + h, phi)
    Ym, _, _ = ylm_table(4, theta - h, phi)
    fd = (Yp[:, 0] - Ym[:, 0]) / (2 * h)
    assert np.max(np.abs(dT[:, 0] - fd)) < 1e-7


@settings(max_examples=50, deadline=None)
@given(colatitudes, longitudes)
def test_tangential_basis_geometry(theta, phi):
    _, YR, Psi, Phi = tangential_basis(5, theta, phi)
    r_hat, _, _ = unit_vectors(theta, phi)
    r_hat = r_hat[:, 0]
    for h in range(n_harmonics(5)):
        psi, ph = Psi[h, :, 0], Phi[h, :, 0]
        assert abs(np.dot(r_hat, psi)) < 1e-13
        assert abs(np.dot(r_hat, ph)) < 1e-13
        # Phi = -r_hat x Psi
        assert np.max(np.abs(ph + np.cross(r_hat, psi))) < 1e-13
    assert np.allclose(Psi[0], 0.0) and np.allclose(Phi[0], 0.0)


def test_vector_harmonics_orthonormal_on_sphere():
    x, w = np.polynomial.legendre.leggauss(10)
    theta = np.repeat(np.arccos(x), 20)
    phi = np.tile(2 * math.pi * np.arange(20) / 20, 10)
    weights = np.repeat(w, 20) * (2 * math.pi / 20)
    fields = {}
    for l in range(1, 4):
        for m in range(-l, l + 1):
            for lp in (l - 1, l, l + 1):
                idx = VectorHarmonicIndex(l, lp, m)
                fields[(l, lp, m)] = np.stack([eval_vector_harmonic(idx, t, p) for t, p in zip(theta, phi)], axis=1)
    keys = list(fields)
    for a in keys:
        for b in keys:
            overlap = np.sum(np.conj(fields[a]) * fields[b] * weights)
            assert abs(overlap - (1.0 if a == b else 0.0)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=20), st.floats(min_value=-1.0, max_value=1.0))
def test_legendre_matches_scipy(l, x):
    assert eval_legendre(l, x) == pytest.approx(special.eval_legendre(l, x), abs=1e-12)


@pytest.mark.parametrize("l", [0, 1, 2, 5, 10])
def test_spherical_bessel_matches_scipy(l):
    x = np.concatenate([np.linspace(0.0, 2.0, 41), np.linspace(2.0, 60.0, 400)])
    ours = spherical_bessel_j(l, x)
    ref = special.spherical_jn(l, x)
    assert np.allclose(ours, ref, rtol=1e-10, atol=1e-13)


def test_spherical_bessel_small_argument_limit():
    x = np.array([1e-6, 1e-4])
    for l in range(4):
        lead = x**l / double_factorial(2 * l + 1)
        assert np.allclose(spherical_bessel_j(l, x), lead, rtol=1e-7)
    assert spherical_bessel_j(0, 0.0) == 1.0
