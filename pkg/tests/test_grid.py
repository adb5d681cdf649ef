import logging
import math

import numpy as np
import pytest

from core.errors import ConfigurationError, LayoutError
from core.grid import (
    ScalarField,
    VectorField,
    analyze_scalar,
    analyze_vector,
    annulus,
    check_support,
    inner,
    integrate_volume,
    make_grid,
    norm,
    shell_norms,
    synthesize_scalar,
    synthesize_vector,
)
from service.algebra import random_scalar, random_vector


def test_make_grid_defaults(unit_ball):
    assert unit_ball.n_theta == unit_ball.l_max + 2
    assert unit_ball.n_phi == 2 * unit_ball.l_max + 4
    assert unit_ball.points.shape == (3, 16, unit_ball.n_theta, unit_ball.n_phi)
    assert not unit_ball.is_annulus


@pytest.mark.parametrize(
    "kwargs",
    [
        {"l_max": -1, "n_r": 8, "r_max": 1.0},
        {"l_max": 4, "n_r": 1, "r_max": 1.0},
        {"l_max": 4, "n_r": 8, "r_max": 0.0},
        {"l_max": 4, "n_r": 8, "r_max": 1.0, "r_inner": 1.0},
        {"l_max": 4, "n_r": 8, "r_max": 1.0, "n_theta": 3},
    ],
)
def test_make_grid_rejects_bad_sizes(kwargs):
    with pytest.raises(ConfigurationError):
        make_grid(**kwargs)


def test_radial_quadrature_and_calculus(unit_shell):
    g = unit_shell
    r = g.r_nodes
    assert np.all((r > 0.5) & (r < 1.0))
    assert np.sum(g.r_weights * r**5) == pytest.approx((1.0 - 0.5**6) / 6, rel=1e-14)
    p = 3 * r**7 - r**2 + 0.5
    assert np.allclose(g.diff_matrix @ p, 21 * r**6 - 2 * r, atol=1e-9)
    at = np.array([0.5, 0.75, 1.0])
    assert np.allclose(g.interpolation_matrix(at) @ p, 3 * at**7 - at**2 + 0.5, atol=1e-12)


def test_scalar_round_trip(unit_ball, rng):
    f = random_scalar(unit_ball, rng, unit_ball.l_max)
    back = analyze_scalar(unit_ball, synthesize_scalar(f))
    assert np.max(np.abs(back.coef - f.coef)) < 1e-12


def test_vector_round_trip(unit_ball, rng):
    V = random_vector(unit_ball, rng, unit_ball.l_max)
    back = analyze_vector(unit_ball, synthesize_vector(V))
    assert np.max(np.abs(back.coef - V.coef)) < 1e-11


def test_vector_field_has_no_tangential_monopole(unit_ball):
    coef = np.ones((3, unit_ball.n_r, unit_ball.n_h), dtype=complex)
    V = VectorField(unit_ball, coef)
    assert np.all(V.coef[1:, :, 0] == 0)
    assert np.all(V.coef[0, :, 0] == 1)


def test_layout_errors(unit_ball, unit_shell):
    with pytest.raises(LayoutError):
        ScalarField(unit_ball, np.zeros((3, 3)))
    with pytest.raises(LayoutError):
        analyze_scalar(unit_ball, np.zeros((unit_ball.n_r, 2, 2)))
    with pytest.raises(LayoutError):
        ScalarField.zeros(unit_ball) + ScalarField.zeros(unit_shell)
    with pytest.raises(LayoutError):
        integrate_volume(np.zeros((unit_ball.n_r, unit_ball.n_theta, unit_ball.n_phi)))


def test_volume_integrals(unit_ball, unit_shell):
    one = np.ones((unit_ball.n_r, unit_ball.n_theta, unit_ball.n_phi))
    assert integrate_volume(one, unit_ball).real == pytest.approx(4 * math.pi / 3, rel=1e-13)
    assert integrate_volume(analyze_scalar(unit_ball, one)).real == pytest.approx(4 * math.pi / 3, rel=1e-13)
    shell = np.ones((unit_shell.n_r, unit_shell.n_theta, unit_shell.n_phi))
    assert integrate_volume(shell, unit_shell).real == pytest.approx(4 * math.pi / 3 * (1 - 0.5**3), rel=1e-13)
    z2 = unit_ball.points[2] ** 2
    assert integrate_volume(z2, unit_ball).real == pytest.approx(4 * math.pi / 15, rel=1e-13)


def test_inner_product_matches_pointwise_quadrature(unit_ball, rng):
    a = random_vector(unit_ball, rng, 3)
    b = random_vector(unit_ball, rng, 3)
    pa, pb = synthesize_vector(a), synthesize_vector(b)
    pointwise = integrate_volume(np.sum(np.conj(pa) * pb, axis=0), unit_ball)
    assert abs(inner(a, b) - pointwise) < 1e-11 * norm(a) * norm(b)
    assert norm(a) ** 2 == pytest.approx(inner(a, a).real)


def test_shell_norms_shape(unit_ball, rng):
    V = random_vector(unit_ball, rng, 2)
    assert shell_norms(V).shape == (unit_ball.n_r,)


def test_support_check(wide_ball, caplog):
    decaying = ScalarField.from_profile(wide_ball, lambda r: np.exp(-(r**2)), 1, 0)
    assert check_support(decaying, 1e-12, "gaussian")
    flat = ScalarField.from_profile(wide_ball, lambda r: np.ones_like(r), 0, 0)
    with caplog.at_level(logging.WARNING, logger="vsf"):
        assert not check_support(flat, 1e-12, "constant")
    assert "SUPPORT LEAK" in caplog.text


def test_annulus_keeps_resolution(unit_ball):
    shell = annulus(unit_ball, 0.5)
    assert shell.is_annulus
    assert (shell.l_max, shell.n_r, shell.n_theta, shell.n_phi) == (
        unit_ball.l_max,
        unit_ball.n_r,
        unit_ball.n_theta,
        unit_ball.n_phi,
    )
