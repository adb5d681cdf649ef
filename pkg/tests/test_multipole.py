import logging
import math

import numpy as np
import pytest

from core.errors import ConfigurationError, DomainError, FitError
from core.grid import ScalarField, make_grid, norm
from functions.verification_checks import (
    GAUSSIAN_DIPOLE_QDOT,
    anapole_checks,
    calibration_checks,
    channel_completeness_check,
    compact_scalar,
    gaussian_dipole_checks,
    long_wavelength_checks,
    magnetic_loop_checks,
    structure_exponent_checks,
    torus_source,
)
from service.multipole import (
    FormFactorTable,
    anapole_report,
    calibrate_normalization,
    cartesian_toroid_dipole,
    channel_projection,
    compute_moments,
    fitted_low_k_exponent,
    form_factors,
    magnetic_moment,
    qdot_moment,
    siegert_split,
    toroid_moment,
)
from service.operators import gradient
from service.sources import TORUS_DEFAULTS, TORUS_GRID, SourceSpec, make_source, outer_shell_fraction, torus_extent


@pytest.fixture(scope="module")
def dipole_grid():
    return make_grid(4, 48, 8.0)


@pytest.fixture(scope="module")
def dipole(dipole_grid):
    return make_source(SourceSpec(kind="gaussian_dipole", sigma=1.0), dipole_grid)


def failed(checks: list[dict]) -> list[dict]:
    return [c for c in checks if not c["ok"]]


def test_gaussian_dipole_charge_rate(dipole):
    # int grad(r Y_10) . z_hat exp(-r^2) = sqrt(3/4pi) pi^(3/2)
    assert GAUSSIAN_DIPOLE_QDOT == pytest.approx(math.sqrt(3) * math.pi / 2)
    assert qdot_moment(dipole, 1, 0) == pytest.approx(GAUSSIAN_DIPOLE_QDOT, rel=1e-9)
    assert abs(qdot_moment(dipole, 1, 1)) < 1e-12
    assert abs(magnetic_moment(dipole, 1, 0)) < 1e-12


def test_gaussian_dipole_checks():
    assert failed(gaussian_dipole_checks()) == []


def test_gaussian_dipole_low_k_behaviour(dipole):
    k = np.linspace(0.02, 0.3, 12)
    split = siegert_split(dipole, 1, 0, k)
    assert abs(split.e0_fit - GAUSSIAN_DIPOLE_QDOT) < 5e-3 * GAUSSIAN_DIPOLE_QDOT
    assert fitted_low_k_exponent(k, split.E, split.qdot0) == pytest.approx(2.0, abs=0.05)


def test_long_wavelength_checks():
    assert failed(long_wavelength_checks()) == []


def test_magnetic_loop_checks():
    assert failed(magnetic_loop_checks()) == []


@pytest.mark.slow
def test_anapole_checks():
    assert failed(anapole_checks()) == []


@pytest.mark.slow
def test_structure_exponents():
    assert failed(structure_exponent_checks()) == []


def test_channel_completeness():
    assert channel_completeness_check(42)["ok"]


def test_toroid_moment_is_blind_to_gradients(wide_ball, rng):
    # cancellation roundoff grows like eps n_r^2 r_max^(l+3)
    g = wide_ball
    J = gradient(compact_scalar(g, rng, 4))
    scale = norm(J)

    def bound(l: int) -> float:
        return 8.0 * np.finfo(float).eps * g.n_r**2 * g.r_max ** (l + 3) * scale

    for l in range(1, 4):
        for m in range(-l, l + 1):
            assert abs(toroid_moment(J, l, m, 0)) < bound(l)
    assert np.max(np.abs(cartesian_toroid_dipole(J))) < bound(1)


def test_toroid_dipole_matches_cartesian_form(dipole):
    # z_hat exp(-r^2): t_z = -(2 pi / 3) int r^4 exp(-r^2) dr = -pi^(3/2) / 4, and T_10 = t_z
    expected = -(math.pi**1.5) / 4.0
    assert cartesian_toroid_dipole(dipole)[2] == pytest.approx(expected, rel=1e-9)
    assert toroid_moment(dipole, 1, 0, 0) == pytest.approx(expected, rel=1e-9)


@pytest.mark.slow
def test_toroid_dipole_convention_across_tori(anapole_grid):
    for radius, tube in ((3.0, 1.0), (2.5, 0.8)):
        J = make_source(SourceSpec(kind="toroidal_solenoid", sigma=0.5, radius=radius, tube=tube), anapole_grid)
        assert toroid_moment(J, 1, 0, 0).real == pytest.approx(cartesian_toroid_dipole(J)[2], rel=1e-8)


def test_moments_are_hermitian_for_real_currents(dipole_grid):
    J = make_source(SourceSpec(kind="gaussian_dipole", sigma=1.0, center=(0.5, 0.3, 0.2)), dipole_grid)
    for l in range(1, 4):
        for m in range(1, l + 1):
            sign = (-1) ** m
            assert toroid_moment(J, l, -m, 0) == pytest.approx(sign * np.conj(toroid_moment(J, l, m, 0)), abs=1e-10)
            assert qdot_moment(J, l, -m) == pytest.approx(sign * np.conj(qdot_moment(J, l, m)), abs=1e-10)
            assert magnetic_moment(J, l, -m) == pytest.approx(sign * np.conj(magnetic_moment(J, l, m)), abs=1e-10)
    assert abs(qdot_moment(J, 2, 1)) > 1e-3


def test_solenoid_toroid_dipole_points_along_axis(anapole_grid):
    J = torus_source(anapole_grid)
    t = cartesian_toroid_dipole(J)
    assert abs(t[2]) > 1e-3 * norm(J)
    assert max(abs(t[0]), abs(t[1])) < 1e-9 * abs(t[2])
    assert abs(toroid_moment(J, 1, 0, 0)) > 1e-3 * norm(J)


def test_form_factor_table_validation():
    k = np.array([0.1, 0.2])
    z = np.zeros(2, dtype=complex)
    with pytest.raises(DomainError):
        FormFactorTable(1, 0, np.array([0.2, 0.1]), z, z, z)
    with pytest.raises(DomainError):
        FormFactorTable(1, 0, np.array([0.0, 0.1]), z, z, z)
    with pytest.raises(DomainError):
        FormFactorTable(1, 0, k, z, z, np.zeros(3, dtype=complex))
    assert len(FormFactorTable(1, 0, k, z, z, z).rows()) == 6


def test_form_factor_domain_errors(dipole):
    with pytest.raises(DomainError):
        form_factors(dipole, 0, 0, [0.1])
    with pytest.raises(DomainError):
        form_factors(dipole, 5, 0, [0.1])
    with pytest.raises(DomainError):
        channel_projection(dipole, 1, 0, 3, 0.1)
    with pytest.raises(DomainError):
        channel_projection(dipole, 1, 0, 1, 0.0)
    with pytest.raises(DomainError):
        toroid_moment(dipole, 1, 0, -1)


def test_siegert_split_needs_enough_points(dipole):
    with pytest.raises(FitError) as info:
        siegert_split(dipole, 1, 0, [0.01, 0.02, 0.03])
    assert info.value.exit_code == 3
    with pytest.raises(FitError):
        fitted_low_k_exponent([0.1], [1.0], 0.5)


def test_moment_set(dipole):
    moments = compute_moments(dipole, 2, 1)
    assert (0, 0) in moments.Qdot0
    assert (0, 0) not in moments.M
    assert (2, -2, 1) in moments.T
    quantities = {row.quantity for row in moments.rows()}
    assert quantities == {"Qdot", "Qdot_2n", "M", "T"}


def test_exponent_of_identical_curves_is_infinite():
    k = np.linspace(0.01, 0.1, 8)
    assert fitted_low_k_exponent(k, np.full(8, 2.0), 2.0) == math.inf


def test_source_configuration_errors(source_grid):
    with pytest.raises(ConfigurationError):
        make_source(SourceSpec(kind="toroidal_solenoid", radius=1.0, tube=1.0), source_grid)
    with pytest.raises(ConfigurationError):
        make_source(SourceSpec(kind="magnetic_loop", radius=7.0, sigma=1.0), source_grid)
    with pytest.raises(ConfigurationError):
        make_source(SourceSpec(kind="from_file"), source_grid)


def test_under_resolved_source_warns(source_grid, caplog):
    with caplog.at_level(logging.WARNING, logger="vsf"):
        make_source(SourceSpec(kind="magnetic_loop", radius=2.0, sigma=0.05), source_grid)
    assert "UNDER-RESOLVED SOURCE" in caplog.text


def test_charge_rate_follows_continuity(dipole):
    J, rho_dot = make_source(SourceSpec(kind="gaussian_dipole"), dipole.grid, with_charge_rate=True)
    assert isinstance(rho_dot, ScalarField)
    assert norm(rho_dot) > 0


def test_calibrated_normalizations(anapole_grid):
    dip = make_source(SourceSpec(kind="gaussian_dipole", sigma=1.0), anapole_grid)
    result = calibrate_normalization(dip, torus_source(anapole_grid), np.linspace(0.005, 0.08, 12))
    assert isinstance(result["charge_ratio"], float)
    assert abs(result["charge_ratio"] - result["charge_nominal"]) < 5e-3
    assert abs(result["toroid_ratio"] / result["toroid_nominal"] - 1.0) < 2e-2


@pytest.mark.slow
def test_calibration_checks():
    assert failed(calibration_checks()) == []


def test_torus_extent():
    spec = SourceSpec(kind="toroidal_solenoid", **TORUS_DEFAULTS)
    assert torus_extent(spec) == pytest.approx(3.0 + math.sqrt(1.0 + 5.3))
    assert torus_extent(spec) < TORUS_GRID[2]


def test_coarse_torus_leaks_into_outer_shells(source_grid, caplog):
    with caplog.at_level(logging.WARNING, logger="vsf"):
        J = make_source(SourceSpec(kind="toroidal_solenoid", **TORUS_DEFAULTS), source_grid)
    assert "outer shells" in caplog.text
    assert outer_shell_fraction(J) > 1e-8


def test_resolved_torus_stays_inside(anapole_grid, caplog):
    with caplog.at_level(logging.WARNING, logger="vsf"):
        J = torus_source(anapole_grid)
    assert "outer shells" not in caplog.text
    assert outer_shell_fraction(J) < 1e-8
    report = anapole_report(J)
    assert report["max_qdot"] < 1e-6
    assert report["ok"]
