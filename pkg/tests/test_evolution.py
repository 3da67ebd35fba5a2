"""Spectral evolution, the whole-weight operator, and the density-flux series."""

import math

import numpy as np
import pytest

from relqlab.evolution import (
    FieldConfig,
    SpatialGrid,
    WaveFunction,
    apply_R,
    binom_half,
    density_flux_report,
    dispersion,
    evolve,
    flux_coefficient,
    free_propagate,
    gaussian_packet,
    klein_gordon_residual,
    plane_wave,
    plane_wave_identity_check,
    r_symbol,
    schrodinger_overlap,
    spectral_derivative,
)

GRID = SpatialGrid(n=1024, length=200.0)
FREE = FieldConfig.free(1.0, GRID)

# momentum range ~ [-1, 1] keeps high-order spectral derivatives clean
FLUX_GRID = SpatialGrid(n=512, length=512.0 * math.pi)
FLUX_FREE = FieldConfig.free(1.0, FLUX_GRID)


def l2(grid, values):
    return math.sqrt(float(np.sum(np.abs(values) ** 2) * grid.dx))


# ---------------------------------------------------------------------------
# grid and types


def test_grid_validation():
    for bad in (12, 18, 1000):
        with pytest.raises(ValueError):
            SpatialGrid(n=bad, length=10.0)
    with pytest.raises(ValueError):
        SpatialGrid(n=64, length=0.0)


def test_momentum_grid_nyquist_positive():
    g = SpatialGrid(n=16, length=16.0)
    p = g.p
    assert p[8] == pytest.approx(+np.pi)  # Nyquist wrapped to +n/2
    # symmetric about zero except at the Nyquist point
    np.testing.assert_allclose(np.sort(p[1:8]), np.sort(-p[9:]), rtol=1e-15)


def test_wavefunction_validation():
    with pytest.raises(ValueError):
        WaveFunction(grid=GRID, values=np.zeros(GRID.n, dtype=complex))  # zero norm
    vals = np.ones(GRID.n, dtype=complex)
    vals[0] = np.nan
    with pytest.raises(ValueError):
        WaveFunction(grid=GRID, values=vals)


# ---------------------------------------------------------------------------
# dispersion


def test_dispersion_examples():
    assert dispersion(0.0, FREE) == pytest.approx(1.0)
    assert dispersion(0.75, FREE) == pytest.approx(1.25, rel=1e-15)
    shifted = FieldConfig.free(1.0, GRID, a0=0.6)
    assert dispersion(0.6, shifted) == pytest.approx(1.0)  # minimal coupling shift


# ---------------------------------------------------------------------------
# evolve


def test_plane_wave_is_spectral_eigenstate():
    k = 12
    psi = plane_wave(GRID, k)
    p = 2.0 * np.pi * k / GRID.length
    out = evolve(psi, FREE, dt=0.3, steps=7)
    expected = psi.values * np.exp(-1j * dispersion(p, FREE) * 0.3 * 7)
    np.testing.assert_allclose(out.values, expected, atol=1e-13)


def test_zero_time_propagation_is_identity():
    psi = gaussian_packet(GRID, 0.0, 8.0, 0.3)
    out = free_propagate(psi, FREE, 0.0)
    np.testing.assert_allclose(out.values, psi.values, atol=1e-14)


def test_norm_preserved_over_1000_steps():
    v = 0.5 * np.cos(2.0 * np.pi * GRID.x / GRID.length)
    f = FieldConfig(a0=0.0, v_samples=v, mass=1.0)
    psi = gaussian_packet(GRID, -20.0, 8.0, 0.4)
    out = evolve(psi, f, dt=0.05, steps=1000)
    assert abs(out.norm() - psi.norm()) / psi.norm() < 1e-12


def test_free_semigroup_composition():
    psi = gaussian_packet(GRID, -10.0, 8.0, 0.4)
    a = evolve(psi, FREE, dt=0.05, steps=2)
    b = evolve(psi, FREE, dt=0.10, steps=1)
    assert l2(GRID, a.values - b.values) < 1e-10


def test_strang_splitting_is_second_order():
    v = 0.5 * np.cos(2.0 * np.pi * GRID.x / GRID.length)
    f = FieldConfig(a0=0.0, v_samples=v, mass=1.0)
    psi = gaussian_packet(GRID, -20.0, 8.0, 0.4)
    total = 2.0
    ref = evolve(psi, f, total / 2048, 2048)

    def err(dt):
        got = evolve(psi, f, dt, int(round(total / dt)))
        return l2(GRID, got.values - ref.values)

    ratio = err(0.1) / err(0.05)
    assert 3.7 < ratio < 4.3


def test_group_velocity_relativistic():
    # centroid speed p0 / E(p0), not p0 / m
    psi = gaussian_packet(GRID, -40.0, 10.0, 0.5)
    out = evolve(psi, FREE, dt=0.05, steps=400)
    vg = (out.centroid() - psi.centroid()) / 20.0
    target = 0.5 / math.sqrt(1.25)
    assert abs(vg - target) / target < 0.01


def test_evolve_validation():
    psi = gaussian_packet(GRID, 0.0, 8.0, 0.0)
    with pytest.raises(ValueError):
        evolve(psi, FREE, dt=0.0, steps=1)
    with pytest.raises(ValueError):
        evolve(psi, FREE, dt=0.1, steps=0)


# ---------------------------------------------------------------------------
# whole-weight operator


def test_apply_R_inverse_roundtrip():
    psi = gaussian_packet(GRID, 3.0, 6.0, 0.8)
    back = apply_R(apply_R(psi, FREE), FREE, inverse=True)
    assert l2(GRID, back.values - psi.values) / psi.norm() < 1e-13


def test_apply_R_diagonal_on_plane_wave():
    k = 9
    psi = plane_wave(GRID, k)
    p = 2.0 * np.pi * k / GRID.length
    out = apply_R(psi, FREE)
    np.testing.assert_allclose(out.values, r_symbol(p, FREE) * psi.values, atol=1e-14)


def test_r_magnitude_at_rest():
    assert abs(r_symbol(0.0, FREE)) == pytest.approx((2.0 * np.pi) ** -0.5 / math.sqrt(2.0),
                                                     rel=1e-14)


def test_plane_wave_identity_everywhere():
    assert plane_wave_identity_check(0.0, 1.0) < 1e-14
    assert plane_wave_identity_check(0.75, 1.0) < 1e-12
    assert plane_wave_identity_check(10.0, 1.0) < 1e-12
    for p in np.linspace(0.0, 10.0, 100):
        assert plane_wave_identity_check(p, 1.0) < 1e-12


def test_apply_R_commutes_with_uniform_evolution():
    v = np.full(GRID.n, 0.3)
    f = FieldConfig(a0=0.2, v_samples=v, mass=1.0)
    psi = gaussian_packet(GRID, -5.0, 7.0, 0.6)
    a = apply_R(evolve(psi, f, 0.1, 5), f)
    b = evolve(apply_R(psi, f), f, 0.1, 5)
    assert np.max(np.abs(a.values - b.values)) < 1e-12


# ---------------------------------------------------------------------------
# nonrelativistic comparator


def test_schrodinger_overlap_at_t0():
    psi = gaussian_packet(GRID, 0.0, 20.0, 0.01)
    assert schrodinger_overlap(psi, FREE, 0.0) == pytest.approx(1.0, abs=1e-14)


def test_schrodinger_overlap_low_energy():
    # support |p| < 0.02 m: p0 = 0.01, sigma_p = 0.002
    grid = SpatialGrid(n=1024, length=4000.0)
    f = FieldConfig.free(1.0, grid)
    psi = gaussian_packet(grid, 0.0, 250.0, 0.01)
    assert schrodinger_overlap(psi, f, 10.0) > 0.9999


def test_schrodinger_overlap_relativistic_regime():
    # support near |p| ~ m separates the two evolutions measurably
    grid = SpatialGrid(n=1024, length=400.0)
    f = FieldConfig.free(1.0, grid)
    psi = gaussian_packet(grid, 0.0, 5.0, 1.0)
    assert schrodinger_overlap(psi, f, 10.0) < 0.99


def test_schrodinger_overlap_requires_free_field():
    psi = gaussian_packet(GRID, 0.0, 8.0, 0.0)
    f = FieldConfig(a0=0.0, v_samples=np.full(GRID.n, 0.1), mass=1.0)
    with pytest.raises(ValueError):
        schrodinger_overlap(psi, f, 1.0)


# ---------------------------------------------------------------------------
# Klein-Gordon consistency


@pytest.mark.parametrize("sign", [+1, -1])
@pytest.mark.parametrize("p,v", [(0.0, 0.0), (0.75, 0.0), (0.75, 0.2)])
def test_klein_gordon_residual_vanishes(sign, p, v):
    f = FieldConfig(a0=0.0, v_samples=np.full(GRID.n, v), mass=1.0)
    assert klein_gordon_residual(p, sign, f) < 1e-12


def test_klein_gordon_requires_uniform_potential():
    f = FieldConfig(a0=0.0, v_samples=np.linspace(0, 1, GRID.n), mass=1.0)
    with pytest.raises(ValueError):
        klein_gordon_residual(0.5, +1, f)


# ---------------------------------------------------------------------------
# density-flux series


def test_binomial_half_values():
    np.testing.assert_allclose(
        [binom_half(n) for n in range(5)],
        [1.0, 0.5, -0.125, 0.0625, -5.0 / 128.0],
        rtol=1e-13,
    )


def test_flux_coefficient_reproduces_current_term():
    # n = 1: coefficient of Q_2 equals the divergence of j = 1/(2 i m) Q_1,
    # because dQ_1/dx = Q_2 identically
    psi = gaussian_packet(FLUX_GRID, 5.0, 50.0, 0.04)
    vals = psi.values
    q1 = np.conj(vals) * spectral_derivative(vals, FLUX_GRID, 1)
    q1 = q1 - np.conj(q1)
    div_j = spectral_derivative(q1, FLUX_GRID, 1) / (2j * 1.0)
    d2 = spectral_derivative(vals, FLUX_GRID, 2)
    q2 = np.conj(vals) * d2 - vals * np.conj(d2)
    np.testing.assert_allclose(div_j, flux_coefficient(1, 1.0) * q2, atol=1e-15)


def test_flux_plane_wave_residual_vanishes():
    psi = plane_wave(FLUX_GRID, 30)
    report = density_flux_report(psi, FLUX_FREE, dt=0.1, n_trunc=5)
    assert report.residual_l2 < 1e-12
    assert len(report.term_magnitudes) == 5


def test_flux_real_gaussian_symmetry():
    # real state: every Q_n vanishes identically, so the residual is the
    # centered density difference alone (itself zero by time-reversal symmetry)
    psi = gaussian_packet(FLUX_GRID, 0.0, 62.5, 0.0)
    vals = psi.values
    for order in (1, 3):
        dn = spectral_derivative(vals, FLUX_GRID, order)
        qn = np.conj(vals) * dn - vals * np.conj(dn)
        assert np.max(np.abs(qn)) < 1e-16
    report = density_flux_report(psi, FLUX_FREE, dt=1e-3, n_trunc=3)
    rho_p = free_propagate(psi, FLUX_FREE, 1e-3).density()
    rho_m = free_propagate(psi, FLUX_FREE, -1e-3).density()
    drho = (rho_p - rho_m) / 2e-3
    fd_norm = math.sqrt(float(np.sum(drho**2) * FLUX_GRID.dx))
    assert report.residual_l2 == pytest.approx(fd_norm, rel=1e-9, abs=1e-18)
    assert np.all(report.term_magnitudes < 1e-15)


def test_flux_moving_gaussian_monotone_convergence():
    # narrow moving packet (momentum support < 0.1): each added term lowers
    # the residual; this is the module's convergence oracle
    psi = gaussian_packet(FLUX_GRID, 0.0, 62.5, 0.05)
    residuals = [density_flux_report(psi, FLUX_FREE, dt=0.01, n_trunc=n).residual_l2
                 for n in (1, 2, 3, 4)]
    assert all(b < a for a, b in zip(residuals, residuals[1:]))
    assert residuals[0] > 1e-8 and residuals[-1] < 1e-12


def test_flux_validation():
    psi = gaussian_packet(FLUX_GRID, 0.0, 62.5, 0.05)
    with pytest.raises(ValueError):
        density_flux_report(psi, FLUX_FREE, dt=0.01, n_trunc=9)
    with_v = FieldConfig(a0=0.0, v_samples=np.full(FLUX_GRID.n, 0.1), mass=1.0)
    with pytest.raises(ValueError):
        density_flux_report(psi, with_v, dt=0.01, n_trunc=2)
