"""Two-path interference harness: phases, the alternating field, visibility,
and the collapse-driven interference destruction."""

import math

import numpy as np
import pytest

from relqlab.abexp import (
    ABConfig,
    DEFAULT_B1_STAR,
    EnvelopeOnlyPatternError,
    ab_phase,
    alternating_field,
    fringe_visibility,
    simulate_ab,
    two_state_for_paths,
)

BEAM = dict(p_beam=1.0, a0_main=0.25)


def make_config(**overrides):
    params = dict(flux=0.0, b1_amp=0.0, delta=1.0, tau_flight=6000.0,
                  d_slit=10.0, wavelength=1.0, screen_points=256,
                  n_electrons=500, seed=0)
    params.update(overrides)
    return ABConfig(**params)


# ---------------------------------------------------------------------------
# phase and field


def test_ab_phase_values():
    assert ab_phase(0.0) == 0.0
    assert ab_phase(math.pi) == -math.pi


def test_alternating_field_segments():
    cfg = make_config(b1_amp=0.4)
    assert alternating_field(cfg, 0.0) == 0.4
    assert alternating_field(cfg, 0.999) == 0.4
    assert alternating_field(cfg, 1.0) == -0.4
    with pytest.raises(ValueError):
        alternating_field(cfg, cfg.tau_flight)


def test_alternating_field_integrates_to_zero():
    cfg = make_config(b1_amp=0.7)
    # piecewise-constant: the integral over [0, 2 delta] is the segment sum
    total = sum(alternating_field(cfg, (n + 0.5) * cfg.delta) * cfg.delta
                for n in range(cfg.n_segments))
    assert total == 0.0


def test_zero_amplitude_field():
    cfg = make_config(b1_amp=0.0)
    assert alternating_field(cfg, 1234.5) == 0.0


def test_config_validation():
    with pytest.raises(ValueError):
        make_config(tau_flight=5999.0)  # odd multiple of delta
    with pytest.raises(ValueError):
        make_config(screen_points=32)
    with pytest.raises(ValueError):
        make_config(b1_amp=-0.1)
    with pytest.raises(ValueError):
        make_config(n_electrons=0)


# ---------------------------------------------------------------------------
# two-state mapping


def test_two_state_for_paths_shifted_dispersions():
    sys_ = two_state_for_paths(1.0, 0.25)
    assert sys_.e0 == pytest.approx(math.sqrt(1.0 + 1.25**2), rel=1e-15)  # left path
    assert sys_.e1 == pytest.approx(math.sqrt(1.0 + 0.75**2), rel=1e-15)  # right path
    degenerate = two_state_for_paths(1.0, 0.0)
    assert degenerate.r_ratio == 1.0


# ---------------------------------------------------------------------------
# visibility metric


def test_visibility_pure_interference():
    xi = np.linspace(-4.0, 4.0, 401)
    assert fringe_visibility(xi, 1.0 + np.cos(2.0 * np.pi * xi)) == pytest.approx(1.0)


def test_visibility_partial_interference():
    # (Imax - Imin)/(Imax + Imin) = (1.5 - 0.5)/(1.5 + 0.5) = 1/2
    xi = np.linspace(-4.0, 4.0, 401)
    vis = fringe_visibility(xi, 1.0 + 0.5 * np.cos(2.0 * np.pi * xi))
    assert vis == pytest.approx(0.5, rel=1e-12)


def test_visibility_constant_pattern_is_envelope_only():
    xi = np.linspace(-4.0, 4.0, 401)
    with pytest.raises(EnvelopeOnlyPatternError):
        fringe_visibility(xi, np.ones_like(xi))


def test_visibility_scale_invariant():
    xi = np.linspace(-4.0, 4.0, 401)
    intensity = 1.0 + 0.3 * np.cos(2.0 * np.pi * xi)
    assert fringe_visibility(xi, 7.0 * intensity) == pytest.approx(
        fringe_visibility(xi, intensity), rel=1e-14)


# ---------------------------------------------------------------------------
# the experiment


def test_quiet_field_keeps_interference():
    cfg = make_config(b1_amp=0.0)
    pattern = simulate_ab(cfg, two_state_for_paths(**BEAM))
    assert pattern.collapsed_fraction == 0.0
    assert pattern.visibility > 0.9


def test_flux_pi_shifts_fringes_by_half_period():
    sys_ = two_state_for_paths(**BEAM)
    base = simulate_ab(make_config(b1_amp=0.0, flux=0.0, screen_points=257), sys_)
    shifted = simulate_ab(make_config(b1_amp=0.0, flux=math.pi, screen_points=257), sys_)
    # with the envelope divided out, the interference factors are complementary:
    # 1 + cos(2 pi xi - pi) = 2 - (1 + cos(2 pi xi))
    from relqlab.abexp import _envelope
    env = _envelope(base.positions)
    np.testing.assert_allclose(shifted.intensity / env, 2.0 - base.intensity / env,
                               atol=1e-12)
    mid = len(base.positions) // 2
    assert base.intensity[mid] == pytest.approx(2.0 * env[mid], rel=1e-12)  # bright center
    assert abs(shifted.intensity[mid]) < 1e-12  # dark center


def test_flux_periodicity():
    sys_ = two_state_for_paths(**BEAM)
    a = simulate_ab(make_config(b1_amp=0.0, flux=0.7), sys_)
    b = simulate_ab(make_config(b1_amp=0.0, flux=0.7 + 2.0 * math.pi), sys_)
    np.testing.assert_allclose(a.intensity, b.intensity, atol=1e-12)
    assert a.visibility == pytest.approx(b.visibility, abs=1e-12)


def test_alternating_field_destroys_interference():
    # calibrated amplitude: every electron collapses in flight, the fringes
    # give way to the bare diffraction envelope
    cfg = make_config(b1_amp=DEFAULT_B1_STAR)
    pattern = simulate_ab(cfg, two_state_for_paths(**BEAM))
    assert pattern.collapsed_fraction > 0.8
    assert pattern.visibility < 0.2
    # the drift selects the left (higher-momentum) path
    assert pattern.collapse_outcome == 0


def test_collapsed_pattern_is_pure_envelope():
    from relqlab.abexp import _envelope
    cfg = make_config(b1_amp=DEFAULT_B1_STAR)
    pattern = simulate_ab(cfg, two_state_for_paths(**BEAM))
    np.testing.assert_allclose(pattern.intensity, _envelope(pattern.positions), atol=1e-14)


def test_visibility_independent_of_electron_count():
    sys_ = two_state_for_paths(**BEAM)
    a = simulate_ab(make_config(b1_amp=0.0, n_electrons=10), sys_)
    b = simulate_ab(make_config(b1_amp=0.0, n_electrons=5000), sys_)
    assert a.visibility == pytest.approx(b.visibility, abs=1e-14)
