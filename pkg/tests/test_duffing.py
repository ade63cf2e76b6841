import numpy as np
import pytest

from duffqubit import (DriveParams, DuffingParams, QuarticSign, Regime,
                       LyapunovSettings, classify_regime, delta_q_semiclassical,
                       largest_lyapunov, simulate_classical)
from duffqubit.duffing import Trajectory
from duffqubit.errors import ConfigError, EscapedTrajectoryError

from conftest import TAU, drive


def test_undriven_vacuum_is_fixed_point(eq4_params):
    tr = simulate_classical(eq4_params, drive(0.0), 0j, 50.0, 0.05)
    assert np.all(tr.alpha == 0.0)
    assert tr.escaped is None


def test_linear_decay_closed_form():
    p = DuffingParams(omega_o=1.0, lam=0.0, gamma=0.05)
    a0 = 1.0 + 0.5j
    tr = simulate_classical(p, drive(0.0, omega_d=1.0), a0, 10.0, 0.002)
    exact = a0 * np.exp((-1j * p.omega_o - 0.5 * p.gamma) * tr.t)
    assert np.max(np.abs(tr.alpha - exact)) < 1e-8


def test_energy_conservation_long_run():
    # |alpha| conserved to 1e-8 over 1000 periods at lam = gamma = I0 = 0
    p = DuffingParams(omega_o=1.0, lam=0.0, gamma=0.0)
    tr = simulate_classical(p, drive(0.0, omega_d=1.0), 1.0 + 0j, 1000.0 * TAU, 0.01)
    assert np.max(np.abs(np.abs(tr.alpha) - 1.0)) < 1e-8


def test_step_halving_nonchaotic(eq4_params):
    d = drive(2.0)
    a1 = simulate_classical(eq4_params, d, 0j, 50.0, 0.02).alpha[-1]
    a2 = simulate_classical(eq4_params, d, 0j, 50.0, 0.01).alpha[-1]
    assert abs(a1 - a2) / abs(a2) < 1e-6


def test_chaotic_drive_stays_bounded(eq4_params):
    tr = simulate_classical(eq4_params, drive(30.0), 0j, 500.0, TAU / 64.0)
    assert tr.escaped is None
    assert np.max(np.abs(tr.alpha)) < 1e3
    assert len(tr.alpha) == len(tr.t)


def test_as_written_sign_escapes():
    p = DuffingParams(omega_o=1.0, lam=0.25, gamma=0.05,
                      quartic_sign=QuarticSign.AS_WRITTEN)
    tr = simulate_classical(p, drive(30.0), 0j, 200.0, 0.02)
    assert tr.escaped is not None
    assert tr.t[-1] == pytest.approx(tr.escaped)
    assert np.all(np.isfinite(tr.alpha[:-1].view(float)))


def test_dt_precondition(eq4_params):
    with pytest.raises(ConfigError):
        simulate_classical(eq4_params, drive(1.0, omega_d=1.0), 0j, 10.0, 0.2)


def test_determinism(eq4_params):
    d = drive(30.0)
    t1 = simulate_classical(eq4_params, d, 0.1 + 0.2j, 100.0, 0.05)
    t2 = simulate_classical(eq4_params, d, 0.1 + 0.2j, 100.0, 0.05)
    assert np.array_equal(t1.alpha, t2.alpha)


def test_delta_q_vacuum_zero(eq4_params):
    tr = simulate_classical(eq4_params, drive(0.0), 0j, 20.0, 0.05)
    sig = delta_q_semiclassical(tr, 0.03)
    assert np.all(sig.values == 0.0)


def test_delta_q_constant_amplitude(eq4_params):
    # |alpha|^2 = 4 with g = 0.03 gives 0.12
    tr = Trajectory(t=np.arange(5) * 0.1, alpha=np.full(5, 2.0 + 0j),
                    params=eq4_params, drive=drive(0.0), dt=0.1)
    sig = delta_q_semiclassical(tr, 0.03)
    assert np.allclose(sig.values, 0.12)


def test_delta_q_nonnegative(eq4_params):
    tr = simulate_classical(eq4_params, drive(30.0), 0j, 200.0, TAU / 64.0)
    sig = delta_q_semiclassical(tr, 0.03)
    assert np.all(sig.values >= 0.0)


def test_delta_q_escaped_rejected():
    p = DuffingParams(lam=0.25, quartic_sign=QuarticSign.AS_WRITTEN)
    tr = simulate_classical(p, drive(30.0), 0j, 200.0, 0.02)
    with pytest.raises(EscapedTrajectoryError, match="escaped at t="):
        delta_q_semiclassical(tr, 0.03)


def test_lyapunov_damped_linear(eq4_params):
    est = largest_lyapunov(eq4_params, drive(0.0, omega_d=1.0),
                           LyapunovSettings(seed_offset=3))
    assert est.exponent == pytest.approx(-0.025, abs=max(2.0 * est.stderr, 1e-3))


def test_lyapunov_preconditions(eq4_params):
    with pytest.raises(ConfigError):
        largest_lyapunov(eq4_params, drive(1.0), LyapunovSettings(measure_periods=100))
    with pytest.raises(ConfigError):
        largest_lyapunov(eq4_params, drive(1.0), LyapunovSettings(transient_periods=10))


def test_lyapunov_escape_error():
    p = DuffingParams(lam=0.25, quartic_sign=QuarticSign.AS_WRITTEN)
    with pytest.raises(EscapedTrajectoryError):
        largest_lyapunov(p, drive(30.0), LyapunovSettings())


def test_classify_regime_thresholds():
    assert classify_regime(0.1, 0.01) == Regime.CHAOTIC
    assert classify_regime(-0.025, 0.002) == Regime.PERIODIC
    assert classify_regime(0.001, 0.01) == Regime.INDETERMINATE
