import numpy as np
import pytest

from duffqubit import (Signal, average_rate, bath_correlation, evolve_qubit,
                       gamma_delta, gamma_unmodified, make_spectral_density,
                       plus_state)
from duffqubit.decoherence import RateSeries
from duffqubit.errors import ConfigError

from conftest import riemann_kernel

KINDS = ["one_over_f", "ohmic", "sub_ohmic", "super_ohmic"]


def flat_signal(n, dt, value=0.0):
    return Signal(t=np.arange(n) * dt, values=np.full(n, value), dt=dt)


# ---------------------------------------------------------------------------
# bath correlation
# ---------------------------------------------------------------------------

def test_kernel_at_zero_lag_one_over_f():
    sd = make_spectral_density("one_over_f", 0.1, 0.01, 1.0)
    corr = bath_correlation(sd, s_max=1.0, ds=0.1)
    assert corr.C[0] == pytest.approx(0.1 * np.log(100.0), rel=1e-10)
    assert corr.C[0].imag == 0.0


def test_kernel_zero_amplitude():
    sd = make_spectral_density("ohmic", 0.0, 0.5, 1.5)
    corr = bath_correlation(sd, s_max=2.0, ds=0.1)
    assert np.all(corr.C == 0.0)


def test_kernel_bounded_by_power():
    sd = make_spectral_density("ohmic", 1.0, 0.5, 1.5)
    corr = bath_correlation(sd, s_max=50.0, ds=0.1)
    assert np.all(np.abs(corr.C) <= abs(corr.C[0]) * (1.0 + 1e-12))


def test_kernel_matches_riemann_oracle():
    rng = np.random.default_rng(42)
    for kind in KINDS:
        sd = make_spectral_density(kind, 0.8, 0.2, 1.8)
        lags = rng.uniform(0.0, 60.0, size=10)
        lags = np.round(lags / 0.05) * 0.05  # put them on a kernel grid
        corr = bath_correlation(sd, s_max=60.0, ds=0.05)
        scale = abs(corr.C[0])
        for s in lags:
            idx = int(round(s / 0.05))
            oracle = riemann_kernel(sd, s, panels=1_000_000)
            assert abs(corr.C[idx] - oracle) / scale < 1e-7


def test_kernel_tabulated_matches_riemann():
    sd = make_spectral_density("tabulated", 1.0, 0.4, 1.6,
                               table=([0.4, 0.7, 1.0, 1.6], [0.1, 0.5, 0.3, 0.2]))
    corr = bath_correlation(sd, s_max=40.0, ds=0.05)
    for idx in (0, 13, 200, 799):
        oracle = riemann_kernel(sd, corr.s[idx], panels=1_000_000)
        assert abs(corr.C[idx] - oracle) / abs(corr.C[0]) < 1e-7


def test_kernel_lag_step_precondition():
    sd = make_spectral_density("ohmic", 1.0, 0.5, 3.0)
    with pytest.raises(ConfigError):
        bath_correlation(sd, s_max=10.0, ds=0.2)  # > 2*pi/(20*3)


# ---------------------------------------------------------------------------
# gamma_delta vs gamma_unmodified
# ---------------------------------------------------------------------------

def reduction_error(sd, omega_q=1.0, t_end=100.0, dt=None):
    if dt is None:
        dt = min(2.0 * np.pi / 64.0, 2.0 * np.pi / (20.0 * sd.domain_hi))
    n = int(round(t_end / dt)) + 1
    corr = bath_correlation(sd, s_max=t_end, ds=dt)
    phi = flat_signal(n, dt)
    rates = gamma_delta(corr, omega_q, phi)
    rates0 = gamma_unmodified(sd, omega_q, phi.t)
    eg = np.max(np.abs(rates.gamma - rates0.gamma)) / np.max(np.abs(rates0.gamma))
    ed = np.max(np.abs(rates.delta_omega - rates0.delta_omega)) / max(
        np.max(np.abs(rates0.delta_omega)), 1e-300)
    return eg, ed


def test_reduction_one_over_f_edge_domain():
    sd = make_spectral_density("one_over_f", 0.1, 0.01, 1.0)
    eg, ed = reduction_error(sd)
    assert eg < 1e-8
    assert ed < 1e-8


def test_reduction_ohmic_interior_domain():
    sd = make_spectral_density("ohmic", 1.0, 2.0 / 3.0, 1.5)
    eg, ed = reduction_error(sd)
    assert eg < 1e-8
    assert ed < 1e-8


def test_reduction_random_domains():
    rng = np.random.default_rng(5)
    for i in range(6):
        kind = KINDS[i % 4]
        lo = rng.uniform(0.05, 1.2)
        hi = lo + rng.uniform(0.2, 1.5)
        sd = make_spectral_density(kind, rng.uniform(0.05, 2.0), lo, hi)
        eg, ed = reduction_error(sd, t_end=60.0)
        assert eg < 1e-8, f"{kind} [{lo:.3f},{hi:.3f}] gamma err {eg:.2e}"
        assert ed < 1e-8, f"{kind} [{lo:.3f},{hi:.3f}] delta err {ed:.2e}"


def test_gamma_delta_grid_mismatch():
    sd = make_spectral_density("ohmic", 1.0, 0.5, 1.5)
    corr = bath_correlation(sd, s_max=10.0, ds=0.05)
    with pytest.raises(ConfigError):
        gamma_delta(corr, 1.0, flat_signal(100, 0.04))
    with pytest.raises(ConfigError):
        gamma_delta(corr, 1.0, flat_signal(500, 0.05))  # longer than kernel


def test_f_factor_law_single_modulation():
    # sinusoidal modulation: time-averaged Gamma ratio tracks F within 5%
    sd = make_spectral_density("ohmic", 1.0, 0.9, 1.1)
    dt, t_end = 0.04, 400.0
    n = int(round(t_end / dt)) + 1
    t = np.arange(n) * dt
    wd, ratio_a = 2.5, 0.05
    amp = ratio_a * wd
    dq = Signal(t=t, values=amp * np.cos(wd * t), dt=dt)
    phi = Signal(t=t, values=(amp / wd) * np.sin(wd * t), dt=dt)
    corr = bath_correlation(sd, s_max=t_end, ds=dt)
    rates = gamma_delta(corr, 1.0, phi, delta_q=dq)
    rates0 = gamma_unmodified(sd, 1.0, t)
    w = t >= 100.0
    measured = np.mean(rates.gamma[w]) / np.mean(rates0.gamma[w])
    f_exp = np.exp(-(amp**2) / (2.0 * wd**2))
    assert measured == pytest.approx(f_exp, rel=0.05)


# ---------------------------------------------------------------------------
# unmodified closed forms
# ---------------------------------------------------------------------------

def test_gamma0_zero_at_t0():
    sd = make_spectral_density("ohmic", 1.0, 0.5, 1.5)
    rates = gamma_unmodified(sd, 1.0, np.array([0.0, 1.0, 2.0]))
    assert rates.gamma[0] == 0.0
    assert rates.delta_omega[0] == 0.0


def test_gamma0_symmetric_table_zero_shift():
    # J symmetric about omega_q: Delta_omega0 vanishes identically
    table = ([0.5, 0.75, 1.0, 1.25, 1.5], [0.1, 0.4, 0.5, 0.4, 0.1])
    sd = make_spectral_density("tabulated", 1.0, 0.5, 1.5, table=table)
    rates = gamma_unmodified(sd, 1.0, np.linspace(0.0, 50.0, 101))
    assert np.max(np.abs(rates.delta_omega)) < 1e-10


def test_gamma0_long_time_golden_rule():
    # smooth J containing omega_q: Gamma0(t) -> 2*pi*J(omega_q)
    sd = make_spectral_density("ohmic", 1.0, 2.0 / 3.0, 1.5, 5.0)
    rates = gamma_unmodified(sd, 1.0, np.array([0.0, 1000.0]))
    assert rates.gamma[-1] == pytest.approx(2.0 * np.pi * np.exp(-0.2), rel=5e-3)


def test_gamma0_tabulated_matches_quadrature_route():
    # same density expressed analytically and as a fine table agree
    sd_a = make_spectral_density("ohmic", 1.0, 0.6, 1.4)
    w = np.linspace(0.6, 1.4, 2001)
    sd_t = make_spectral_density("tabulated", 1.0, 0.6, 1.4,
                                 table=(w, sd_a.evaluate(w)))
    t = np.linspace(0.0, 40.0, 81)
    ra = gamma_unmodified(sd_a, 1.0, t)
    rt = gamma_unmodified(sd_t, 1.0, t)
    assert np.max(np.abs(ra.gamma - rt.gamma)) / np.max(np.abs(ra.gamma)) < 1e-5


# ---------------------------------------------------------------------------
# qubit evolution and rate fitting
# ---------------------------------------------------------------------------

def test_evolve_constant_coherence():
    n, dt = 200, 0.05
    rates = RateSeries(t=np.arange(n) * dt, gamma=np.zeros(n),
                       delta_omega=np.zeros(n), dt=dt)
    evo = evolve_qubit(rates)
    assert np.allclose(evo.cxy, 0.25, atol=1e-15)
    assert not evo.negative_gamma


def test_evolve_constant_rate_closed_form():
    n, dt, gc = 400, 0.05, 0.3
    rates = RateSeries(t=np.arange(n) * dt, gamma=np.full(n, gc),
                       delta_omega=np.zeros(n), dt=dt)
    evo = evolve_qubit(rates)
    exact = 0.25 * np.exp(-gc * rates.t)
    assert np.max(np.abs(evo.cxy - exact)) < 1e-8
    assert np.allclose(evo.p_excited, 0.5 * np.exp(-gc * rates.t), atol=1e-12)


def test_evolve_with_echo_magnitude():
    n, dt = 100, 0.1
    rates = RateSeries(t=np.arange(n) * dt, gamma=np.zeros(n),
                       delta_omega=np.zeros(n), dt=dt)
    m = np.exp(-0.2 * rates.t)
    evo = evolve_qubit(rates, m=m)
    assert np.allclose(evo.cxy, 0.25 * m, atol=1e-12)


def test_evolve_flags_negative_gamma():
    n, dt = 50, 0.1
    gamma = np.full(n, 0.1)
    gamma[5] = -0.01
    rates = RateSeries(t=np.arange(n) * dt, gamma=gamma,
                       delta_omega=np.zeros(n), dt=dt)
    assert evolve_qubit(rates).negative_gamma


def test_evolve_rejects_bad_rho0():
    n, dt = 10, 0.1
    rates = RateSeries(t=np.arange(n) * dt, gamma=np.zeros(n),
                       delta_omega=np.zeros(n), dt=dt)
    with pytest.raises(ConfigError):
        evolve_qubit(rates, rho0=np.array([[0.5, 0.6], [0.4, 0.5]]))  # not Hermitian
    with pytest.raises(ConfigError):
        evolve_qubit(rates, rho0=np.array([[1.0, 0.0], [0.0, 1.0]]))  # trace 2
    with pytest.raises(ConfigError):
        evolve_qubit(rates, rho0=np.array([[1.5, 0.9], [0.9, -0.5]]))  # not PSD


def test_average_rate_exact_exponential():
    t = np.linspace(0.0, 20.0, 401)
    gc = 0.37
    cxy = 0.25 * np.exp(-gc * t)
    assert average_rate(t, cxy, (2.0, 20.0)) == pytest.approx(gc, abs=1e-10)


def test_average_rate_constant_is_zero():
    t = np.linspace(0.0, 10.0, 101)
    assert average_rate(t, np.full(101, 0.2), (1.0, 9.0)) == pytest.approx(0.0, abs=1e-12)


def test_average_rate_guards():
    t = np.linspace(0.0, 10.0, 101)
    cxy = np.exp(-t)
    cxy[60] = 0.0
    with pytest.raises(ConfigError):
        average_rate(t, cxy, (1.0, 9.0))
    with pytest.raises(ConfigError):
        average_rate(t, np.exp(-t), (9.0, 1.0))


def test_plus_state_is_valid():
    rho = plus_state()
    assert np.trace(rho) == pytest.approx(1.0)
    assert abs(rho[0, 1]) == pytest.approx(0.5)


def test_grid_refinement_rate_stability(eq4_params):
    # non-chaotic scenario: halving dt moves the fitted rate by < 1%
    from duffqubit import cumulative_phase, delta_q_semiclassical, simulate_classical
    from conftest import drive
    sd = make_spectral_density("one_over_f", 0.1, 0.01, 1.0)
    t_end = 150.0
    rates_by_dt = []
    for dt in (2.0 * np.pi / 64.0, np.pi / 64.0):
        traj = simulate_classical(eq4_params, drive(5.0), 0j, t_end, dt)
        dq = delta_q_semiclassical(traj, 0.03)
        phi = cumulative_phase(dq)
        corr = bath_correlation(sd, s_max=t_end, ds=dt)
        rates = gamma_delta(corr, 1.0, phi, delta_q=dq)
        evo = evolve_qubit(rates)
        rates_by_dt.append(average_rate(evo.t, evo.cxy, (30.0, t_end)))
    assert rates_by_dt[0] == pytest.approx(rates_by_dt[1], rel=0.01)


def test_gamma_delta_deterministic(eq4_params):
    from duffqubit import cumulative_phase, delta_q_semiclassical, simulate_classical
    from conftest import drive
    sd = make_spectral_density("ohmic", 1.0, 0.5, 1.5)
    traj = simulate_classical(eq4_params, drive(30.0), 0j, 50.0, 2.0 * np.pi / 64.0)
    dq = delta_q_semiclassical(traj, 0.03)
    phi = cumulative_phase(dq)
    corr = bath_correlation(sd, s_max=50.0, ds=phi.dt)
    r1 = gamma_delta(corr, 1.0, phi, delta_q=dq)
    r2 = gamma_delta(corr, 1.0, phi, delta_q=dq)
    assert np.array_equal(r1.gamma, r2.gamma)
    assert np.array_equal(r1.delta_omega, r2.delta_omega)
