"""Truncated number-basis propagation of the oscillator echo factor f01(t).

The two branches evolve from a coherent state under the oscillator
Hamiltonian shifted by +/- g_qo * a^dag a; the echo factor is their overlap
f01(t) = <psi_+(t)|psi_-(t)> = e^{Sigma_q + i Theta_q}.  Propagation is
time-ordered with one exact unitary per step built from the instantaneous
Hamiltonian at the step midpoint, so each branch stays unitary at any step
size; accuracy in the drive's time dependence is guarded by the step-size
precondition and by `convergence_check`.  Oscillator damping is not part of
the echo (closed-system overlap); it acts only in the classical trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .duffing import DriveParams, DuffingParams, QuarticSign, Signal, simulate_classical
from .errors import ConfigError

__all__ = [
    "FockConfig", "EchoResult", "ConvergenceReport",
    "ladder", "coherent_state", "build_shifted_hamiltonian",
    "spectral_scale_estimate", "evolve_echo", "delta_q_quantum", "convergence_check",
]

_TAIL_MASS_LIMIT = 1e-12
_LEAK_LIMIT = 1e-6


@dataclass(frozen=True)
class FockConfig:
    dim: int
    dt: float | None = None        # None -> from the spectral-scale rule at evolve time
    alpha0: complex = 0j

    def __post_init__(self):
        if self.dim < 8:
            raise ConfigError("Fock dimension must be at least 8")
        tail = coherent_tail_mass(self.alpha0, self.dim)
        if tail > _TAIL_MASS_LIMIT:
            raise ConfigError(
                f"coherent-state tail mass {tail:.2e} beyond level {self.dim - 1} "
                f"exceeds {_TAIL_MASS_LIMIT:.0e}; increase dim for |alpha0|={abs(self.alpha0):.3g}"
            )


@dataclass(frozen=True)
class EchoResult:
    t: np.ndarray
    f01: np.ndarray           # complex overlap series
    sigma: np.ndarray         # ln|f01|
    theta: np.ndarray         # unwrapped arg f01
    dim: int
    dt: float
    converged: bool
    leak: float               # max population of the top two levels
    norm_drift: float         # max per-step deviation of either branch norm from 1

    @property
    def m(self) -> np.ndarray:
        """Loschmidt echo M(t) = |f01|^2."""
        return np.abs(self.f01) ** 2


@dataclass(frozen=True)
class ConvergenceReport:
    converged: bool
    max_df01: float
    dim: int
    dim_refined: int
    leak: float
    leak_refined: float


def ladder(dim: int) -> np.ndarray:
    a = np.zeros((dim, dim))
    n = np.arange(1, dim)
    a[n - 1, n] = np.sqrt(n)
    return a


def coherent_tail_mass(alpha0: complex, dim: int) -> float:
    """Poisson weight of a coherent state at levels >= dim-1."""
    mu = abs(alpha0) ** 2
    if mu == 0.0:
        return 0.0
    return float(stats.poisson.sf(dim - 2, mu))


def coherent_state(alpha0: complex, dim: int) -> np.ndarray:
    if alpha0 == 0:
        v = np.zeros(dim, dtype=complex)
        v[0] = 1.0
        return v
    n = np.arange(dim)
    from scipy.special import gammaln
    log_mag = n * math.log(abs(alpha0)) - 0.5 * gammaln(n + 1.0) - 0.5 * abs(alpha0) ** 2
    v = np.exp(log_mag) * np.exp(1j * n * np.angle(alpha0))
    return v / np.linalg.norm(v)


def _quartic_sign(params: DuffingParams) -> float:
    return -1.0 if params.quartic_sign == QuarticSign.AS_WRITTEN else 1.0


def build_shifted_hamiltonian(params: DuffingParams, g_shift: float, t: float,
                              drive: DriveParams, dim: int) -> np.ndarray:
    """Dense symmetric matrix of H_Duf + g_shift * a^dag a at time t."""
    a = ladder(dim)
    x = a + a.T
    nvec = np.arange(dim, dtype=float)
    x2 = x @ x
    h = _quartic_sign(params) * (params.lam / 4.0) * (x2 @ x2)
    h += np.diag((params.omega_o + g_shift) * nvec)
    drive_t = drive.i0 * math.cos(drive.omega_d * t + drive.phase)
    h -= (drive_t / math.sqrt(2.0)) * x
    return h


def spectral_scale_estimate(params: DuffingParams, drive: DriveParams, g_qo: float,
                            cfg: FockConfig) -> float:
    """Energy scale of the dynamically occupied sector.

    Uses a short undamped classical probe to bound the occupied excitation
    number n_bar, then sums the Hamiltonian term magnitudes at that
    occupation.  This (not the truncated-matrix norm, which grows as dim^2
    from the quartic) sets the time-ordering step size.
    """
    probe_params = DuffingParams(omega_o=params.omega_o, lam=params.lam, gamma=0.0,
                                 quartic_sign=params.quartic_sign)
    t_probe = 40.0 * math.pi / drive.omega_d
    dt_probe = 2.0 * math.pi / (64.0 * max(params.omega_o, drive.omega_d))
    try:
        traj = simulate_classical(probe_params, drive, cfg.alpha0, t_probe, dt_probe)
        n_mean = float(np.mean(np.abs(traj.alpha) ** 2))
    except Exception:
        n_mean = abs(cfg.alpha0) ** 2
    n_bar = 1.1 * n_mean + 2.0 * math.sqrt(max(n_mean, 0.0)) + abs(cfg.alpha0) ** 2 + 2.0
    return (
        params.omega_o * (n_bar + 1.0)
        + abs(params.lam) / 4.0 * (6.0 * n_bar**2 + 6.0 * n_bar + 3.0)
        + drive.i0 * math.sqrt(2.0 * (n_bar + 1.0))
        + abs(g_qo) * (n_bar + 1.0)
    )


def max_step(params: DuffingParams, drive: DriveParams, g_qo: float, cfg: FockConfig) -> float:
    return 2.0 * math.pi / (100.0 * spectral_scale_estimate(params, drive, g_qo, cfg))


def evolve_echo(params: DuffingParams, drive: DriveParams, g_qo: float,
                cfg: FockConfig, t_end: float) -> EchoResult:
    """Propagate both branches and record f01(t) on the step grid.

    The result is flagged non-converged (never silently truncated) if the
    population of the top two basis levels of either branch exceeds 1e-6.
    """
    if t_end <= 0.0:
        raise ConfigError("t_end must be positive")
    dt_max = max_step(params, drive, g_qo, cfg)
    dt = cfg.dt if cfg.dt is not None else dt_max
    if dt <= 0.0 or dt > dt_max * (1.0 + 1e-9):
        raise ConfigError(
            f"dt={dt:.3e} violates dt <= 2*pi/(100*spectral scale) = {dt_max:.3e}"
        )
    steps = max(1, int(math.ceil(t_end / dt - 1e-9)))
    dt = t_end / steps

    dim = cfg.dim
    a = ladder(dim)
    x = a + a.T
    x2 = x @ x
    nvec = np.arange(dim, dtype=float)
    h_quartic = _quartic_sign(params) * (params.lam / 4.0) * (x2 @ x2)
    h0_p = h_quartic + np.diag((params.omega_o + g_qo) * nvec)
    h0_m = h_quartic + np.diag((params.omega_o - g_qo) * nvec)
    drive_scale = -1.0 / math.sqrt(2.0)

    psi = [coherent_state(cfg.alpha0, dim), coherent_state(cfg.alpha0, dim)]
    h0 = [h0_p, h0_m]

    f01 = np.empty(steps + 1, dtype=complex)
    f01[0] = np.vdot(psi[0], psi[1])
    leak = 0.0
    norm_drift = 0.0
    for k in range(steps):
        t_mid = (k + 0.5) * dt
        c = drive_scale * drive.i0 * math.cos(drive.omega_d * t_mid + drive.phase)
        for b in range(2):
            h = h0[b] + c * x
            w, v = np.linalg.eigh(h)
            amp = v.T @ psi[b]
            psi[b] = (v * np.exp(-1j * w * dt)) @ amp
            norm_drift = max(norm_drift, abs(float(np.vdot(psi[b], psi[b]).real) - 1.0))
            top = float(np.sum(np.abs(psi[b][-2:]) ** 2))
            if top > leak:
                leak = top
        f01[k + 1] = np.vdot(psi[0], psi[1])

    t = np.arange(steps + 1) * dt
    mag = np.abs(f01)
    sigma = np.log(np.maximum(mag, 1e-300))
    theta = np.unwrap(np.angle(f01))
    theta = theta - theta[0]
    return EchoResult(t=t, f01=f01, sigma=sigma, theta=theta, dim=dim, dt=dt,
                      converged=bool(leak <= _LEAK_LIMIT), leak=float(leak),
                      norm_drift=float(norm_drift))


def delta_q_quantum(echo: EchoResult) -> Signal:
    """delta_q(t) = d Theta_q / dt by central differences (one-sided ends)."""
    if not echo.converged:
        raise ConfigError(
            f"echo not converged (truncation leak {echo.leak:.2e} > {_LEAK_LIMIT:.0e}); "
            "refusing to differentiate its phase"
        )
    d = np.gradient(echo.theta, echo.dt, edge_order=1)
    return Signal(t=echo.t, values=d, dt=echo.dt)


def convergence_check(params: DuffingParams, drive: DriveParams, g_qo: float,
                      cfg: FockConfig, t_end: float) -> ConvergenceReport:
    """Rerun at ceil(1.25*dim) and compare f01; converged iff max|df01| < 1e-6."""
    dim2 = int(math.ceil(1.25 * cfg.dim))
    base = evolve_echo(params, drive, g_qo, cfg, t_end)
    cfg2 = FockConfig(dim=dim2, dt=base.dt, alpha0=cfg.alpha0)
    refined = evolve_echo(params, drive, g_qo, cfg2, t_end)
    n = min(len(base.f01), len(refined.f01))
    max_df = float(np.max(np.abs(base.f01[:n] - refined.f01[:n])))
    return ConvergenceReport(converged=bool(max_df < 1e-6), max_df01=max_df,
                             dim=cfg.dim, dim_refined=dim2,
                             leak=base.leak, leak_refined=refined.leak)
