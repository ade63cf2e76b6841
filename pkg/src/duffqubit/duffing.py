"""Classical (mean-field) driven damped Duffing oscillator.

The oscillator Hamiltonian is omega_o*a^dag*a -/+ (lam/4)(a+a^dag)^4
- I(t)(a+a^dag)/sqrt(2) with drive I(t) = I0*cos(omega_d*t + phase); the
sign of the quartic term is selected by `QuarticSign` (AS_WRITTEN = minus,
an unbounded potential; CONFINING = plus, bounded).  The Heisenberg
mean-field equation integrated here is

    dalpha/dt = -i*omega_o*alpha + i*s*lam*(2 Re alpha)^3
                + i*I(t)/sqrt(2) - (gamma/2)*alpha

with s = +1 for AS_WRITTEN and s = -1 for CONFINING (the s sign follows
from [a, (a+a^dag)^4] = 4(a+a^dag)^3 applied to the Hamiltonian quartic).
Everything is in units of the qubit splitting omega_q.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, EscapedTrajectoryError, NumericalError

__all__ = [
    "QuarticSign", "DuffingParams", "DriveParams", "Trajectory", "Signal",
    "Regime", "LyapunovSettings", "LyapunovEstimate",
    "simulate_classical", "delta_q_semiclassical", "largest_lyapunov",
    "classify_regime",
]

TWO_PI = 2.0 * math.pi


class QuarticSign(str, enum.Enum):
    AS_WRITTEN = "as_written"   # -(lam/4) X^4 in the Hamiltonian (unbounded)
    CONFINING = "confining"     # +(lam/4) X^4 (bounded; reproduces the chaotic transition)


class Regime(str, enum.Enum):
    PERIODIC = "periodic"
    CHAOTIC = "chaotic"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class DuffingParams:
    omega_o: float = 1.0
    lam: float = 0.25
    gamma: float = 0.05
    quartic_sign: QuarticSign = QuarticSign.CONFINING

    def __post_init__(self):
        if self.omega_o <= 0.0:
            raise ConfigError("omega_o must be positive")
        if self.gamma < 0.0:
            raise ConfigError("gamma must be nonnegative")
        object.__setattr__(self, "quartic_sign", QuarticSign(self.quartic_sign))


@dataclass(frozen=True)
class DriveParams:
    i0: float
    omega_d: float = 0.5
    phase: float = 0.0

    def __post_init__(self):
        if self.i0 < 0.0:
            raise ConfigError("drive amplitude I0 must be nonnegative")
        if self.omega_d <= 0.0:
            raise ConfigError("drive frequency omega_d must be positive")


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    alpha: np.ndarray
    params: DuffingParams
    drive: DriveParams
    dt: float
    escaped: float | None = None  # escape time, or None if bounded throughout


@dataclass(frozen=True)
class Signal:
    """Uniformly sampled real time series."""

    t: np.ndarray
    values: np.ndarray
    dt: float


def _eom_sign(params: DuffingParams) -> float:
    # Hamiltonian quartic -(lam/4)X^4 (AS_WRITTEN) gives +i*lam*X^3 in dalpha/dt.
    return 1.0 if params.quartic_sign == QuarticSign.AS_WRITTEN else -1.0


def max_step(params: DuffingParams, drive: DriveParams) -> float:
    """Largest step admitted by the fixed-step integrator precondition."""
    return TWO_PI / (50.0 * max(params.omega_o, drive.omega_d))


def simulate_classical(params: DuffingParams, drive: DriveParams, alpha0: complex,
                       t_end: float, dt: float, escape_bound: float = 1e3) -> Trajectory:
    """Integrate the mean-field equation with fixed-step RK4.

    Returns every step up to t_end, or up to the escape sample if |alpha|
    exceeds `escape_bound` (the trajectory is then truncated and flagged,
    not an error).  Identical inputs produce bit-identical output.
    """
    if t_end <= 0.0:
        raise ConfigError("t_end must be positive")
    if dt <= 0.0 or dt > max_step(params, drive) * (1.0 + 1e-12):
        raise ConfigError(
            f"dt={dt} violates dt <= 2*pi/(50*max(omega_o, omega_d)) = {max_step(params, drive):.6g}"
        )
    n = int(round(t_end / dt))
    w = params.omega_o
    lam3 = _eom_sign(params) * params.lam
    hg = 0.5 * params.gamma
    i0 = drive.i0
    wd = drive.omega_d
    ph = drive.phase
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    cos = math.cos

    a = complex(alpha0)
    out = np.empty(n + 1, dtype=complex)
    out[0] = a
    escaped = None
    filled = n
    half = 0.5 * dt
    sixth = dt / 6.0
    for k in range(n):
        t = k * dt

        x = 2.0 * a.real
        k1 = (-hg - 1j * w) * a + 1j * (lam3 * x * x * x + i0 * cos(wd * t + ph) * inv_sqrt2)
        b = a + half * k1
        x = 2.0 * b.real
        k2 = (-hg - 1j * w) * b + 1j * (lam3 * x * x * x + i0 * cos(wd * (t + half) + ph) * inv_sqrt2)
        b = a + half * k2
        x = 2.0 * b.real
        k3 = (-hg - 1j * w) * b + 1j * (lam3 * x * x * x + i0 * cos(wd * (t + half) + ph) * inv_sqrt2)
        b = a + dt * k3
        x = 2.0 * b.real
        k4 = (-hg - 1j * w) * b + 1j * (lam3 * x * x * x + i0 * cos(wd * (t + dt) + ph) * inv_sqrt2)

        a = a + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        out[k + 1] = a
        if not (abs(a) <= escape_bound):  # catches NaN as well
            escaped = (k + 1) * dt
            filled = k + 1
            break

    t_grid = np.arange(filled + 1) * dt
    return Trajectory(t=t_grid, alpha=out[:filled + 1], params=params, drive=drive,
                      dt=dt, escaped=escaped)


def delta_q_semiclassical(traj: Trajectory, g_qo: float) -> Signal:
    """Qubit frequency-shift signal delta_q(t) = g_qo * |alpha(t)|^2."""
    if g_qo < 0.0:
        raise ConfigError("g_qo must be nonnegative")
    if traj.escaped is not None:
        raise EscapedTrajectoryError(
            f"trajectory escaped at t={traj.escaped:.6g}; no delta_q signal",
            escape_time=traj.escaped,
        )
    vals = g_qo * np.abs(traj.alpha) ** 2
    return Signal(t=traj.t, values=vals, dt=traj.dt)


@dataclass(frozen=True)
class LyapunovSettings:
    """Benettin two-trajectory estimator settings (times in drive periods)."""

    transient_periods: float = 50.0
    measure_periods: float = 200.0
    renorm_periods: float = 1.0
    seed_offset: int = 0
    offset_norm: float = 1e-8
    dt: float | None = None  # None -> drive period / 128, capped by the RK4 precondition


@dataclass(frozen=True)
class LyapunovEstimate:
    exponent: float
    stderr: float
    n_blocks: int


def _rk4_steps(a, t, n, dt, w, lam3, hg, i0, wd, ph):
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    cos = math.cos
    half = 0.5 * dt
    sixth = dt / 6.0
    for _ in range(n):
        x = 2.0 * a.real
        k1 = (-hg - 1j * w) * a + 1j * (lam3 * x * x * x + i0 * cos(wd * t + ph) * inv_sqrt2)
        b = a + half * k1
        x = 2.0 * b.real
        k2 = (-hg - 1j * w) * b + 1j * (lam3 * x * x * x + i0 * cos(wd * (t + half) + ph) * inv_sqrt2)
        b = a + half * k2
        x = 2.0 * b.real
        k3 = (-hg - 1j * w) * b + 1j * (lam3 * x * x * x + i0 * cos(wd * (t + half) + ph) * inv_sqrt2)
        b = a + dt * k3
        x = 2.0 * b.real
        k4 = (-hg - 1j * w) * b + 1j * (lam3 * x * x * x + i0 * cos(wd * (t + dt) + ph) * inv_sqrt2)
        a = a + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        t += dt
    return a, t


def largest_lyapunov(params: DuffingParams, drive: DriveParams,
                     settings: LyapunovSettings = LyapunovSettings(),
                     alpha0: complex = 0j, escape_bound: float = 1e3) -> LyapunovEstimate:
    """Benettin estimate of the largest Lyapunov exponent (units of omega_q).

    A reference and an offset trajectory (separation `offset_norm`, direction
    seeded by `seed_offset`) are integrated together; the separation is
    renormalized every `renorm_periods` drive periods and the exponent is the
    mean log-stretch rate over blocks, with the standard error across blocks.
    """
    if settings.transient_periods < 50.0:
        raise ConfigError("t_transient must cover at least 50 drive periods")
    if settings.measure_periods < 200.0:
        raise ConfigError("t_measure must cover at least 200 drive periods")
    period = TWO_PI / drive.omega_d
    dt = settings.dt if settings.dt is not None else min(period / 128.0, max_step(params, drive))
    if dt <= 0.0 or dt > max_step(params, drive) * (1.0 + 1e-12):
        raise ConfigError("lyapunov dt violates the integrator precondition")

    n_renorm = max(1, int(round(settings.renorm_periods * period / dt)))
    n_blocks = int(round(settings.measure_periods * period / (n_renorm * dt)))
    n_trans = int(round(settings.transient_periods * period / dt))

    w = params.omega_o
    lam3 = _eom_sign(params) * params.lam
    hg = 0.5 * params.gamma
    i0, wd, ph = drive.i0, drive.omega_d, drive.phase

    a = complex(alpha0)
    t = 0.0
    a, t = _rk4_steps(a, t, n_trans, dt, w, lam3, hg, i0, wd, ph)
    if not (abs(a) <= escape_bound):
        raise EscapedTrajectoryError("reference trajectory escaped during transient", escape_time=t)

    rng = np.random.default_rng(settings.seed_offset)
    theta = rng.uniform(0.0, TWO_PI)
    d0 = settings.offset_norm
    b = a + d0 * complex(math.cos(theta), math.sin(theta))

    rates = np.empty(n_blocks)
    block_time = n_renorm * dt
    for i in range(n_blocks):
        a, _ = _rk4_steps(a, t, n_renorm, dt, w, lam3, hg, i0, wd, ph)
        b, t = _rk4_steps(b, t, n_renorm, dt, w, lam3, hg, i0, wd, ph)
        if not (abs(a) <= escape_bound and abs(b) <= escape_bound):
            raise EscapedTrajectoryError("trajectory escaped during measurement", escape_time=t)
        d1 = abs(b - a)
        if d1 == 0.0:
            raise NumericalError("offset trajectory collapsed onto the reference")
        rates[i] = math.log(d1 / d0) / block_time
        b = a + (b - a) * (d0 / d1)

    exponent = float(np.mean(rates))
    stderr = float(np.std(rates, ddof=1) / math.sqrt(n_blocks)) if n_blocks > 1 else 0.0
    return LyapunovEstimate(exponent=exponent, stderr=stderr, n_blocks=n_blocks)


def classify_regime(exponent: float, stderr: float) -> Regime:
    """Chaotic/periodic at the two-sigma level, else indeterminate."""
    if exponent - 2.0 * stderr > 0.0:
        return Regime.CHAOTIC
    if exponent + 2.0 * stderr < 0.0:
        return Regime.PERIODIC
    return Regime.INDETERMINATE
