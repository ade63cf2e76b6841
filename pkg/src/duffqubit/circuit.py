"""Map SCB + current-biased dc-SQUID circuit parameters to simulator inputs.

All circuit energies enter as ordinary frequencies in Hz (E/h); the
effective simulator parameters come out in units of the qubit splitting
omega_q = E_J - omega_g.  The SQUID mode frequency and quartic constant are
extracted by exact diagonalization of

    H_squid = Et_C n^2 - 2 Et_J cos(phi_e/2) cos(phi)

in a truncated charge basis, rather than from a perturbative expansion:
omega_o = E1 - E0 and lam = ((E1-E0) - (E2-E1))/3, the first-order inversion
of the level anharmonicity of -/+(lam/4)(a+a^dag)^4 (convention emitted in
the metadata).  The qubit-oscillator coupling is not derivable from the
printed circuit Hamiltonian and defaults to the simulation value 0.03.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericalError

__all__ = ["CircuitParams", "EffectiveParams", "RegimeCheck", "effective_params", "validate_regime"]

DEFAULT_G_QO = 0.03


@dataclass(frozen=True)
class CircuitParams:
    """Circuit energies/frequencies in Hz; phases in radians; n_g0 dimensionless.

    `n_g0` is the reduced gate-charge drive amplitude C_g V_g0 / 2e.
    `i_e_amp` is the bias-drive energy prefactor phi_0*I_e expressed in Hz.
    """

    e_c: float
    e_j: float
    et_c: float
    et_j: float
    phi_e: float = 0.0
    n_g0: float = 0.0
    omega_g: float = 0.0
    i_e_amp: float = 0.0
    i_e_freq: float = 0.0

    def __post_init__(self):
        for name in ("e_c", "e_j", "et_c", "et_j"):
            if getattr(self, name) < 0.0:
                raise ConfigError(f"{name} must be nonnegative")

    @property
    def et_j_eff(self) -> float:
        """Flux-tuned SQUID Josephson energy Et_J cos(phi_e/2)."""
        return self.et_j * math.cos(0.5 * self.phi_e)


@dataclass(frozen=True)
class EffectiveParams:
    omega_q: float      # always 1 (everything is scaled by omega_q)
    omega_o: float      # SQUID mode frequency in omega_q units
    lam: float          # quartic constant in omega_q units
    g_qo: float
    i0: float
    omega_d: float
    metadata: dict = field(repr=False, default_factory=dict)


@dataclass(frozen=True)
class RegimeCheck:
    name: str
    ratio: float
    passed: bool
    note: str = ""


def _squid_levels(cp: CircuitParams, n_charge: int) -> np.ndarray:
    """Lowest eigenvalues of the SQUID Hamiltonian in a (2n+1) charge basis."""
    if abs(math.cos(0.5 * cp.phi_e)) < 1e-12:
        raise ConfigError("degenerate SQUID well: cos(phi_e/2) = 0")
    dim = 2 * n_charge + 1
    n = np.arange(-n_charge, n_charge + 1, dtype=float)
    h = np.diag(cp.et_c * n**2)
    hop = -cp.et_j_eff  # -2*Et_J*cos(phi_e/2)*cos(phi): cos(phi) hops n by +-1 with weight 1/2
    idx = np.arange(dim - 1)
    h[idx, idx + 1] = hop
    h[idx + 1, idx] = hop
    return np.linalg.eigvalsh(h)


def effective_params(cp: CircuitParams, n_charge: int = 200,
                     g_qo_override: float = DEFAULT_G_QO) -> EffectiveParams:
    """Effective (omega_q, omega_o, lam, g_qo, I0, omega_d) in omega_q units."""
    omega_q_hz = cp.e_j - cp.omega_g
    if omega_q_hz <= 0.0:
        raise ConfigError(f"omega_q = E_J - omega_g = {omega_q_hz:.6g} Hz must be positive")
    ev = _squid_levels(cp, n_charge)
    ev2 = _squid_levels(cp, 2 * n_charge)
    drift = float(np.max(np.abs((ev[:3] - ev2[:3]) / np.maximum(np.abs(ev2[:3]), 1e-30))))
    if drift > 1e-8:
        raise NumericalError(
            f"charge-basis truncation not converged: doubling n_charge moves "
            f"E0..E2 by {drift:.2e} relative"
        )
    e0, e1, e2 = ev[:3]
    omega_o_hz = e1 - e0
    anharm_hz = (e1 - e0) - (e2 - e1)
    lam_hz = anharm_hz / 3.0
    # harmonic zero-point phase spread of the quadratic well (for the drive map)
    phi_zpf = (0.5 * math.sqrt(cp.et_c / cp.et_j_eff)) ** 0.5 if cp.et_j_eff > 0 else float("nan")
    i0_hz = math.sqrt(2.0) * cp.i_e_amp * phi_zpf
    harmonic_hz = 2.0 * math.sqrt(cp.et_c * cp.et_j_eff) if cp.et_j_eff > 0 else float("nan")

    meta = {
        "omega_q_hz": omega_q_hz,
        "omega_o_hz": omega_o_hz,
        "lam_hz": lam_hz,
        "anharmonicity_hz": anharm_hz,
        "harmonic_omega_o_hz": harmonic_hz,
        "phi_zpf": phi_zpf,
        "omega_o_over_omega_q": omega_o_hz / omega_q_hz,
        "levels_hz": [float(e0), float(e1), float(e2)],
        "n_charge": n_charge,
        "truncation_drift": drift,
        "conventions": {
            "lam": "coefficient of -/+(lam/4)(a+a_dag)^4 as in the Duffing Hamiltonian; "
                   "lam = ((E1-E0)-(E2-E1))/3 from first-order perturbation theory",
            "i0": "I(t)(a+a_dag)/sqrt(2) drive; I0 = sqrt(2)*i_e_amp*phi_zpf",
            "g_qo": "not derivable from the printed circuit Hamiltonian; "
                    f"override value {g_qo_override} used",
        },
    }
    return EffectiveParams(
        omega_q=1.0,
        omega_o=omega_o_hz / omega_q_hz,
        lam=lam_hz / omega_q_hz,
        g_qo=g_qo_override,
        i0=i0_hz / omega_q_hz,
        omega_d=cp.i_e_freq / omega_q_hz,
        metadata=meta,
    )


def validate_regime(cp: CircuitParams, threshold: float = 0.1) -> list[RegimeCheck]:
    """Evaluate the operating-regime inequalities with pass/fail ratios."""
    checks: list[RegimeCheck] = []
    omega_q_hz = cp.e_j - cp.omega_g
    if cp.e_j <= 0.0 or cp.et_c <= 0.0 or cp.et_j <= 0.0:
        checks.append(RegimeCheck(
            name="nonzero_energies", ratio=float("inf"), passed=False,
            note=f"zero energy among (e_j={cp.e_j}, et_c={cp.et_c}, et_j={cp.et_j})",
        ))
        return checks
    checks.append(RegimeCheck(
        name="positive_detuning", ratio=0.0 if omega_q_hz > 0 else float("inf"),
        passed=omega_q_hz > 0.0,
        note=f"omega_q = E_J - omega_g = {omega_q_hz:.6g} Hz",
    ))
    if omega_q_hz > 0.0:
        ratio = cp.n_g0 * cp.e_c / omega_q_hz
        checks.append(RegimeCheck(
            name="gate_drive_weak", ratio=ratio, passed=ratio <= threshold,
            note="C_g V_g0 E_C / 2e << omega_q keeps the SCB near its optimal point",
        ))
    cosw = abs(math.cos(0.5 * cp.phi_e))
    checks.append(RegimeCheck(
        name="nondegenerate_squid", ratio=0.0 if cosw > 1e-12 else float("inf"),
        passed=cosw > 1e-12, note=f"|cos(phi_e/2)| = {cosw:.3g}",
    ))
    if cp.et_j_eff > 0.0:
        ratio = cp.et_c / (2.0 * cp.et_j_eff)
        checks.append(RegimeCheck(
            name="squid_phase_regime", ratio=ratio, passed=ratio <= threshold,
            note="Et_C << 2 Et_J cos(phi_e/2) for the oscillator expansion",
        ))
    checks.append(RegimeCheck(
        name="zero_loop_flux_assumption", ratio=0.0, passed=True,
        note="model assumes zero external flux through the shared SCB-SQUID loop",
    ))
    return checks
