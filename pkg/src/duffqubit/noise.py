"""Bath spectral densities J(omega) on finite frequency domains.

All frequencies are angular and expressed in units of the qubit splitting
omega_q (omega_q == 1 internally).  A density is zero outside its domain
[omega_c1, omega_c2]; the edges are hard cutoffs.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import ConfigError, QuadratureError

__all__ = ["NoiseKind", "SpectralDensity", "make_spectral_density"]


class NoiseKind(str, enum.Enum):
    ONE_OVER_F = "one_over_f"
    OHMIC = "ohmic"
    SUB_OHMIC = "sub_ohmic"
    SUPER_OHMIC = "super_ohmic"
    TABULATED = "tabulated"


_POWER_LAW = {NoiseKind.OHMIC: 1.0, NoiseKind.SUB_OHMIC: 0.5, NoiseKind.SUPER_OHMIC: 2.0}


@dataclass(frozen=True)
class SpectralDensity:
    """Bath spectral density restricted to [domain_lo, domain_hi].

    For ONE_OVER_F the amplitude is A in J = A/omega (units of omega_q);
    for the Ohmic family it is a dimensionless prefactor of
    omega^p * exp(-omega/cutoff_scale) with p in {1, 1/2, 2}.
    """

    kind: NoiseKind
    amplitude: float
    domain_lo: float
    domain_hi: float
    cutoff_scale: float = 5.0
    table: tuple | None = None  # (omega array, J array) for TABULATED
    _table_arrays: tuple = field(init=False, repr=False, default=None)

    def __post_init__(self):
        if not (np.isfinite(self.domain_lo) and np.isfinite(self.domain_hi)):
            raise ConfigError("domain bounds must be finite")
        if not (0.0 < self.domain_lo < self.domain_hi):
            raise ConfigError(
                f"domain must satisfy 0 < lo < hi, got [{self.domain_lo}, {self.domain_hi}]"
            )
        if not (self.amplitude >= 0.0):
            raise ConfigError(f"amplitude must be nonnegative, got {self.amplitude}")
        if self.cutoff_scale <= 0.0:
            raise ConfigError("cutoff_scale must be positive")
        if self.kind == NoiseKind.TABULATED:
            if self.table is None:
                raise ConfigError("tabulated density requires a table")
            w = np.asarray(self.table[0], dtype=float)
            j = np.asarray(self.table[1], dtype=float)
            if w.ndim != 1 or w.shape != j.shape or w.size < 2:
                raise ConfigError("table must be two equal-length 1-d arrays")
            if not np.all(np.diff(w) > 0.0):
                raise ConfigError("table frequency grid must be strictly increasing")
            if np.any(j < 0.0):
                raise ConfigError("table values must be nonnegative")
            object.__setattr__(self, "_table_arrays", (w, j))
        elif self.table is not None:
            raise ConfigError(f"table given for non-tabulated kind {self.kind.value}")

    def evaluate(self, omega):
        """J(omega); vectorized, zero outside the domain."""
        w = np.asarray(omega, dtype=float)
        if not np.all(np.isfinite(w)):
            raise ConfigError("omega must be finite")
        inside = (w >= self.domain_lo) & (w <= self.domain_hi)
        if self.kind == NoiseKind.ONE_OVER_F:
            val = self.amplitude / np.where(inside, w, 1.0)
        elif self.kind == NoiseKind.TABULATED:
            tw, tj = self._table_arrays
            val = self.amplitude * np.interp(w, tw, tj, left=0.0, right=0.0)
        else:
            p = _POWER_LAW[self.kind]
            val = self.amplitude * np.where(inside, w, 1.0) ** p * np.exp(
                -np.where(inside, w, 0.0) / self.cutoff_scale
            )
        out = np.where(inside, val, 0.0)
        return float(out) if np.isscalar(omega) else out

    def total_power(self, rel_tol: float = 1e-10) -> float:
        """Integral of J over the domain (adaptive quadrature)."""
        if self.amplitude == 0.0:
            return 0.0
        if self.kind == NoiseKind.TABULATED:
            # exact for the piecewise-linear interpolant
            tw, tj = self._table_arrays
            lo = max(self.domain_lo, tw[0])
            hi = min(self.domain_hi, tw[-1])
            if hi <= lo:
                return 0.0
            grid = np.unique(np.concatenate([[lo, hi], tw[(tw > lo) & (tw < hi)]]))
            return float(np.trapezoid(self.evaluate(grid), grid))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err = integrate.quad(
                self.evaluate, self.domain_lo, self.domain_hi,
                epsabs=0.0, epsrel=rel_tol, limit=500,
            )
        if err > 10.0 * rel_tol * max(abs(val), 1e-300):
            raise QuadratureError(
                f"total_power quadrature did not converge (achieved {err/max(abs(val),1e-300):.2e} relative)",
                achieved=err,
            )
        return float(val)


def make_spectral_density(kind, amplitude, omega_c1, omega_c2, cutoff_scale=5.0, table=None) -> SpectralDensity:
    """Validated construction; `kind` may be a NoiseKind or its string value."""
    return SpectralDensity(
        kind=NoiseKind(kind),
        amplitude=float(amplitude),
        domain_lo=float(omega_c1),
        domain_hi=float(omega_c2),
        cutoff_scale=float(cutoff_scale),
        table=table,
    )
