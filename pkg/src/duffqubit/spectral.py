"""PSD estimation, cumulative modulation phase, and the correction factor F.

Spectra are one-sided in angular frequency and normalized so that
sum(S * d_omega) equals the signal's mean-square power (Welch, Hann window,
density scaling, no detrending).  With that normalization the suppression
factor of a modulation spectrum is F = exp(-integral S/omega^2 d_omega);
for a line spectrum sum_a (A_a^2/2) delta(omega - omega_a) this reduces to
exp(-sum_a A_a^2 / (2 omega_a^2)), which is the delta-line form quoted with
a -pi prefactor in conventions where the line PSD carries 1/(2 pi).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import signal as sps
from scipy.integrate import cumulative_trapezoid

from .duffing import Signal
from .errors import ConfigError

__all__ = [
    "Spectrum", "psd", "cumulative_phase", "correction_factor",
    "f_from_sinusoids", "band_power",
]


@dataclass(frozen=True)
class Spectrum:
    """One-sided PSD on an angular-frequency grid starting at zero."""

    omega: np.ndarray
    S: np.ndarray
    nperseg: int
    n_segments: int
    overlap: float
    window: str = "hann"

    @property
    def db(self) -> np.ndarray:
        """10*log10(S / S_ref) with S_ref = 1 in omega_q units."""
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(np.maximum(self.S, 0.0))

    @property
    def nyquist(self) -> float:
        return float(self.omega[-1])


def psd(sig: Signal, segments: int = 8, overlap: float = 0.5) -> Spectrum:
    """Welch PSD of a uniformly sampled signal.

    `segments` is the number of averaged windows at the given fractional
    `overlap`; the segment length follows from the record length.  The DC
    component is kept (no detrending) so that the Parseval normalization
    holds against the raw mean-square power.
    """
    n = len(sig.values)
    if segments < 1:
        raise ConfigError("segments must be >= 1")
    if not (0.0 <= overlap < 1.0):
        raise ConfigError("overlap must lie in [0, 1)")
    nperseg = int(n / ((segments - 1) * (1.0 - overlap) + 1.0))
    if nperseg < 8 or n < 4 * nperseg:
        raise ConfigError(
            f"signal too short: {n} samples gives segment length {nperseg} "
            "(need length >= 4*segment length)"
        )
    fs = 1.0 / sig.dt
    freq, pxx = sps.welch(
        sig.values, fs=fs, window="hann", nperseg=nperseg,
        noverlap=int(nperseg * overlap), detrend=False, scaling="density",
        return_onesided=True,
    )
    # angular-frequency grid: S_omega = S_f / (2 pi), omega = 2 pi f
    return Spectrum(omega=2.0 * math.pi * freq, S=pxx / (2.0 * math.pi),
                    nperseg=nperseg, n_segments=segments, overlap=overlap)


def cumulative_phase(delta_q: Signal) -> Signal:
    """Phi(t) = integral_0^t delta_q dt'' (trapezoidal, Phi(0) = 0)."""
    phi = cumulative_trapezoid(delta_q.values, dx=delta_q.dt, initial=0.0)
    return Signal(t=delta_q.t, values=phi, dt=delta_q.dt)


def band_power(spec: Spectrum, omega_lo: float, omega_hi: float) -> float:
    """Integrated PSD over [omega_lo, omega_hi] (trapezoid on the grid)."""
    if omega_hi <= omega_lo:
        raise ConfigError("band must have omega_hi > omega_lo")
    w = spec.omega
    mask = (w >= omega_lo) & (w <= omega_hi)
    if mask.sum() < 2:
        return 0.0
    return float(np.trapezoid(spec.S[mask], w[mask]))


def correction_factor(spec: Spectrum, omega_cd: float) -> float:
    """Suppression factor F from the modulation spectrum above omega_cd.

    Integrates S/omega^2 from omega_cd up to the Nyquist edge of the
    spectrum (the infinite upper limit is truncated there) and returns
    exp(-integral).  F lies in (0, 1].
    """
    if omega_cd <= 0.0:
        raise ConfigError("omega_cd must be positive")
    if omega_cd >= spec.nyquist:
        raise ConfigError(
            f"omega_cd={omega_cd:.6g} is at or beyond the Nyquist edge {spec.nyquist:.6g}"
        )
    w = spec.omega
    mask = w > omega_cd
    wm = np.concatenate([[omega_cd], w[mask]])
    sm = np.concatenate([[np.interp(omega_cd, w, spec.S)], spec.S[mask]])
    integral = np.trapezoid(sm / wm**2, wm)
    return float(np.exp(-integral))


def f_from_sinusoids(lines) -> float:
    """Closed-form F for a line spectrum of (amplitude, angular frequency) pairs.

    Valid for small modulation indices; warns above A/omega = 0.1 and
    rejects above 0.2.  Phases do not enter.
    """
    total = 0.0
    for amp, w in lines:
        if w <= 0.0:
            raise ConfigError("line frequencies must be positive")
        if amp < 0.0:
            raise ConfigError("line amplitudes must be nonnegative")
        ratio = amp / w
        if ratio > 0.2:
            raise ConfigError(f"modulation index A/omega = {ratio:.3g} exceeds the 0.2 validity guard")
        if ratio > 0.1:
            warnings.warn(
                f"modulation index A/omega = {ratio:.3g} above 0.1; F is first-order in (A/omega)^2",
                stacklevel=2,
            )
        total += amp * amp / (2.0 * w * w)
    return float(np.exp(-total))
