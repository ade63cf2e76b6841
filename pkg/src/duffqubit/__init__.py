"""Decoherence suppression of a qubit by a driven chaotic Duffing oscillator."""

__version__ = "0.1.0"

from .noise import NoiseKind, SpectralDensity, make_spectral_density
from .duffing import (DuffingParams, DriveParams, QuarticSign, Regime, Signal,
                      Trajectory, LyapunovSettings, LyapunovEstimate,
                      simulate_classical, delta_q_semiclassical,
                      largest_lyapunov, classify_regime)
from .spectral import Spectrum, psd, cumulative_phase, correction_factor, f_from_sinusoids
from .fock import (FockConfig, EchoResult, build_shifted_hamiltonian,
                   evolve_echo, delta_q_quantum, convergence_check)
from .decoherence import (BathCorrelation, RateSeries, bath_correlation,
                          gamma_delta, gamma_unmodified, evolve_qubit,
                          average_rate, plus_state)
from .circuit import CircuitParams, EffectiveParams, effective_params, validate_regime
from .scenario import Scenario, load_config, apply_overrides
from .runner import run_scenario, sweep_drive, table_noises, run_lyapunov, run_echo

__all__ = [
    "NoiseKind", "SpectralDensity", "make_spectral_density",
    "DuffingParams", "DriveParams", "QuarticSign", "Regime", "Signal", "Trajectory",
    "LyapunovSettings", "LyapunovEstimate",
    "simulate_classical", "delta_q_semiclassical", "largest_lyapunov", "classify_regime",
    "Spectrum", "psd", "cumulative_phase", "correction_factor", "f_from_sinusoids",
    "FockConfig", "EchoResult", "build_shifted_hamiltonian", "evolve_echo",
    "delta_q_quantum", "convergence_check",
    "BathCorrelation", "RateSeries", "bath_correlation", "gamma_delta",
    "gamma_unmodified", "evolve_qubit", "average_rate", "plus_state",
    "CircuitParams", "EffectiveParams", "effective_params", "validate_regime",
    "Scenario", "load_config", "apply_overrides",
    "run_scenario", "sweep_drive", "table_noises", "run_lyapunov", "run_echo",
]
