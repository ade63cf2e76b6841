"""Scenario configuration: parsing, validation, canonical form, fingerprint.

A scenario is one YAML file with nested sections (all physical inputs in
omega_q units; an optional `si` block carries the SI scale used only for
reporting, and an optional `circuit` block feeds the circuit mapper).
The canonical dict form round-trips through the run manifest so that any
artifact can be reproduced from its manifest alone.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .duffing import DriveParams, DuffingParams, QuarticSign
from .errors import ConfigError
from .fock import FockConfig
from .noise import NoiseKind, SpectralDensity, make_spectral_density

__all__ = ["Scenario", "load_config", "apply_overrides"]

TAU = 2.0 * math.pi  # one qubit period in omega_q units

_DEFAULT_MAX_SAMPLES = 200_000


def _as_complex(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(f"expected number or [re, im] pair, got {value!r}")


def _complex_pair(z: complex) -> list[float]:
    return [z.real, z.imag]


@dataclass(frozen=True)
class Scenario:
    name: str
    noise: SpectralDensity
    duffing: DuffingParams
    drive: DriveParams
    alpha0: complex
    g_qo: float
    t_end: float
    dt: float
    rho0: np.ndarray
    fock: FockConfig | None = None
    segments: int = 8
    overlap: float = 0.5
    omega_cd: float | None = None        # None -> 10*max(|wc2-wq|, |wq-wc1|)
    fit_window: tuple[float, float] = (0.2, 1.0)   # fractions of t_end
    lyap_transient_periods: float = 50.0
    lyap_measure_periods: float = 200.0
    lyap_renorm_periods: float = 1.0
    lyap_seed: int = 0
    lyap_dt: float | None = None
    si_omega_q_hz: float | None = None
    max_samples: int = _DEFAULT_MAX_SAMPLES
    raw: dict = field(repr=False, default_factory=dict)

    @property
    def omega_q(self) -> float:
        return 1.0

    @property
    def n_samples(self) -> int:
        return int(round(self.t_end / self.dt)) + 1

    def omega_cd_value(self) -> float:
        if self.omega_cd is not None:
            return self.omega_cd
        return 10.0 * max(abs(self.noise.domain_hi - self.omega_q),
                          abs(self.omega_q - self.noise.domain_lo))

    def fit_window_times(self) -> tuple[float, float]:
        return self.fit_window[0] * self.t_end, self.fit_window[1] * self.t_end

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "noise": {
                "kind": self.noise.kind.value,
                "amplitude": self.noise.amplitude,
                "domain": [self.noise.domain_lo, self.noise.domain_hi],
                "cutoff": self.noise.cutoff_scale,
            },
            "duffing": {
                "omega_o": self.duffing.omega_o,
                "lam": self.duffing.lam,
                "gamma": self.duffing.gamma,
                "quartic_sign": self.duffing.quartic_sign.value,
                "alpha0": _complex_pair(self.alpha0),
            },
            "drive": {"i0": self.drive.i0, "omega_d": self.drive.omega_d,
                      "phase": self.drive.phase},
            "coupling": {"g_qo": self.g_qo},
            "times": {"t_end": self.t_end, "dt": self.dt},
            "qubit": {"rho0": [[_complex_pair(self.rho0[i, j]) for j in range(2)]
                               for i in range(2)]},
            "spectral": {"segments": self.segments, "overlap": self.overlap,
                         "omega_cd": self.omega_cd},
            "rates": {"fit_window": list(self.fit_window)},
            "lyapunov": {
                "transient_periods": self.lyap_transient_periods,
                "measure_periods": self.lyap_measure_periods,
                "renorm_periods": self.lyap_renorm_periods,
                "seed_offset": self.lyap_seed,
                "dt": self.lyap_dt,
            },
            "limits": {"max_samples": self.max_samples},
        }
        if self.noise.kind == NoiseKind.TABULATED:
            w, j = self.noise._table_arrays
            d["noise"]["table"] = [[float(a), float(b)] for a, b in zip(w, j)]
        if self.fock is not None:
            d["fock"] = {"dim": self.fock.dim, "dt": self.fock.dt,
                         "alpha0": _complex_pair(self.fock.alpha0)}
        if self.si_omega_q_hz is not None:
            d["si"] = {"omega_q_hz": self.si_omega_q_hz}
        return d

    def fingerprint(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    def with_updates(self, **section_updates) -> "Scenario":
        """New scenario from the canonical dict with nested-section updates."""
        d = self.to_dict()
        for key, sub in section_updates.items():
            if isinstance(sub, dict):
                d.setdefault(key, {}).update(sub)
            else:
                d[key] = sub
        return Scenario.from_dict(d)

    @staticmethod
    def from_dict(cfg: dict) -> "Scenario":
        if not isinstance(cfg, dict):
            raise ConfigError("config root must be a mapping")
        unknown = set(cfg) - {
            "name", "noise", "duffing", "drive", "coupling", "times", "qubit",
            "fock", "spectral", "rates", "lyapunov", "limits", "si", "circuit",
        }
        if unknown:
            raise ConfigError(f"unknown config sections: {sorted(unknown)}")

        noise_cfg = cfg.get("noise")
        if not noise_cfg:
            raise ConfigError("config requires a 'noise' section")
        domain = noise_cfg.get("domain")
        if not (isinstance(domain, (list, tuple)) and len(domain) == 2):
            raise ConfigError("noise.domain must be [lo, hi]")
        table = noise_cfg.get("table")
        if table is not None:
            arr = np.asarray(table, dtype=float)
            if arr.ndim != 2 or arr.shape[1] != 2:
                raise ConfigError("noise.table must be a list of [omega, J] pairs")
            table = (arr[:, 0], arr[:, 1])
        noise = make_spectral_density(
            noise_cfg.get("kind", "one_over_f"),
            noise_cfg.get("amplitude", 0.1),
            domain[0], domain[1],
            cutoff_scale=noise_cfg.get("cutoff", 5.0),
            table=table,
        )

        dcfg = cfg.get("duffing", {})
        duffing = DuffingParams(
            omega_o=float(dcfg.get("omega_o", 1.0)),
            lam=float(dcfg.get("lam", 0.25)),
            gamma=float(dcfg.get("gamma", 0.05)),
            quartic_sign=QuarticSign(dcfg.get("quartic_sign", "confining")),
        )
        alpha0 = _as_complex(dcfg.get("alpha0", 0.0))

        rcfg = cfg.get("drive", {})
        drive = DriveParams(
            i0=float(rcfg.get("i0", 0.0)),
            omega_d=float(rcfg.get("omega_d", 0.5)),
            phase=float(rcfg.get("phase", 0.0)),
        )

        tcfg = cfg.get("times", {})
        if "t_end_tau" in tcfg:
            if "t_end" in tcfg:
                raise ConfigError("give either times.t_end or times.t_end_tau, not both")
            t_end = float(tcfg["t_end_tau"]) * TAU
        else:
            t_end = float(tcfg.get("t_end", 200.0 * TAU))
        if "dt_tau" in tcfg:
            if "dt" in tcfg:
                raise ConfigError("give either times.dt or times.dt_tau, not both")
            dt = float(tcfg["dt_tau"]) * TAU
        else:
            dt = float(tcfg.get("dt", TAU / 64.0))
        if t_end <= 0.0 or dt <= 0.0:
            raise ConfigError("times.t_end and times.dt must be positive")

        max_samples = int(cfg.get("limits", {}).get("max_samples", _DEFAULT_MAX_SAMPLES))
        if t_end / dt > max_samples:
            raise ConfigError(
                f"t_end/dt = {t_end / dt:.3g} exceeds the max_samples guard "
                f"({max_samples}); raise limits.max_samples to override"
            )

        qcfg = cfg.get("qubit", {})
        rho_spec = qcfg.get("rho0", qcfg.get("initial_state", "plus"))
        if isinstance(rho_spec, str):
            if rho_spec != "plus":
                raise ConfigError(f"unknown initial state '{rho_spec}'")
            rho0 = np.full((2, 2), 0.5, dtype=complex)
        else:
            arr = np.asarray(rho_spec, dtype=object)
            if arr.shape != (2, 2):
                raise ConfigError("qubit.rho0 must be a 2x2 matrix")
            rho0 = np.array([[_as_complex(arr[i, j]) for j in range(2)] for i in range(2)])

        fcfg = cfg.get("fock")
        fock = None
        if fcfg is not None:
            fock = FockConfig(
                dim=int(fcfg.get("dim", 64)),
                dt=None if fcfg.get("dt") is None else float(fcfg["dt"]),
                alpha0=_as_complex(fcfg.get("alpha0", 0.0)),
            )

        scfg = cfg.get("spectral", {})
        ratecfg = cfg.get("rates", {})
        fw = ratecfg.get("fit_window", [0.2, 1.0])
        if not (0.0 <= fw[0] < fw[1] <= 1.0):
            raise ConfigError("rates.fit_window must be fractions 0 <= a < b <= 1")
        lcfg = cfg.get("lyapunov", {})
        sicfg = cfg.get("si", {})

        return Scenario(
            name=str(cfg.get("name", "scenario")),
            noise=noise,
            duffing=duffing,
            drive=drive,
            alpha0=alpha0,
            g_qo=float(cfg.get("coupling", {}).get("g_qo", 0.03)),
            t_end=t_end,
            dt=dt,
            rho0=rho0,
            fock=fock,
            segments=int(scfg.get("segments", 8)),
            overlap=float(scfg.get("overlap", 0.5)),
            omega_cd=None if scfg.get("omega_cd") is None else float(scfg["omega_cd"]),
            fit_window=(float(fw[0]), float(fw[1])),
            lyap_transient_periods=float(lcfg.get("transient_periods", 50.0)),
            lyap_measure_periods=float(lcfg.get("measure_periods", 200.0)),
            lyap_renorm_periods=float(lcfg.get("renorm_periods", 1.0)),
            lyap_seed=int(lcfg.get("seed_offset", 0)),
            lyap_dt=None if lcfg.get("dt") is None else float(lcfg["dt"]),
            si_omega_q_hz=None if sicfg.get("omega_q_hz") is None else float(sicfg["omega_q_hz"]),
            max_samples=max_samples,
            raw=cfg,
        )


def apply_overrides(cfg: dict, overrides: list[str]) -> dict:
    """Apply `section.key=value` overrides (values parsed as YAML scalars)."""
    out = json.loads(json.dumps(cfg))  # deep copy of plain data
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override '{item}' is not of the form path=value")
        path, value = item.split("=", 1)
        keys = path.strip().split(".")
        node = out
        for key in keys[:-1]:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override path '{path}' crosses a non-mapping")
        node[keys[-1]] = yaml.safe_load(value)
    return out


def load_config(path: str | Path) -> dict:
    """Load a scenario config (YAML) or a run manifest (JSON) as a config dict."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text()
    if path.suffix == ".json":
        data = json.loads(text)
    else:
        data = yaml.safe_load(text)
    if not isinstance(data, dict):
        raise ConfigError("config must parse to a mapping")
    if "scenario" in data and "artifacts" in data:   # run manifest
        return data["scenario"]
    return data
