"""Scenario orchestration: the full pipeline, drive sweeps, noise tables.

Artifacts are CSV (comma-separated, header row, 17 significant digits, LF
endings) plus a JSON run manifest holding the fully resolved scenario and
the artifact hashes; a run is reproducible bit-for-bit from its manifest.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import math
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .decoherence import (RateSeries, average_rate, bath_correlation,
                          evolve_qubit, gamma_delta, gamma_unmodified)
from .duffing import (LyapunovEstimate, LyapunovSettings, Signal, classify_regime,
                      delta_q_semiclassical, largest_lyapunov, simulate_classical)
from .errors import ConfigError, NumericalError, StageError
from .fock import FockConfig, evolve_echo
from .fock import max_step as fock_max_step
from .scenario import Scenario
from .spectral import correction_factor, cumulative_phase, psd

__all__ = ["RunResult", "run_scenario", "sweep_drive", "table_noises",
           "run_lyapunov", "run_echo"]


# ---------------------------------------------------------------------------
# artifact helpers
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path: Path, header: list[str], columns: list) -> None:
    rows = zip(*columns) if columns else []
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_row_csv(path: Path, rows: list[dict], header: list[str]) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row.get(k, "")) for k in header) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


@contextmanager
def _stage(name: str):
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


@dataclass(frozen=True)
class RunResult:
    out_dir: Path
    summary: dict
    artifacts: dict


_PLOT_SCRIPT = """\
#!/usr/bin/env python3
# Plots the CSV artifacts written next to this script.
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))

def load(name):
    path = os.path.join(here, name)
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        return None
    return {k: [float(r[k]) if r[k] not in ("", "nan") else float("nan") for r in rows]
            for k in rows[0] if all(_isnum(r[k]) for r in rows)}

def _isnum(s):
    try:
        float(s)
        return True
    except ValueError:
        return False

dec = load("decoherence.csv")
nat = load("natural.csv")
if dec and nat:
    fig, ax = plt.subplots(figsize=(6, 4))
    c0 = dec["cxy"][0] or 1.0
    ax.plot(dec["t"], [c / c0 for c in dec["cxy"]], label="modified")
    ax.plot(nat["t"], [c / c0 for c in nat["cxy"]], "--", label="natural")
    ax.set_xlabel("t [1/omega_q]")
    ax.set_ylabel("C_xy / C_xy(0)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(here, "coherence.png"), dpi=150)

spec = load("spectrum.csv")
if spec:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(spec["omega"][1:], spec["db"][1:])
    ax.set_xlabel("omega [omega_q]")
    ax.set_ylabel("S [dB]")
    ax.set_xscale("log")
    fig.tight_layout()
    fig.savefig(os.path.join(here, "spectrum.png"), dpi=150)

sw = load("sweep.csv")
if sw:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(sw["i0"], sw["gammabar_qm"], "o-", label="modified")
    ax.semilogy(sw["i0"], sw["gammabar_q0"], "--", label="natural")
    ax2 = ax.twinx()
    ax2.plot(sw["i0"], sw["lyapunov"], "g-.", label="lyapunov")
    ax2.set_ylabel("largest Lyapunov exponent")
    ax.set_xlabel("I0 [omega_q]")
    ax.set_ylabel("decoherence rate [omega_q]")
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(os.path.join(here, "sweep.png"), dpi=150)

print("plots written to", here)
"""


# ---------------------------------------------------------------------------
# pipeline pieces shared by the verbs
# ---------------------------------------------------------------------------

def _modified_rates(sc: Scenario, corr=None):
    """trajectory -> delta_q -> Phi -> Gamma/Delta under the modulation."""
    with _stage("simulate_classical"):
        traj = simulate_classical(sc.duffing, sc.drive, sc.alpha0, sc.t_end, sc.dt)
    with _stage("delta_q_semiclassical"):
        dq = delta_q_semiclassical(traj, sc.g_qo)
    with _stage("cumulative_phase"):
        phi = cumulative_phase(dq)
    if corr is None:
        with _stage("bath_correlation"):
            corr = bath_correlation(sc.noise, s_max=sc.t_end, ds=sc.dt)
    with _stage("gamma_delta"):
        rates = gamma_delta(corr, sc.omega_q, phi, delta_q=dq)
    return traj, dq, phi, corr, rates


def _echo_magnitude(sc: Scenario, n_samples: int):
    """Loschmidt echo M(t) on the scenario grid (opt-in channel)."""
    cfg = sc.fock
    dt_cap = fock_max_step(sc.duffing, sc.drive, sc.g_qo, cfg)
    refine = max(1, int(math.ceil(sc.dt / dt_cap - 1e-12)))
    dt_q = sc.dt / refine
    cfg_run = FockConfig(dim=cfg.dim, dt=dt_q, alpha0=cfg.alpha0)
    echo = evolve_echo(sc.duffing, sc.drive, sc.g_qo, cfg_run, sc.t_end)
    if not echo.converged:
        raise NumericalError(
            f"echo truncation leak {echo.leak:.2e} exceeds 1e-6 at dim={cfg.dim}; "
            "increase fock.dim"
        )
    m = echo.m[::refine]
    if len(m) != n_samples:
        raise NumericalError("echo grid did not nest into the scenario grid")
    return echo, m


def _fit_rate(sc: Scenario, t, cxy) -> float:
    return average_rate(t, cxy, sc.fit_window_times())


def _si_block(sc: Scenario, gammabar_qm: float, gammabar_q0: float) -> dict:
    """SI reporting: rates in s^-1 (rho01 convention) and T1=T2 in us."""
    if sc.si_omega_q_hz is None:
        return {}
    w_rad = 2.0 * math.pi * sc.si_omega_q_hz
    qm = 0.5 * gammabar_qm * w_rad
    q0 = 0.5 * gammabar_q0 * w_rad
    return {
        "si_gammabar_qm_hz": qm,
        "si_gammabar_q0_hz": q0,
        "si_t1t2_us": 1e6 / qm if qm > 0 else float("nan"),
    }


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------

def run_scenario(sc: Scenario, out_dir: str | Path) -> RunResult:
    """Full pipeline; emits CSV artifacts, a manifest, and a plot script."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(name: str, writer) -> None:
        path = out / name
        writer(path)
        written.append(path)

    try:
        traj, dq, phi, corr, rates = _modified_rates(sc)
        with _stage("psd"):
            spectrum = psd(dq, segments=sc.segments, overlap=sc.overlap)
        with _stage("gamma_unmodified"):
            rates0 = gamma_unmodified(sc.noise, sc.omega_q, traj.t)

        m = None
        echo = None
        if sc.fock is not None:
            with _stage("echo"):
                echo, m = _echo_magnitude(sc, len(traj.t))

        with _stage("evolve_qubit"):
            evo = evolve_qubit(rates, m=m, rho0=sc.rho0, omega_q=sc.omega_q)
            evo0 = evolve_qubit(rates0, m=None, rho0=sc.rho0, omega_q=sc.omega_q)
        with _stage("average_rate"):
            gm = _fit_rate(sc, evo.t, evo.cxy)
            g0 = _fit_rate(sc, evo0.t, evo0.cxy)

        omega_cd = sc.omega_cd_value()
        if 0.0 < omega_cd < spectrum.nyquist:
            f_pred = correction_factor(spectrum, omega_cd)
        else:
            f_pred = float("nan")

        summary = {
            "name": sc.name,
            "scenario_hash": sc.fingerprint(),
            "gammabar_qm": gm,
            "gammabar_q0": g0,
            "suppression_ratio": gm / g0 if g0 != 0 else float("nan"),
            "gammabar_qm_rho01": 0.5 * gm,
            "gammabar_q0_rho01": 0.5 * g0,
            "f_predicted": f_pred,
            "omega_cd": omega_cd,
            "m_channel": "echo" if m is not None else "excluded",
            "negative_gamma": evo.negative_gamma,
            "escaped": traj.escaped if traj.escaped is not None else "",
        }
        summary.update(_si_block(sc, gm, g0))

        with _stage("artifacts"):
            emit("trajectory.csv", lambda p: write_csv(
                p, ["t", "re_alpha", "im_alpha"],
                [traj.t, traj.alpha.real, traj.alpha.imag]))
            emit("delta_q.csv", lambda p: write_csv(p, ["t", "value"], [dq.t, dq.values]))
            emit("spectrum.csv", lambda p: write_csv(
                p, ["omega", "s", "db"], [spectrum.omega, spectrum.S, spectrum.db]))
            emit("decoherence.csv", lambda p: write_csv(
                p, ["t", "gamma", "delta_omega", "cxy"],
                [evo.t, rates.gamma, rates.delta_omega, evo.cxy]))
            emit("natural.csv", lambda p: write_csv(
                p, ["t", "gamma", "delta_omega", "cxy"],
                [evo0.t, rates0.gamma, rates0.delta_omega, evo0.cxy]))
            if echo is not None:
                emit("echo.csv", lambda p: write_csv(
                    p, ["t", "re_f01", "im_f01", "sigma", "theta"],
                    [echo.t, echo.f01.real, echo.f01.imag, echo.sigma, echo.theta]))
            emit("summary.csv", lambda p: write_row_csv(p, [summary], list(summary)))
            emit("plot_results.py", lambda p: p.write_text(_PLOT_SCRIPT))

            artifacts = {p.name: _sha256(p) for p in written}
            manifest = {
                "format": 1,
                "package": {"name": "duffqubit", "version": __version__},
                "scenario": sc.to_dict(),
                "artifacts": artifacts,
            }
            mpath = out / "manifest.json"
            mpath.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
            written.append(mpath)
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        raise
    return RunResult(out_dir=out, summary=summary, artifacts=artifacts)


def _lyap_settings(sc: Scenario) -> LyapunovSettings:
    return LyapunovSettings(
        transient_periods=sc.lyap_transient_periods,
        measure_periods=sc.lyap_measure_periods,
        renorm_periods=sc.lyap_renorm_periods,
        seed_offset=sc.lyap_seed,
        dt=sc.lyap_dt if sc.lyap_dt is not None
        else (2.0 * math.pi / sc.drive.omega_d) / 256.0,
    )


def run_lyapunov(sc: Scenario) -> LyapunovEstimate:
    with _stage("lyapunov"):
        return largest_lyapunov(sc.duffing, sc.drive, _lyap_settings(sc), alpha0=sc.alpha0)


def run_echo(sc: Scenario, out_dir: str | Path) -> RunResult:
    """Echo-only pipeline; emits echo.csv and a manifest."""
    if sc.fock is None:
        raise ConfigError("echo run requires a 'fock' section in the config")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with _stage("echo"):
        echo, _ = _echo_magnitude(sc, sc.n_samples)
    path = out / "echo.csv"
    write_csv(path, ["t", "re_f01", "im_f01", "sigma", "theta"],
              [echo.t, echo.f01.real, echo.f01.imag, echo.sigma, echo.theta])
    summary = {"name": sc.name, "scenario_hash": sc.fingerprint(),
               "dim": echo.dim, "dt_q": echo.dt, "leak": echo.leak,
               "norm_drift": echo.norm_drift, "converged": echo.converged}
    spath = out / "summary.csv"
    write_row_csv(spath, [summary], list(summary))
    artifacts = {p.name: _sha256(p) for p in (path, spath)}
    manifest = {"format": 1, "package": {"name": "duffqubit", "version": __version__},
                "scenario": sc.to_dict(), "artifacts": artifacts}
    (out / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return RunResult(out_dir=out, summary=summary, artifacts=artifacts)


_SWEEP_HEADER = [
    "i0", "gammabar_qm", "gammabar_q0", "suppression_ratio",
    "lyapunov", "lyapunov_stderr", "regime", "f_predicted", "status", "error",
]


def _sweep_point(sc: Scenario, i0: float, corr, gammabar_q0: float) -> dict:
    row = {"i0": i0, "gammabar_q0": gammabar_q0, "status": "ok", "error": ""}
    try:
        point = sc.with_updates(drive={"i0": i0})
        _, dq, phi, _, rates = _modified_rates(point, corr=corr)
        evo = evolve_qubit(rates, rho0=point.rho0, omega_q=point.omega_q)
        gm = _fit_rate(point, evo.t, evo.cxy)
        row["gammabar_qm"] = gm
        row["suppression_ratio"] = gm / gammabar_q0 if gammabar_q0 != 0 else float("nan")
        est = largest_lyapunov(point.duffing, point.drive, _lyap_settings(point),
                               alpha0=point.alpha0)
        row["lyapunov"] = est.exponent
        row["lyapunov_stderr"] = est.stderr
        row["regime"] = classify_regime(est.exponent, est.stderr).value
        try:
            spectrum = psd(dq, segments=point.segments, overlap=point.overlap)
            omega_cd = point.omega_cd_value()
            row["f_predicted"] = (correction_factor(spectrum, omega_cd)
                                  if 0.0 < omega_cd < spectrum.nyquist else float("nan"))
        except Exception:
            row["f_predicted"] = float("nan")
    except Exception as exc:
        row["status"] = "error"
        row["error"] = f"{type(exc).__name__}: {exc}"
        for key in ("gammabar_qm", "suppression_ratio", "lyapunov",
                    "lyapunov_stderr", "f_predicted"):
            row.setdefault(key, float("nan"))
        row.setdefault("regime", "")
    return row


def sweep_drive(sc: Scenario, i0_values, out_dir: str | Path,
                workers: int = 1) -> list[dict]:
    """Gamma-bar, Lyapunov exponent, regime and F per drive amplitude.

    Per-point failures are recorded in their row; the sweep continues and the
    row count always equals the number of requested points.
    """
    values = [float(v) for v in i0_values]
    if len(values) < 2:
        raise ConfigError("sweep needs at least two I0 values")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    with _stage("bath_correlation"):
        corr = bath_correlation(sc.noise, s_max=sc.t_end, ds=sc.dt)
    with _stage("gamma_unmodified"):
        t_grid = np.arange(sc.n_samples) * sc.dt
        rates0 = gamma_unmodified(sc.noise, sc.omega_q, t_grid)
        evo0 = evolve_qubit(rates0, rho0=sc.rho0, omega_q=sc.omega_q)
        g0 = _fit_rate(sc, evo0.t, evo0.cxy)

    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, [sc] * len(values), values,
                                 [corr] * len(values), [g0] * len(values)))
    else:
        rows = [_sweep_point(sc, v, corr, g0) for v in values]
    rows.sort(key=lambda r: r["i0"])
    write_row_csv(out / "sweep.csv", rows, _SWEEP_HEADER)
    return rows


_TABLE_HEADER = [
    "kind", "domain_lo", "domain_hi", "gammabar_q0", "gammabar_qm",
    "suppression_ratio", "si_gammabar_qm_hz", "si_t1t2_us", "status", "error",
]


def table_noises(sc: Scenario, noises, out_dir: str | Path) -> list[dict]:
    """Natural vs modified rates for a list of spectral densities.

    The chaotic trajectory and modulation phase are computed once (they do
    not depend on the bath); each noise then gets its own kernel and rates.
    """
    noises = list(noises)
    if not noises:
        raise ConfigError("table requires a nonempty noise list")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    with _stage("simulate_classical"):
        traj = simulate_classical(sc.duffing, sc.drive, sc.alpha0, sc.t_end, sc.dt)
    with _stage("delta_q_semiclassical"):
        dq = delta_q_semiclassical(traj, sc.g_qo)
    phi = cumulative_phase(dq)

    rows = []
    for sd in noises:
        row = {
            "kind": sd.kind.value, "domain_lo": sd.domain_lo, "domain_hi": sd.domain_hi,
            "status": "ok", "error": "",
        }
        try:
            corr = bath_correlation(sd, s_max=sc.t_end, ds=sc.dt)
            rates = gamma_delta(corr, sc.omega_q, phi, delta_q=dq)
            rates0 = gamma_unmodified(sd, sc.omega_q, traj.t)
            evo = evolve_qubit(rates, rho0=sc.rho0, omega_q=sc.omega_q)
            evo0 = evolve_qubit(rates0, rho0=sc.rho0, omega_q=sc.omega_q)
            gm = _fit_rate(sc, evo.t, evo.cxy)
            g0 = _fit_rate(sc, evo0.t, evo0.cxy)
            row["gammabar_qm"] = gm
            row["gammabar_q0"] = g0
            row["suppression_ratio"] = gm / g0 if g0 != 0 else float("nan")
            si = _si_block(sc, gm, g0)
            row["si_gammabar_qm_hz"] = si.get("si_gammabar_qm_hz", float("nan"))
            row["si_t1t2_us"] = si.get("si_t1t2_us", float("nan"))
        except Exception as exc:
            row["status"] = "error"
            row["error"] = f"{type(exc).__name__}: {exc}"
            for key in ("gammabar_qm", "gammabar_q0", "suppression_ratio",
                        "si_gammabar_qm_hz", "si_t1t2_us"):
                row.setdefault(key, float("nan"))
        rows.append(row)
    write_row_csv(out / "table.csv", rows, _TABLE_HEADER)
    return rows
