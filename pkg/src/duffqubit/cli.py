"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.  The
failing pipeline stage is named on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .circuit import CircuitParams, effective_params, validate_regime
from .errors import ConfigError, NumericalError, StageError
from .noise import make_spectral_density
from .runner import run_echo, run_lyapunov, run_scenario, sweep_drive, table_noises
from .scenario import Scenario, apply_overrides, load_config

_NOISE_PRESETS = {
    # amplitudes chosen so J(omega_q) = 0.1 for every kind (paper prints no prefactor)
    "one_over_f": dict(kind="one_over_f", amplitude=0.1, domain=[0.01, 1.0]),
    "ohmic": dict(kind="ohmic", amplitude=0.1221402758160170, domain=[2.0 / 3.0, 1.5]),
    "sub_ohmic": dict(kind="sub_ohmic", amplitude=0.1221402758160170, domain=[2.0 / 3.0, 1.5]),
    "super_ohmic": dict(kind="super_ohmic", amplitude=0.1221402758160170, domain=[2.0 / 3.0, 1.5]),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="duffqubit",
        description="Qubit decoherence suppression by a driven chaotic Duffing oscillator",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_common(p):
        p.add_argument("config", help="scenario config (YAML) or run manifest (JSON)")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--override", action="append", default=[],
                       metavar="KEY=VALUE", help="dotted config override, repeatable")
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("simulate", help="run the full scenario pipeline")
    add_common(p)
    p = sub.add_parser("sweep", help="sweep the drive amplitude")
    add_common(p)
    p.add_argument("--param", default="i0", choices=["i0"])
    p.add_argument("--values", required=True,
                   help="comma-separated I0 values, e.g. 0,5,10,20,30")
    p = sub.add_parser("table", help="compare noise kinds at the configured drive")
    add_common(p)
    p.add_argument("--noises", required=True,
                   help="comma-separated kinds from: " + ",".join(_NOISE_PRESETS))
    p = sub.add_parser("lyapunov", help="largest Lyapunov exponent of the drive")
    add_common(p)
    p = sub.add_parser("echo", help="quantum echo factor f01(t)")
    add_common(p)
    p = sub.add_parser("map-circuit", help="map circuit parameters to simulator inputs")
    add_common(p)
    return parser


def _load_scenario(args) -> Scenario:
    cfg = load_config(args.config)
    if args.override:
        cfg = apply_overrides(cfg, args.override)
    return Scenario.from_dict(cfg)


def _out_dir(args, sc_name: str) -> Path:
    return Path(args.out) if args.out else Path("runs") / sc_name


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.verb == "map-circuit":
            cfg = load_config(args.config)
            if args.override:
                cfg = apply_overrides(cfg, args.override)
            circ = cfg.get("circuit")
            if not circ:
                raise ConfigError("map-circuit requires a 'circuit' section")
            cp = CircuitParams(**circ)
            eff = effective_params(cp)
            checks = validate_regime(cp)
            out = {
                "effective": {
                    "omega_q": eff.omega_q, "omega_o": eff.omega_o, "lam": eff.lam,
                    "g_qo": eff.g_qo, "i0": eff.i0, "omega_d": eff.omega_d,
                },
                "metadata": eff.metadata,
                "regime_checks": [
                    {"name": c.name, "ratio": c.ratio, "passed": c.passed, "note": c.note}
                    for c in checks
                ],
            }
            text = json.dumps(out, indent=2, sort_keys=True)
            if args.out:
                outdir = Path(args.out)
                outdir.mkdir(parents=True, exist_ok=True)
                (outdir / "circuit_map.json").write_text(text + "\n")
            print(text)
            return 0

        sc = _load_scenario(args)
        out = _out_dir(args, sc.name)
        if args.verb == "simulate":
            result = run_scenario(sc, out)
            print(f"wrote {len(result.artifacts)} artifacts to {result.out_dir}")
            print(f"gammabar_qm={result.summary['gammabar_qm']:.6g} "
                  f"gammabar_q0={result.summary['gammabar_q0']:.6g} "
                  f"ratio={result.summary['suppression_ratio']:.4g}")
        elif args.verb == "sweep":
            values = [float(v) for v in args.values.replace(",", " ").split()]
            rows = sweep_drive(sc, values, out, workers=args.workers)
            bad = sum(1 for r in rows if r["status"] != "ok")
            print(f"wrote sweep.csv with {len(rows)} rows to {out}"
                  + (f" ({bad} failed points)" if bad else ""))
        elif args.verb == "table":
            kinds = [k.strip() for k in args.noises.split(",") if k.strip()]
            unknown = [k for k in kinds if k not in _NOISE_PRESETS]
            if unknown:
                raise ConfigError(f"unknown noise kinds: {unknown}")
            noises = [make_spectral_density(
                _NOISE_PRESETS[k]["kind"], _NOISE_PRESETS[k]["amplitude"],
                *_NOISE_PRESETS[k]["domain"]) for k in kinds]
            rows = table_noises(sc, noises, out)
            print(f"wrote table.csv with {len(rows)} rows to {out}")
        elif args.verb == "lyapunov":
            est = run_lyapunov(sc)
            from .duffing import classify_regime
            print(f"lyapunov={est.exponent:.6g} stderr={est.stderr:.3g} "
                  f"blocks={est.n_blocks} regime={classify_regime(est.exponent, est.stderr).value}")
        elif args.verb == "echo":
            result = run_echo(sc, out)
            print(f"wrote echo.csv to {result.out_dir} "
                  f"(dim={result.summary['dim']}, leak={result.summary['leak']:.2e})")
        return 0
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    except StageError as exc:
        code = 2 if isinstance(exc.cause, ConfigError) else 3
        print(f"error: {exc}", file=sys.stderr)
        return code
    except NumericalError as exc:
        print(f"error: numerical: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
