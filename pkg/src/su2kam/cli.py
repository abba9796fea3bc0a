"""Command line entry point.

    su2kam run        --config cfg.toml [--out DIR] [--seed N] [--precision B]
    su2kam experiment {rigidity,liouville,toy} --config cfg.toml [...]
    su2kam plant      --config cfg.toml --out DIR
    su2kam report     --trace trace.jsonl

Exit codes: 0 on PASS, 1 on FAIL (including diverged runs), 2 on
configuration errors (missing or malformed config, bad parameters).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import cocycle, driver, experiments, fourier
from .errors import ConfigError, GateFailure, VerificationFailure


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="su2kam")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="TOML configuration file")
        sp.add_argument("--out", default=None, help="output directory for traces")
        sp.add_argument("--seed", type=int, default=None, help="override perturbation seed")
        sp.add_argument("--precision", type=int, default=None, help="mantissa bits (53 only)")

    common(sub.add_parser("run", help="run the scheme on the configured cocycle"))
    exp = sub.add_parser("experiment", help="run a named experiment")
    exp.add_argument("kind", choices=("rigidity", "liouville", "toy"))
    common(exp)
    plant = sub.add_parser("plant", help="emit the configured perturbation as JSON")
    common(plant)
    rep = sub.add_parser("report", help="summarize a JSONL trace")
    rep.add_argument("--trace", required=True)
    return p


def _load(args) -> experiments.ExperimentConfig:
    config = experiments.load_config(args.config)
    if args.seed is not None:
        config = dataclasses.replace(
            config, perturbation=dataclasses.replace(config.perturbation, seed=args.seed)
        )
    if args.precision is not None:
        config = dataclasses.replace(
            config, params=dataclasses.replace(config.params, precision=args.precision)
        )
    if args.out is not None:
        config = dataclasses.replace(config, out_dir=args.out)
    return config


def _emit_trace(trace, config) -> None:
    if trace is None or not trace.records:
        return
    jsonl, csv_path = experiments.write_trace(trace, config.out_dir, config.stem)
    print(f"trace: {jsonl}")
    print(f"trace: {csv_path}")


def _cmd_run(args) -> int:
    config = _load(args)
    c = cocycle.PerturbedCocycle(config.alpha, config.angle, config.perturbation.build())
    try:
        trace = driver.run_scheme(c, config.params)
    except GateFailure as exc:
        print(f"FAIL run: {exc}")
        _emit_trace(getattr(exc, "trace", None), config)
        return 1
    _emit_trace(trace, config)
    print(
        f"{'PASS' if trace.status == 'converged' else 'FAIL'} run: status {trace.status}, "
        f"{len(trace.steps)} steps, final eps0 {trace.final.eps(0):.3g}, "
        f"resonant steps {trace.resonant_steps}"
    )
    return 0 if trace.status == "converged" else 1


def _cmd_experiment(args) -> int:
    config = _load(args)
    runner = {
        "rigidity": experiments.rigidity_experiment,
        "liouville": experiments.liouville_experiment,
        "toy": experiments.toy_experiment,
    }[args.kind]
    try:
        result = runner(config)
    except (GateFailure, VerificationFailure) as exc:
        print(f"FAIL {args.kind}: {exc}")
        _emit_trace(getattr(exc, "trace", None), config)
        return 1
    _emit_trace(result.trace, config)
    detail = "; ".join(result.messages) if result.messages else json.dumps(
        experiments._round_floats(result.details), default=str
    )
    print(f"{result.verdict} {args.kind}: {detail}")
    return 0 if result.passed else 1


def _cmd_plant(args) -> int:
    config = _load(args)
    f = config.perturbation.build()
    payload = {
        "alpha": config.alpha,
        "angle": config.angle,
        "band": f.band,
        "t_modes": {str(k): [f.t_channel.coeff(k).real, f.t_channel.coeff(k).imag]
                    for k in sorted(fourier.spectral_support(f.t_channel))},
        "z_modes": {str(k): [f.z_channel.coeff(k).real, f.z_channel.coeff(k).imag]
                    for k in sorted(fourier.spectral_support(f.z_channel))},
    }
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{config.stem}_plant.json"
    path.write_text(json.dumps(payload, indent=2) + "\n")
    print(f"PASS plant: wrote {path}")
    return 0


def _cmd_report(args) -> int:
    path = Path(args.trace)
    if not path.exists():
        raise ConfigError(f"trace file not found: {path}")
    rows = [json.loads(line) for line in path.read_text().splitlines() if line.strip()]
    if not rows:
        raise ConfigError(f"trace file is empty: {path}")
    last = rows[-1]
    resonant = [r["step"] for r in rows if r["k_r"] is not None]
    print(f"steps: {len(rows)}")
    print(f"final eps0: {last['eps0']:.6g}  eps_s0: {last['eps_s0']:.6g}")
    print(f"final angle: {last['angle']:.12g}")
    print(f"resonant steps: {resonant}")
    warn = sum(len(r["warnings"]) for r in rows)
    print(f"warnings: {warn}")
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    handler = {
        "run": _cmd_run,
        "experiment": _cmd_experiment,
        "plant": _cmd_plant,
        "report": _cmd_report,
    }[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
