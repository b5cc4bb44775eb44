"""Command-line entry point: ``thompson-attack <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import distance, fgroup, harness, protocol
from .attack import EquationId, attack_instance
from .fgroup import format_word

FN_CHOICES = ["dB", "dBw", "dA", "dAw", "dAmax"]


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="thompson-attack", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("nf", help="print the normal form of a word")
    p.add_argument("word", help='e.g. "x0^-1 x1 x0"; "1" is the identity')

    p = sub.add_parser("dist", help="evaluate a subgroup distance function")
    p.add_argument("--fn", required=True, choices=FN_CHOICES)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("word")

    p = sub.add_parser("keygen", help="generate a protocol instance as JSON")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", type=Path, help="write here instead of stdout")

    p = sub.add_parser("attack", help="attack a JSON protocol instance")
    p.add_argument("--instance", type=Path, required=True)
    p.add_argument("--n", type=int, help="iteration bound (default 2L)")

    p = sub.add_parser("experiment", help="Monte Carlo success-rate experiment")
    p.add_argument("--mode", choices=["single", "combined"], required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--fn", choices=FN_CHOICES)
    p.add_argument("--equation", choices=[e.value for e in EquationId], action="append")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv", type=Path)
    p.add_argument("--json", type=Path)
    return ap


def _cmd_nf(args) -> int:
    print(fgroup.parse_nf(args.word))
    return 0


def _cmd_dist(args) -> int:
    u = fgroup.parse_nf(args.word)
    print(distance.evaluate(args.fn, u, args.s))
    return 0


def _cmd_keygen(args) -> int:
    rng = np.random.Generator(np.random.PCG64(args.seed))
    inst = protocol.generate_instance(args.s, args.length, rng)
    text = protocol.dumps(inst)
    if args.out:
        args.out.write_text(text + "\n")
    else:
        print(text)
    return 0


def _cmd_attack(args) -> int:
    try:
        data = json.loads(args.instance.read_text())
    except OSError as exc:
        raise OSError(f"cannot read {args.instance}: {exc.strerror or exc}") from exc
    view, inst = protocol.instance_from_dict(data)
    report = attack_instance(view, max_iterations=args.n)
    out = {
        "overall_success": report.overall_success,
        "solved_by": report.solved_by.value if report.solved_by else None,
        "equations": {
            eq.value: {
                "success": o.success,
                "iterations_used": o.iterations_used,
                "final_distance": o.final_distance,
            }
            for eq, o in report.outcomes.items()
        },
        "recovered_key": format_word(report.recovered_key.spelling()) if report.recovered_key else None,
    }
    if inst is not None:
        out["key_correct"] = report.recovered_key == inst.K if report.recovered_key else None
    print(json.dumps(out, indent=2))
    return 0


def _cmd_experiment(args) -> int:
    cfg = harness.ExperimentConfig(
        s=args.s,
        L=args.length,
        trials=args.trials,
        mode=args.mode,
        N=args.n,
        distance_fn=args.fn,
        equations=args.equation,
        master_seed=args.seed,
        worker_count=args.workers,
    )
    summary = harness.run_experiment(cfg)
    harness.write_reports(summary.records, summary, args.csv, args.json)
    print(json.dumps(summary.to_dict(), indent=2, sort_keys=True))
    return 0


COMMANDS = {
    "nf": _cmd_nf,
    "dist": _cmd_dist,
    "keygen": _cmd_keygen,
    "attack": _cmd_attack,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ValueError, OverflowError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
