"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 certification failure,
4 I/O error.  BAKERLAB_THREADS caps worker threads (default 1, serial).
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import ExperimentConfig
from .errors import CertificationError, ConfigError
from .experiments import (
    run_abel_task,
    run_classify_task,
    run_experiment,
    run_loop_task,
    run_orbit_task,
    run_persist_task,
    run_render_task,
    run_showcase,
    write_schema,
    ExperimentResult,
)
from .mapfamily import PoleCase, coefficient_budget

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CERTIFICATION = 3
EXIT_IO = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bakerlab",
        description="Certified experiments on translation-plus-pole-field maps.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_budget = sub.add_parser("budget", help="print the coefficient-mass budget")
    p_budget.add_argument("--case", required=True,
                          choices=[c.value for c in PoleCase])
    p_budget.add_argument("--epsilon", required=True, type=float)
    p_budget.add_argument("--json", dest="json_path", default=None,
                          help="also write the value to a JSON file")

    for name, description in (
            ("orbit", "write the orbit CSV for the configured seeds"),
            ("abel", "write translation-chart values and residuals"),
            ("classify", "write the type verdict with evidence"),
            ("loop", "write per-image winding and contractibility tables"),
            ("persist", "write the winding-persistence report"),
            ("render", "write the region PPM image"),
            ("run", "run the orbit, classify, loop, and render tasks")):
        p = sub.add_parser(name, help=description)
        p.add_argument("config", help="experiment config file")
        p.add_argument("--out-dir", default=None, help="override [output] dir")

    p_rep = sub.add_parser("reproduce-thm51",
                           help="reproduce one showcase pole configuration end to end")
    p_rep.add_argument("--case", required=True, choices=["i", "ii", "iii"])
    p_rep.add_argument("--out-dir", default="out")
    p_rep.add_argument("--quick", action="store_true",
                       help="shorter orbits for smoke runs")
    return parser


def _load_config(args) -> ExperimentConfig:
    config = ExperimentConfig.from_file(args.config)
    if args.out_dir is not None:
        config = ExperimentConfig(**{**config.__dict__, "out_dir": args.out_dir})
    return config


def _finish(result: ExperimentResult) -> int:
    for path in result.paths:
        print(f"wrote {path}")
    for note in result.notes:
        print(f"note: {note}")
    if not result.certification_ok:
        print("certification FAILED")
        return EXIT_CERTIFICATION
    return EXIT_OK


def _cmd_budget(args) -> int:
    case = PoleCase.from_tag(args.case)
    try:
        value = coefficient_budget(case, args.epsilon)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(f"budget[case={case.value}, epsilon={args.epsilon:.17g}] = {value:.17g}")
    if args.json_path:
        with open(args.json_path, "w", encoding="utf-8") as fh:
            json.dump({"case": case.value, "epsilon": args.epsilon,
                       "budget": value}, fh, sort_keys=True, indent=2)
            fh.write("\n")
        print(f"wrote {args.json_path}")
    return EXIT_OK


_TASK_RUNNERS = {
    "orbit": run_orbit_task,
    "abel": run_abel_task,
    "classify": run_classify_task,
    "loop": run_loop_task,
    "persist": run_persist_task,
    "render": run_render_task,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "budget":
            return _cmd_budget(args)
        if args.command == "reproduce-thm51":
            summary, result = run_showcase(PoleCase.from_tag(args.case),
                                           out_dir=args.out_dir, quick=args.quick)
            for name, ok in summary["checks"].items():
                print(f"[{summary['case']}] {name}: {'ok' if ok else 'FAIL'}")
            code = _finish(result)
            if not summary["ok"]:
                print(f"[{summary['case']}] reproduction FAILED")
                return EXIT_CERTIFICATION
            print(f"[{summary['case']}] reproduction ok "
                  f"(verdict: {summary['verdict']})")
            return code
        config = _load_config(args)
        if args.command == "run":
            return _finish(run_experiment(config))
        result = ExperimentResult()
        write_schema(config)
        _TASK_RUNNERS[args.command](config, result)
        return _finish(result)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CertificationError as exc:
        print(f"certification failure: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
