"""Command-line front end.

Subcommands: resonance, fpu, check, order, adjoint-demo.  Exit codes:
0 on success, 1 if any check fails, 2 on configuration errors (argparse
uses 2 for bad flags already; ConfigError maps to the same).

Flags default to None so a --config file can supply values; anything typed
on the command line wins over the file.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .config import ConfigError, build_config, load_config_file

_CONFIG_KEYS = {
    "eps", "omega", "m", "h", "h_min", "h_max", "h_count", "t_final",
    "method", "stride", "seed", "out", "long_run", "suite", "workers",
    "negative_control",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="genvi",
        description="Variational-integrator experiments: resonance sweeps, "
        "stiff-chain energy exchange, invariant checks.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)

    def add_common(p):
        p.add_argument("--config", help="key=value file; flags override it")
        p.add_argument("--seed", type=int, help="seed recorded in outputs (default 2023)")

    p = sub.add_parser("resonance", help="energy error of the four 1-dof methods over an h grid")
    add_common(p)
    p.add_argument("--eps", type=float, help="perturbation strength (default 0.1)")
    p.add_argument("--h-min", type=float, help="smallest step size (default 0.1)")
    p.add_argument("--h-max", type=float, help="largest step size (default 10)")
    p.add_argument("--h-count", type=int, help="grid size (default 50)")
    p.add_argument("--t-final", type=float, help="integration time (default 1000)")
    p.add_argument("--long", dest="long_run", action="store_const", const=True,
                   help="long-run scale: t_final 10000 unless t_final is set by flag or config file")
    p.add_argument("--out", help="CSV path; the SVG lands next to it (default resonance.csv)")
    p.add_argument("--workers", type=int, help="process pool size (default 1, serial)")

    p = sub.add_parser("fpu", help="stiff-chain run: per-spring energies against time")
    add_common(p)
    p.add_argument("--omega", type=float, help="stiff frequency (default 50)")
    p.add_argument("--m", type=int, help="number of stiff springs (default 3)")
    p.add_argument("--h", type=float, help="step size (default 0.01)")
    p.add_argument("--method", help="one of sv, htvi, imex")
    p.add_argument("--t-final", type=float, help="integration time (default 200)")
    p.add_argument("--long", dest="long_run", action="store_const", const=True,
                   help="long-run scale: t_final 10000 unless t_final is set by flag or config file")
    p.add_argument("--stride", type=int, help="record every this many steps (default 10)")
    p.add_argument("--out", help="CSV path; the SVG lands next to it (default fpu.csv)")

    p = sub.add_parser("check", help="run invariant checks; nonzero exit on failure")
    add_common(p)
    p.add_argument("--suite", help="run one suite instead of all")
    p.add_argument("--negative-control", dest="negative_control", action="store_const",
                   const=True, help="add a deliberately failing check")

    p = sub.add_parser("order", help="measure the convergence order of one method")
    add_common(p)
    p.add_argument("--method", help="euler_a, euler_b, sv, htvi, or euler_a_composed")

    p = sub.add_parser("adjoint-demo", help="print adjoint and symmetry defects "
                       "around the averaged methods")
    add_common(p)
    p.add_argument("--eps", type=float, help="perturbation strength (default 0.1)")

    return parser


def _config_from_args(args: argparse.Namespace):
    file_values = load_config_file(args.config) if getattr(args, "config", None) else {}
    cli_values = {k: v for k, v in vars(args).items() if k in _CONFIG_KEYS}
    return build_config(args.experiment, file_values, cli_values)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
    except ConfigError as exc:
        print(f"genvi: config error: {exc}", file=sys.stderr)
        return 2

    if cfg.experiment == "resonance":
        from .experiments import run_resonance

        csv_path, svg_path = run_resonance(cfg)
        print(f"wrote {csv_path} and {svg_path}")
        return 0

    if cfg.experiment == "fpu":
        from .experiments import run_fpu

        csv_path, svg_path = run_fpu(cfg)
        print(f"wrote {csv_path} and {svg_path}")
        return 0

    if cfg.experiment == "check":
        from .checks import format_result, run_checks

        try:
            results = run_checks(
                suite=cfg.suite,
                negative_control=cfg.negative_control,
                seed=cfg.seed,
            )
        except ValueError as exc:
            print(f"genvi: config error: {exc}", file=sys.stderr)
            return 2
        for r in results:
            print(format_result(r))
        passed = sum(r.passed for r in results)
        print(f"{passed}/{len(results)} checks passed")
        return 0 if passed == len(results) else 1

    if cfg.experiment == "order":
        from .experiments import run_order

        report = run_order(cfg)
        print(
            f"method={report.method} order={report.measured:.4f} "
            f"expected={report.expected:g}"
        )
        for h, err in zip(report.h_values, report.errors):
            print(f"  h={h:g} global_error={err:.6e}")
        return 0

    from .experiments import run_adjoint_demo

    for label, value in run_adjoint_demo(cfg):
        print(f"{label}: {value:.6e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
