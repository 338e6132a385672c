"""Command-line entry point: ``ipmcc {run,track,theory,audit,gen-system}``."""

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from ..exceptions import ConfigError
from ..filters import Variant
from ..signals import NoiseModel, gen_sparse_system, save_system
from ..theory import SteadyStateProblem, emse_gaussian, emse_impulsive
from .audit import REFERENCE_IPMCC, audit_op_counts
from .config import parse_config
from .io import emit_curves, emit_summary
from .simulate import run_identification, run_tracking

logger = logging.getLogger("ipmcc")


def _summary_path(out, summary):
    if summary:
        return Path(summary)
    out = Path(out)
    return out.with_name(out.stem + "_summary" + (out.suffix or ".csv"))


def _load(args):
    config = parse_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.runs is not None:
        overrides["runs"] = args.runs
    if overrides:
        try:
            config = dataclasses.replace(config, **overrides)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return config


def _simulate(args, tracking):
    config = _load(args)
    if tracking and config.switch is None:
        raise ConfigError(f"{args.config}: 'track' needs a [switch] section")
    logger.info(
        "%s: L=%d, %d runs x %d iterations, filters: %s",
        args.config, config.n_taps, config.runs, config.iterations,
        ", ".join(f.label for f in config.filters),
    )
    curves = run_tracking(config) if tracking else run_identification(config)
    emit_curves(curves, args.out)
    summary = _summary_path(args.out, args.summary)
    emit_summary(curves, summary)
    if not args.quiet:
        for c in curves.values():
            theory = c.theory_emse.xi_db if c.theory_emse is not None else float("nan")
            print(
                f"{c.label:>10}  steady MSD {c.steady_state_msd_db:8.2f} dB  "
                f"EMSE {c.steady_state_emse.xi_db:8.2f} dB  theory {theory:8.2f} dB  "
                f"excluded {c.excluded_runs}/{c.included_runs + c.excluded_runs}"
            )
        print(f"wrote {args.out} and {summary}")


def _theory(args):
    if args.trace_s is not None:
        trace_s = args.trace_s
    else:
        trace_s = args.L * args.sigma_u_sq
    noise = NoiseModel(args.sigma_s_sq, args.p, args.sigma_I_sq)
    gauss = emse_gaussian(SteadyStateProblem(args.mu, trace_s, args.sigma_s_sq, args.sigma))
    impulsive = emse_impulsive(
        SteadyStateProblem(args.mu, trace_s, noise.total_variance, args.sigma), noise
    )
    print(f"Tr(S)                      = {trace_s!r}")
    print(f"gaussian EMSE (background) = {gauss.xi!r} ({gauss.xi_db:.3f} dB)")
    print(f"impulsive EMSE (mixture)   = {impulsive.xi!r} ({impulsive.xi_db:.3f} dB)")


def _audit(args):
    report = audit_op_counts(args.variant, args.L)
    print(f"variant={args.variant} L={args.L}")
    for name in ("adds", "mults", "divs", "exps", "sqrts"):
        line = f"{name:>6} {getattr(report, name)}"
        if args.variant == Variant.IPMCC.value and name in REFERENCE_IPMCC:
            line += f"   (reference: {REFERENCE_IPMCC[name](args.L)})"
        print(line)


def _gen_system(args):
    system = gen_sparse_system(args.L, args.K, args.seed, clustered=args.clustered)
    save_system(system, args.out)
    if not args.quiet:
        print(f"wrote {args.out}: L={system.n_taps} K={system.active_count} "
              f"S_m={system.sparseness:.4f}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ipmcc", description="Correntropy adaptive filter experiments"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("run", "system-identification ensemble -> learning-curve CSV"),
        ("track", "tracking ensemble (config must contain [switch])"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="experiment INI file")
        p.add_argument("--out", required=True, help="learning-curve CSV to write")
        p.add_argument("--summary", help="summary CSV (default: <out>_summary.csv)")
        p.add_argument("--seed", type=int, help="override base_seed")
        p.add_argument("--runs", type=int, help="override the number of runs")
        p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("theory", help="steady-state EMSE predictions")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--L", type=int, default=512, help="filter length (Tr(S) = L sigma_u^2)")
    p.add_argument("--trace-s", type=float, help="use this Tr(S) instead of L sigma_u^2")
    p.add_argument("--sigma-u-sq", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=1.25, help="kernel width")
    p.add_argument("--sigma-s-sq", type=float, default=0.01)
    p.add_argument("--p", type=float, default=0.001)
    p.add_argument("--sigma-I-sq", type=float, default=1000.0)
    p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("audit", help="arithmetic operations per iteration")
    p.add_argument("--variant", choices=[v.value for v in Variant], default="ipmcc")
    p.add_argument("--L", type=int, default=512)
    p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("gen-system", help="write a random sparse system file")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--K", type=int, required=True, help="active taps")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--clustered", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--quiet", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.ERROR if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handlers = {
        "run": lambda a: _simulate(a, tracking=False),
        "track": lambda a: _simulate(a, tracking=True),
        "theory": _theory,
        "audit": _audit,
        "gen-system": _gen_system,
    }
    try:
        handlers[args.command](args)
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"ipmcc {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
