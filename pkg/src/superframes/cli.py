"""Command line entry point: ``superframes {compose,sample,invariance,verify-appendix,all}``.

Exit codes: 0 when every check passes (or fails as expected), 1 when a
check fails, 2 for usage or scenario errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiments as ex
from .errors import CompositionError, GroupError, ScenarioError, ValidationError
from .scenario import parse_scenario

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("expected an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="superframes",
                                     description="Superposed reference frame experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("compose", "compose the frame chain of a scenario"),
        ("sample", "draw Born-rule samples from each superposition"),
        ("invariance", "check Schrodinger invariance under the scenario's superposition"),
        ("verify-appendix", "exact finite-group check of the restricted pair-sum rule"),
        ("all", "run every applicable experiment"),
    ]:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--scenario", type=Path, default=None)
        cmd.add_argument("--out", type=Path, default=None, help="directory for report.json and CSV dumps")
        cmd.add_argument("--seed", type=_u64, default=None)
        cmd.add_argument("--n", type=_u64, default=100_000, help="number of Born samples")
        cmd.add_argument("--group", type=str, default=None, help="built-in group name")
        cmd.add_argument("--trials", type=_u64, default=100)
    return parser


def run(args: argparse.Namespace) -> ex.RunResult:
    needs_scenario = args.command in ("compose", "sample", "invariance")
    if needs_scenario and args.scenario is None:
        raise ScenarioError(f"{args.command} requires --scenario PATH")
    cfg = parse_scenario(args.scenario) if args.scenario is not None else None
    fields: dict = {}
    if args.command == "compose":
        result = ex.run_compose(cfg)
    elif args.command == "sample":
        result = ex.run_sample(cfg, args.n, args.seed)
    elif args.command == "invariance":
        result = ex.run_invariance(cfg, fields)
    elif args.command == "verify-appendix":
        seed = args.seed if args.seed is not None else (cfg.seed if cfg else 0)
        result = ex.RunResult("verify-appendix", ex.config_hash(cfg, group=args.group, trials=args.trials,
                                                                seed=seed))
        for g in [args.group] if args.group else ex.VERIFY_GROUPS:
            result.merge(ex.run_group_verification(g, args.trials, seed), g)
    else:
        groups = [args.group] if args.group else ex.VERIFY_GROUPS
        result = ex.run_all(cfg, args.n, args.trials, args.seed, groups, fields)
    if args.out is not None:
        wanted = cfg.outputs if cfg is not None else ("report",)
        ex.emit_outputs(result, args.out, fields if "fields" in wanted else None)
    return result


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = run(args)
    except (ScenarioError, ValidationError, CompositionError, GroupError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for line in result.summary_lines():
        print(line)
    print("OK" if result.ok else "FAILED")
    return EXIT_OK if result.ok else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
