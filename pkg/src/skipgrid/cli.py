"""Command line entry point.

    skipgrid run   [--config cfg.json] [--env cliff] [--agent tq] ... --out DIR
    skipgrid table [--seeds 0-19] [--episodes 10000] [--jobs N] --out DIR
    skipgrid plot-data RUN_DIR [RUN_DIR ...] --out tidy.csv

Exit codes: 0 ok, 2 invalid configuration, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .experiment import (CurveRecord, RunConfig, emit_plot_data, parse_seeds,
                         read_curve_csv, reproduce_table, run)
from .gridworld import ConfigurationError

log = logging.getLogger("skipgrid")

EXIT_CONFIG = 2
EXIT_IO = 3

# flag name -> RunConfig field
_OVERRIDES = {
    "env": "env", "agent": "agent", "episodes": "episodes", "max_skip": "max_skip",
    "schedule": "schedule", "eps_start": "eps_start", "eps_end": "eps_end",
    "constant_eps": "constant_eps", "alpha": "alpha", "gamma": "gamma", "q_init": "q_init",
    "seeds": "seeds", "eval_every": "eval_every", "eval_repeats": "eval_repeats",
    "out": "out", "jobs": "jobs", "te_duration": "te_duration", "te_cap": "te_cap",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    p.add_argument("--env", help="cliff|bridge|zigzag|open23 or a path to an ASCII map")
    p.add_argument("--agent", choices=("q", "tq", "teq"))
    p.add_argument("--episodes", type=int)
    p.add_argument("--max-skip", dest="max_skip", type=int)
    p.add_argument("--schedule", choices=("linear", "log", "const"))
    p.add_argument("--eps-start", dest="eps_start", type=float)
    p.add_argument("--eps-end", dest="eps_end", type=float)
    p.add_argument("--constant-eps", dest="constant_eps", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--q-init", dest="q_init", type=float)
    p.add_argument("--seeds", help="e.g. 0-19 or 0,3,5")
    p.add_argument("--eval-every", dest="eval_every", type=int)
    p.add_argument("--eval-repeats", dest="eval_repeats", type=int)
    p.add_argument("--te-duration", dest="te_duration", choices=("zeta", "uniform"))
    p.add_argument("--te-cap", dest="te_cap", type=int)
    p.add_argument("--jobs", type=int, help="worker processes across seeds (default 1)")
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="skipgrid", description="Tabular skip Q-learning experiments")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_run = sub.add_parser("run", help="train one agent over several seeds")
    _add_run_flags(p_run)

    p_table = sub.add_parser("table", help="regenerate the AUC / decisions tables")
    _add_run_flags(p_table)
    p_table.set_defaults(seeds="0-19")
    p_table.add_argument("--envs", default="cliff,bridge,zigzag")
    p_table.add_argument("--schedules", default="linear,log,const")
    p_table.add_argument("--agents", default="q,tq")
    p_table.add_argument("--sweep", default="1-16", help="max-skip values for the sweep")
    p_table.add_argument("--sweep-env", default="zigzag")
    p_table.add_argument("--sweep-schedule", default="linear")

    p_plot = sub.add_parser("plot-data", help="tidy CSV from run directories")
    p_plot.add_argument("runs", nargs="+", help="directories written by 'run'")
    p_plot.add_argument("--metrics", default="eval_reward,eval_steps,eval_decisions")
    p_plot.add_argument("--out", required=True)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    data = {}
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{args.config}: invalid JSON ({exc.msg})") from None
        except OSError as exc:
            raise ConfigurationError(f"cannot read config: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigurationError(f"{args.config}: expected a JSON object")
    for flag, key in _OVERRIDES.items():
        val = getattr(args, flag, None)
        if val is not None:
            data[key] = val
    return RunConfig.from_dict(data)


def _cmd_run(args) -> int:
    cfg = config_from_args(args)
    summary = run(cfg)
    agg = summary.to_dict()["aggregate"]
    print(f"{cfg.agent} on {cfg.env} ({cfg.schedule}), {len(cfg.seeds)} seeds: "
          f"AUC {agg['auc']['mean']:.3f} +- {agg['auc']['std']:.3f}, "
          f"decisions {agg['mean_decisions']['mean']:.2f}, "
          f"{summary.wall_seconds:.1f}s")
    if cfg.out:
        print(f"artifacts written to {cfg.out}")
    return 0


def _cmd_table(args) -> int:
    base = config_from_args(args)
    base.validate()

    def progress(table, key, summary):
        log.info("%s %s: AUC %.3f decisions %.2f (%.1fs)", table, key,
                 summary.auc["mean"], summary.decisions["mean"], summary.wall_seconds)

    res = reproduce_table(args.envs.split(","), args.schedules.split(","), args.agents.split(","),
                          base.seeds, base=base, skip_sweep=parse_seeds(args.sweep),
                          sweep_env=args.sweep_env, sweep_schedule=args.sweep_schedule,
                          out=base.out, progress=progress)
    print(res.format(), end="")
    return 0


def _cmd_plot(args) -> int:
    curves = []
    for d in args.runs:
        summary = json.loads((Path(d) / "summary.json").read_text(encoding="utf-8"))
        cfg = summary["config"]
        for seed in cfg["seeds"]:
            curves.append(CurveRecord(cfg["agent"], cfg["env"], cfg["schedule"], seed,
                                      read_curve_csv(Path(d) / f"curve_seed{seed}.csv")))
    try:
        emit_plot_data(curves, [m for m in args.metrics.split(",") if m], path=args.out)
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from None
    print(f"wrote {args.out}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s")
    handler = {"run": _cmd_run, "table": _cmd_table, "plot-data": _cmd_plot}[args.command]
    try:
        return handler(args)
    except ConfigurationError as exc:
        print(f"skipgrid: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TypeError, ValueError) as exc:
        print(f"skipgrid: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"skipgrid: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
