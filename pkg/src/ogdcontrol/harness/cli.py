"""Command-line entry point: ``ogdcontrol {validate,run,sweep,dump-constants}``."""
import argparse
import os
import sys

from ..analysis import theorem_constants
from ..errors import OgdError
from . import runner
from .builtin import benchmark_scenario
from .generate import random_scenario
from .scenario import load_scenario, prepare, scenario_to_toml


def _scenario(args):
    if args.scenario:
        s = load_scenario(args.scenario)
    elif args.seed is not None:
        s = random_scenario(args.seed)
    else:
        s = benchmark_scenario()
    if args.horizon is not None:
        s = s.with_horizon(args.horizon)
    return s


def _validate(args, out):
    rep = prepare(_scenario(args)).report
    out.write("\n".join(rep.lines()) + "\n")
    return runner.EXIT_OK if rep.passed else runner.EXIT_VALIDATION


def _run(args, out):
    s = _scenario(args)
    res = runner.run_scenario(s, args.out)
    runner._atomic_write(os.path.join(args.out, "scenario.toml"), scenario_to_toml(s))
    with open(res.artifacts["summary"]) as fh:
        out.write(fh.read())
    if res.error:
        sys.stderr.write(res.error + "\n")
    return res.status


def _sweep(args, out):
    s = _scenario(args)
    horizons = [int(h) for h in args.horizons.split(",") if h.strip()] if args.horizons else []
    rows = runner.sweep(s, horizons, workers=args.workers)
    text = runner.sweep_csv(rows)
    if args.out:
        runner._atomic_write(os.path.join(args.out, "sweep.csv"), text)
    out.write(text)
    return max((r["status"] for r in rows), default=runner.EXIT_OK)


def _dump_constants(args, out):
    s = _scenario(args)
    setup = prepare(s)
    if not setup.report.passed:
        out.write("\n".join(setup.report.lines()) + "\n")
        return runner.EXIT_VALIDATION
    c = theorem_constants(s.system, setup.X, s.U, setup.cfg, setup.schedule)
    out.write(runner.key_value_text(c.as_dict()))
    return runner.EXIT_OK


COMMANDS = {"validate": _validate, "run": _run, "sweep": _sweep, "dump-constants": _dump_constants}


def build_parser():
    p = argparse.ArgumentParser(prog="ogdcontrol", description=__doc__)
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--scenario", help="scenario TOML file (default: built-in benchmark)")
    p.add_argument("--seed", type=int, help="generate a random valid scenario from this seed")
    p.add_argument("--horizon", type=int, help="override the scenario horizon")
    p.add_argument("--out", default="out", help="artifact directory for run and sweep")
    p.add_argument("--horizons", default="50,100,200", help="comma-separated horizons for sweep")
    p.add_argument("--workers", type=int, default=1, help="processes used by sweep")
    return p


def main(argv=None, out=None):
    args = build_parser().parse_args(argv)
    out = sys.stdout if out is None else out
    try:
        return COMMANDS[args.command](args, out)
    except OgdError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return runner.EXIT_SOLVER
    except (OSError, KeyError, ValueError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return runner.EXIT_VALIDATION
