"""Command-line entry point: run scenarios, evaluate NRMSE, render figures,
and verify the built-in invariants.
"""

import argparse
import sys
from pathlib import Path

from .config import ConfigError, default_scenario, load_scenario, \
    apply_observer_mode
from .evaluate import EvaluationError, evaluate_log
from .plots import FAMILIES, PlotError, render
from .sim import SimLog, SimulationError, run


def _build_parser():
    p = argparse.ArgumentParser(
        prog="thrustwalk",
        description="Thruster-assisted biped walking simulator and "
                    "momentum-observer evaluation")
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("run", help="simulate a scenario and write the log")
    pr.add_argument("--config", type=Path, default=None,
                    help="scenario YAML (defaults ship built in)")
    pr.add_argument("--out", type=Path, default=Path("out"),
                    help="output directory")
    pr.add_argument("--observer-mode", choices=["supplied", "constraint"],
                    default=None, help="override observer mode (applies the "
                    "matching gain preset)")
    pr.add_argument("--seed", type=int, default=None)
    pr.add_argument("--dt", type=float, default=None)
    pr.add_argument("--duration", type=float, default=None)

    pe = sub.add_parser("eval", help="NRMSE report from a simulation log")
    pe.add_argument("log", type=Path)
    pe.add_argument("--out", type=Path, default=None,
                    help="report CSV path (default: alongside the log)")
    pe.add_argument("--skip", type=float, default=None,
                    help="override the evaluation window start [s]")

    pp = sub.add_parser("plot", help="render SVG figures from a log")
    pp.add_argument("log", type=Path)
    pp.add_argument("--out", type=Path, default=None,
                    help="output directory (default: alongside the log)")
    pp.add_argument("--which", default="forces,grf,states",
                    help="comma-separated figure families "
                         f"({','.join(sorted(FAMILIES))}); empty for none")

    pv = sub.add_parser("verify", help="run the built-in invariant checks")
    pv.add_argument("names", nargs="*", help="substring filter on check names")
    return p


def _cmd_run(args):
    if args.config is not None:
        scenario = load_scenario(args.config)
    else:
        scenario = default_scenario()
    if args.observer_mode:
        apply_observer_mode(scenario, args.observer_mode)
    if args.seed is not None:
        scenario.sim.seed = args.seed
    if args.dt is not None:
        scenario.sim.dt = args.dt
    if args.duration is not None:
        scenario.sim.duration = args.duration
    scenario.sim.validate()

    args.out.mkdir(parents=True, exist_ok=True)
    log = run(scenario)
    mode = scenario.observer.mode if scenario.observer.enabled else "off"
    path = args.out / f"{scenario.scenario_id}_{mode}_log.csv"
    log.to_csv(path)
    status = (f"fell at t={log.fell_at:g} s" if log.fell_at == log.fell_at
              else "completed")
    print(f"{status}: {len(log)} samples -> {path}")
    return 0


def _cmd_eval(args):
    log = SimLog.from_csv(args.log)
    report = evaluate_log(log, t_skip=args.skip)
    out = args.out or args.log.with_name(args.log.stem + "_nrmse.csv")
    report.to_csv(out)
    print(report.table())
    print(f"report -> {out}")
    return 0


def _cmd_plot(args):
    log = SimLog.from_csv(args.log)
    selection = [s for s in args.which.split(",") if s]
    out_dir = args.out or args.log.parent
    written = render(log, out_dir, selection=selection, stem=args.log.stem)
    for w in written:
        print(f"figure -> {w}")
    return 0


def _cmd_verify(args):
    from .verify import run_checks
    return 0 if run_checks(args.names or None) else 1


def main(argv=None):
    args = _build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "eval": _cmd_eval, "plot": _cmd_plot,
                "verify": _cmd_verify}
    try:
        return handlers[args.command](args)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
    except SimulationError as e:
        print(f"simulation error: {e}", file=sys.stderr)
    except EvaluationError as e:
        print(f"evaluation error: {e}", file=sys.stderr)
    except PlotError as e:
        print(f"plot error: {e}", file=sys.stderr)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
