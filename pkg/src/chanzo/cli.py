"""Command-line entry point.

Subcommands:
  run       full experiment from a YAML config file
  demo-ris  built-in reflecting-surface sweep (packaged config)
  demo-ma   built-in movable-antenna sweep (packaged config)
  ledger    run one method once and dump its pilot-query log as CSV
"""

import argparse
import sys
from importlib import resources

from .errors import ConfigError
from .harness import (ExperimentConfig, emit, load_config, run_experiment,
                      run_single, summarize)
from .kernels import backend_name


def _packaged_config(name):
    path = resources.files("chanzo").joinpath("configs").joinpath(name)
    with resources.as_file(path) as p:
        return load_config(str(p))


def demo_ris_config():
    return _packaged_config("ris-sweep.yaml")


def demo_ma_config():
    return _packaged_config("ma-sweep.yaml")


def _add_common(p):
    p.add_argument("--seed", type=int, default=None, help="override base_seed")
    p.add_argument("--trials", type=int, default=None, help="override trial count")


def _add_output(p):
    p.add_argument("--out", default="chanzo-out", help="output directory (default: chanzo-out)")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="output file format (default: csv)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="chanzo",
        description="Pilot-budgeted channel reconfiguration benchmarks: "
                    "zeroth-order tuning against estimation and sampling baselines.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a config file")
    p_run.add_argument("--config", required=True, help="YAML experiment config")
    _add_common(p_run)
    _add_output(p_run)

    for name, help_txt in (("demo-ris", "built-in reflecting-surface sweep"),
                           ("demo-ma", "built-in movable-antenna sweep")):
        p = sub.add_parser(name, help=help_txt)
        _add_common(p)
        _add_output(p)

    p_led = sub.add_parser("ledger", help="dump one method's pilot-query log")
    p_led.add_argument("--config", default=None,
                       help="YAML config (default: the packaged demo for --scenario)")
    p_led.add_argument("--scenario", choices=("ris", "ma"), default="ris",
                       help="which demo config to use when --config is absent")
    p_led.add_argument("--method", required=True, help="method name to run")
    p_led.add_argument("--budget", required=True, type=int, help="pilot budget")
    p_led.add_argument("--trial", type=int, default=0, help="trial index (default 0)")
    p_led.add_argument("--seed", type=int, default=None, help="override base_seed")
    p_led.add_argument("--out", default="-", help="output CSV file, '-' for stdout")
    return parser


def _overridden(cfg, args):
    if getattr(args, "seed", None) is not None:
        cfg = cfg.replace(base_seed=args.seed)
    if getattr(args, "trials", None) is not None:
        cfg = cfg.replace(trials=args.trials)
    return cfg


def _run_and_emit(cfg, args):
    table = run_experiment(cfg)
    summary = summarize(table)
    paths = emit(table, summary, args.out, args.format)
    print(f"# backend: {backend_name()} kernels")
    print(f"{'method':<12} {'budget':>8} {'mean SNR (dB)':>14} {'stderr':>8}")
    for s in summary:
        print(f"{s.method:<12} {s.budget:>8} {s.mean_snr_db:>14.3f} {s.stderr_snr_db:>8.3f}")
    for p in paths:
        print(f"wrote {p}")
    return 0


def _cmd_run(args):
    return _run_and_emit(_overridden(load_config(args.config), args), args)


def _cmd_demo_ris(args):
    return _run_and_emit(_overridden(demo_ris_config(), args), args)


def _cmd_demo_ma(args):
    return _run_and_emit(_overridden(demo_ma_config(), args), args)


def _cmd_ledger(args):
    if args.config is not None:
        cfg = load_config(args.config)
    else:
        cfg = demo_ris_config() if args.scenario == "ris" else demo_ma_config()
    if args.seed is not None:
        cfg = cfg.replace(base_seed=args.seed)
    if args.method not in cfg.methods:
        raise ConfigError(f"method {args.method!r} not in config methods {cfg.methods}")
    row, ledger = run_single(cfg, args.method, args.budget, trial=args.trial)
    if ledger is None:
        raise ConfigError(f"method {args.method!r} consumes no pilots; nothing to dump")
    if args.out == "-":
        ledger.to_csv(sys.stdout)
    else:
        ledger.to_csv(args.out)
        print(f"wrote {args.out} ({len(ledger)} queries; achieved SNR {row.snr_db:.3f} dB)")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "demo-ris": _cmd_demo_ris,
                "demo-ma": _cmd_demo_ma, "ledger": _cmd_ledger}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
