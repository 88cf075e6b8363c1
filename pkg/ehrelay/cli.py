# ehrelay/cli.py
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .config import apply_overrides, experiment_config_from_config, load_config
from .errors import ConfigError, EhRelayError, GuardError
from .utils.parse import parse_grid

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_GUARD = 3


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, help='Base seed of the Monte Carlo trials')
    common.add_argument('--trials', type=int, help='Trials per sweep value')
    common.add_argument('--utility', choices=['max-sum', 'max-min'], help='Network utility to maximize')
    common.add_argument('--solver', choices=['bpso', 'bb', 'exhaustive'], help='Relay-selection search')
    common.add_argument('--out', help='Output path (suffix replaced per format)')
    common.add_argument('--format', dest='formats', action='append', choices=['csv', 'json', 'msgpack'],
                        help='Output format, repeatable (default: csv and json)')
    common.add_argument('--workers', type=int, help='Parallel trial workers')
    common.add_argument('--fixed-beta', type=float, help='Use this power-splitting ratio at every active relay')
    common.add_argument('--fixed-power', action='store_true', help='Active relays transmit at the relay budget')
    common.add_argument('--timing', action=argparse.BooleanOptionalAction, default=None,
                        help='Measure wall time per trial (--no-timing records 0)')
    common.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                        help='Override a configuration key, e.g. system.tc_ms=175')
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help='Debug logging')
    verbosity.add_argument('-q', '--quiet', action='store_true', help='Warnings only')
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog='ehrelay', description='Energy-harvesting two-way relay network optimizer')
    sub = parser.add_subparsers(dest='command', required=True)

    run = sub.add_parser('run', parents=[common], help='Run the experiment described by a config file')
    run.add_argument('config', nargs='?', help='Path to a TOML configuration file (optional)')

    sweep = sub.add_parser('sweep', parents=[common], help='Sweep one parameter over a grid')
    sweep.add_argument('--config', help='Path to a TOML configuration file (optional)')
    axis = sweep.add_mutually_exclusive_group(required=True)
    axis.add_argument('--ps-dbm', help='Terminal powers in dBm, e.g. -10,0,10')
    axis.add_argument('--pr-dbm', help='Relay power budgets in dBm')
    axis.add_argument('--distance', help='Terminal separations in m')

    oracle = sub.add_parser('oracle', parents=[common], help='Exhaustive search on a tiny instance')
    oracle.add_argument('--config', help='Path to a TOML configuration file (optional)')
    oracle.add_argument('--relays', type=int, default=2, help='Relay count (default: 2)')
    oracle.add_argument('--slots', type=int, default=2, help='Slot count (default: 2)')

    check = sub.add_parser('check', help='Run the property test-suite')
    check.add_argument('pytest_args', nargs=argparse.REMAINDER, help='Extra arguments passed to pytest')
    return parser


def _overrides(args: argparse.Namespace) -> List[str]:
    out = []
    flags = [('seed', 'experiment.seed'), ('trials', 'experiment.trials'), ('workers', 'experiment.workers'),
             ('fixed_beta', 'continuous.beta')]
    for attr, key in flags:
        value = getattr(args, attr, None)
        if value is not None:
            out.append(f"{key}={value}")
    for attr, key in [('utility', 'experiment.utility'), ('solver', 'experiment.solver'), ('out', 'experiment.output')]:
        value = getattr(args, attr, None)
        if value is not None:
            out.append(f'{key}="{value}"')
    if args.formats:
        out.append("experiment.formats=[" + ", ".join(f'"{f}"' for f in args.formats) + "]")
    if args.fixed_power:
        out.append('continuous.power="max"')
    if args.timing is not None:
        out.append(f"experiment.record_wall_time={str(args.timing).lower()}")
    return out


def _sweep_overrides(args: argparse.Namespace) -> List[str]:
    for attr, axis in (('ps_dbm', 'ps_dbm'), ('pr_dbm', 'pr_dbm'), ('distance', 'distance')):
        text = getattr(args, attr)
        if text is not None:
            grid = parse_grid(text)
            return [f'experiment.sweep="{axis}"', "experiment.values=[" + ", ".join(repr(v) for v in grid) + "]"]
    return []


GRID_FLAGS = ('--ps-dbm', '--pr-dbm', '--distance')


def _join_grid_values(argv: List[str]) -> List[str]:
    """Attach grid values to their flag so a leading minus sign is not read as an option."""
    out = []
    i = 0
    while i < len(argv):
        if argv[i] in GRID_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith('-') and argv[i + 1] != '--':
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
            continue
        out.append(argv[i])
        i += 1
    return out


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.INFO
    if getattr(args, 'verbose', False):
        level = logging.DEBUG
    elif getattr(args, 'quiet', False):
        level = logging.WARNING
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')


def _run_check(args: argparse.Namespace) -> int:
    import pytest

    tests = Path(__file__).resolve().parent.parent / 'tests'
    if not tests.is_dir():
        print(f"test-suite not found at {tests}", file=sys.stderr)
        return EXIT_CONFIG
    return int(pytest.main([str(tests), *args.pytest_args]))


def _run_experiment(args: argparse.Namespace) -> int:
    from .harness import run_experiment, emit_results

    config_path = getattr(args, 'config', None)
    config = load_config(config_path)
    overrides = list(args.overrides) + _overrides(args)
    if args.command == 'sweep':
        overrides += _sweep_overrides(args)
    elif args.command == 'oracle':
        overrides += ['experiment.solver="exhaustive"', 'experiment.sweep="none"', 'experiment.values=[]',
                      f'system.relays={args.relays}', f'system.slots={args.slots}', 'system.initial_charge_j=[]']
        if args.trials is None:
            overrides.append('experiment.trials=1')
    experiment = experiment_config_from_config(apply_overrides(config, overrides))

    print(f"Running {experiment.solver.value} / {experiment.kind.value}: "
          f"{experiment.trials} trial(s) x {len(experiment.grid())} sweep value(s)")
    if config_path:
        print(f"Using configuration file: {config_path}")
    result = run_experiment(experiment)

    for row in result.summary:
        if row.metric == 'utility':
            label = 'all' if row.sweep_value is None else f"{row.sweep_value:g}"
            print(f"  {label:>8}  utility {row.mean / experiment.system.T_c / 1e6:10.4f} Mbps "
                  f"(stderr {row.stderr / experiment.system.T_c / 1e6:.4f}, n={row.count})")
    if experiment.output:
        for fmt in experiment.formats:
            for path in emit_results(result.records, result.summary, experiment.output, fmt):
                print(f"Wrote {path}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point of the ``ehrelay`` command; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(_join_grid_values(sys.argv[1:] if argv is None else list(argv)))
    except SystemExit as exc:
        return int(exc.code or 0)

    _configure_logging(args)
    try:
        if args.command == 'check':
            return _run_check(args)
        return _run_experiment(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GuardError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except EhRelayError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == '__main__':
    sys.exit(main())
