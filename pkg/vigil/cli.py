import argparse
import logging
from pathlib import Path
from typing import Optional, Sequence

from vigil.config import ALERTNESS_CURVE_STEP_MINUTES
from vigil.errors import ConfigError, FormatError, ProtocolViolationError
from vigil.sim_harness import RunConfig, alertness, replay, report, run

_logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_REPORT_MISMATCH = 1
EXIT_CONFIG_ERROR = 2
EXIT_FORMAT_ERROR = 3
EXIT_PROTOCOL_VIOLATION = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Simulated train-driver fatigue monitoring")
    parser.add_argument("--verbose", action=argparse.BooleanOptionalAction)
    subcommands = parser.add_subparsers(dest="command", required=True)

    run_parser = subcommands.add_parser("run", help="Synthesize a scenario and run the monitor over it")
    required_named_args_group = run_parser.add_argument_group("required named arguments")
    required_named_args_group.add_argument("--scenario", type=Path, help="Scenario TOML file", required=True)
    required_named_args_group.add_argument("--seed", type=int, required=True)
    required_named_args_group.add_argument("--out", type=Path, help="Output directory", required=True)
    run_parser.add_argument("--schedule", type=Path, help="Sleep/wake schedule TOML file")
    run_parser.add_argument("--tick", type=float, help="Overrides the scenario's tick, in seconds")
    run_parser.add_argument("--record-bundle", action=argparse.BooleanOptionalAction)
    run_parser.add_argument("--plot", action=argparse.BooleanOptionalAction)

    replay_parser = subcommands.add_parser("replay", help="Run the monitor over a recorded sensor bundle")
    required_named_args_group = replay_parser.add_argument_group("required named arguments")
    required_named_args_group.add_argument("--bundle", type=Path, required=True)
    required_named_args_group.add_argument("--out", type=Path, required=True)
    replay_parser.add_argument("--plot", action=argparse.BooleanOptionalAction)

    report_parser = subcommands.add_parser("report", help="Recompute a run's metrics from its timeline")
    report_parser.add_argument("--timeline", type=Path, required=True)

    alertness_parser = subcommands.add_parser("alertness", help="Tabulate predicted alertness over a schedule")
    required_named_args_group = alertness_parser.add_argument_group("required named arguments")
    required_named_args_group.add_argument("--schedule", type=Path, required=True)
    required_named_args_group.add_argument("--out", type=Path, required=True)
    alertness_parser.add_argument("--step-minutes", type=float, default=ALERTNESS_CURVE_STEP_MINUTES)
    return parser


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "run":
        run_report = run(
            RunConfig(
                scenario_path=args.scenario,
                seed=args.seed,
                out_dir=args.out,
                schedule_path=args.schedule,
                tick=args.tick,
                # argparse will give us None if the user didn't specify the flag
                record_bundle=args.record_bundle is True,
                plot=args.plot is True,
            )
        )
        print("\n".join(f"{k}: {v}" for k, v in run_report.metrics.as_summary_fields().items()))
        return EXIT_OK

    if args.command == "replay":
        replay_report = replay(args.bundle, args.out, plot=args.plot is True)
        print("\n".join(f"{k}: {v}" for k, v in replay_report.metrics.as_summary_fields().items()))
        return EXIT_OK

    if args.command == "report":
        outcome = report(args.timeline)
        print(outcome.text)
        return EXIT_OK if outcome.is_consistent else EXIT_REPORT_MISMATCH

    if args.command == "alertness":
        alertness(args.schedule, args.out, step_minutes=args.step_minutes)
        return EXIT_OK

    raise ValueError(f"Unhandled command {args.command}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO)
    try:
        return _dispatch(args)
    except ConfigError as e:
        _logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG_ERROR
    except FormatError as e:
        _logger.error(f"Malformed input: {e}")
        return EXIT_FORMAT_ERROR
    except ProtocolViolationError as e:
        _logger.error(f"Escalation protocol violated: {e}")
        return EXIT_PROTOCOL_VIOLATION
