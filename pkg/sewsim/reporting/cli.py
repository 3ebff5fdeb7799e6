"""Command-line entry point.

Example:
    sewsim run --scenario sewsim/reference/scenarios/bau.json --out out/
    sewsim compare --out out/ out/bau.traj out/wtr.traj
    sewsim validate --calibration my_bundle/ --scenario my_scenario.json

Exit codes: 0 on success, 2 for invalid inputs, 3 when a simulation fails.
"""

import argparse
import logging
import sys
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from pathlib import Path

from sewsim.calibration_utils.calibration_builder import Calibration, parse_calibration
from sewsim.calibration_utils.scenario import ScenarioSpec, load_scenario, parse_scenario, serialize_scenario
from sewsim.errors import (
    ConfigError,
    FingerprintMismatchError,
    SchemaError,
    SimulationError,
    SingularEconomyError,
    UnknownComponentError,
)
from sewsim.model.engine import Trajectory, check_scenario, compare, run_scenario
from sewsim.reference import REFERENCE_CALIBRATION
from sewsim.reporting import (
    TRAJECTORY_SUFFIX,
    OutputFormat,
    emit_comparison,
    emit_components,
    emit_doughnut,
    emit_timeseries,
    load_trajectory,
    save_trajectory,
)

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SIMULATION = 3
INPUT_ERRORS = (ConfigError, FileNotFoundError, UnknownComponentError, FingerprintMismatchError, SingularEconomyError)


def parse_years(text: str) -> tuple[int, int]:
    """Parse a ``start:end`` horizon."""
    start, separator, end = text.partition(":")
    try:
        if not separator:
            raise ValueError
        return int(start), int(end)
    except ValueError:
        msg = f"expected <start>:<end>, got '{text}'"
        raise argparse.ArgumentTypeError(msg) from None


def _parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="Log debug messages")

    parser = argparse.ArgumentParser(prog="sewsim", description="Social-ecological macro simulator")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", parents=[common], help="Simulate scenarios and write their tables")
    run.add_argument("--calibration", type=Path, default=REFERENCE_CALIBRATION, help="Calibration bundle directory")
    run.add_argument("--scenario", dest="scenarios", action="append", type=Path, required=True, help="Scenario file (repeatable)")
    run.add_argument("--out", type=Path, required=True, help="Output directory")
    run.add_argument("--format", dest="output_format", choices=[f.value for f in OutputFormat], default=OutputFormat.CSV.value)
    run.add_argument("--years", type=parse_years, help="Horizon override, e.g. 2020:2050")
    run.add_argument("--jobs", type=int, default=1, help="Scenarios simulated in parallel")

    compare_parser = commands.add_parser("compare", parents=[common], help="Compare saved trajectories")
    compare_parser.add_argument("--out", type=Path, required=True, help="Output directory")
    compare_parser.add_argument("--format", dest="output_format", choices=[f.value for f in OutputFormat], default=OutputFormat.CSV.value)
    compare_parser.add_argument("trajectories", nargs="+", type=Path, help=f"Trajectory files ({TRAJECTORY_SUFFIX})")

    validate = commands.add_parser("validate", parents=[common], help="Check a calibration bundle and scenarios")
    validate.add_argument("--calibration", type=Path, default=REFERENCE_CALIBRATION, help="Calibration bundle directory")
    validate.add_argument("--scenario", dest="scenarios", action="append", type=Path, default=[], help="Scenario file (repeatable)")
    return parser.parse_args(argv)


def _run_worker(scenario_document: str, calibration_path: str) -> dict:
    """Run one scenario in a worker process; errors come back as plain messages."""
    try:
        scenario = parse_scenario(scenario_document)
        return {"trajectory": run_scenario(scenario, parse_calibration(calibration_path)).to_dict()}
    except INPUT_ERRORS as e:
        return {"error": "input", "message": str(e)}
    except SimulationError as e:
        return {"error": "simulation", "message": str(e)}


def simulate_all(scenarios: Sequence[ScenarioSpec], calibration: Calibration, jobs: int = 1) -> list[Trajectory]:
    """Run scenarios, in a process pool when ``jobs`` > 1, keeping their order."""
    if jobs <= 1 or len(scenarios) == 1:
        return [run_scenario(scenario, calibration) for scenario in scenarios]
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        results = list(
            executor.map(_run_worker, [serialize_scenario(s) for s in scenarios], repeat(str(calibration.bundle_path))),
        )
    trajectories = []
    for result in results:
        match result.get("error"):
            case "input":
                raise ConfigError(result["message"])
            case "simulation":
                raise SimulationError(result["message"])
        trajectories.append(Trajectory.from_dict(result["trajectory"]))
    return trajectories


def run(args: argparse.Namespace) -> int:
    """Simulate the scenarios and write every table."""
    calibration = parse_calibration(args.calibration)
    scenarios = [load_scenario(path) for path in args.scenarios]
    if args.years is not None:
        scenarios = [scenario.with_horizon(*args.years) for scenario in scenarios]
    names = [scenario.name for scenario in scenarios]
    if duplicates := sorted({name for name in names if names.count(name) > 1}):
        msg = f"Scenario names must be unique, got {', '.join(duplicates)} more than once"
        raise SchemaError(msg, field="name")
    for scenario in scenarios:
        check_scenario(scenario, calibration)

    trajectories = simulate_all(scenarios, calibration, args.jobs)
    output_format = OutputFormat(args.output_format)
    for trajectory in trajectories:
        emit_timeseries(trajectory, args.out, output_format)
        emit_doughnut(trajectory, args.out, output_format)
        emit_components(trajectory, args.out, output_format)
        save_trajectory(trajectory, args.out / trajectory.scenario)
    if len(trajectories) > 1:
        emit_comparison(compare(trajectories), args.out, output_format)
    LOGGER.info(f"Wrote the outputs of {', '.join(names)} to {args.out}")
    return EXIT_OK


def compare_saved(args: argparse.Namespace) -> int:
    """Compare trajectory files."""
    trajectories = [load_trajectory(path) for path in args.trajectories]
    try:
        comparison = compare(trajectories)
    except FingerprintMismatchError:
        raise
    except ValueError as e:
        raise ConfigError(str(e)) from e
    emit_comparison(comparison, args.out, OutputFormat(args.output_format))
    LOGGER.info(f"Wrote the comparison of {len(trajectories)} trajectories to {args.out}")
    return EXIT_OK


def validate(args: argparse.Namespace) -> int:
    """Parse a calibration and scenarios without simulating."""
    calibration = parse_calibration(args.calibration)
    for path in args.scenarios:
        check_scenario(load_scenario(path), calibration)
    LOGGER.info(f"{args.calibration} is valid (fingerprint {calibration.fingerprint[:12]})")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line.

    Args:
        argv: Arguments without the program name, sys.argv by default.

    Returns:
        The exit code.
    """
    args = _parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        match args.command:
            case "run":
                return run(args)
            case "compare":
                return compare_saved(args)
            case "validate":
                return validate(args)
    except INPUT_ERRORS as e:
        LOGGER.error(e.args[0] if isinstance(e, KeyError) and e.args else str(e))  # noqa: TRY400
        return EXIT_INPUT
    except SimulationError as e:
        LOGGER.error(str(e))  # noqa: TRY400
        return EXIT_SIMULATION
    msg = f"Unknown command {args.command}"
    raise ValueError(msg)


if __name__ == "__main__":
    sys.exit(main())
