"""Command line: run experiments, presets, validation and the selftest."""

# External Imports
# Import only with "import package",
# it will make explicity in the code where it came from.

# Turns all annotations into string literals.
# This is one exception to the external import rule.
from __future__ import annotations
import argparse
import dataclasses
import logging
import sys
import numpy

# Internal Imports
# Import only with "from x import y", to simplify the code.

from .common.exceptions import Error
from .common.constants import PROTOCOL_DE
from .common.constants import PROTOCOL_DFT
from .common.constants import PROTOCOL_PERFECT
from .channel import PhaseConfig
from .detequiv import sinr_det
from .detequiv import sinr_det_noris
from .estimation import information_ordering
from .experiment import FORMATS
from .experiment import PRESETS
from .experiment import STATUS_ERROR
from .experiment import emit_results
from .experiment import load_experiment
from .experiment import preset_experiment
from .experiment import run_experiment
from .experiment import validate_experiment
from .montecarlo import McConfig
from .montecarlo import validate_covariance
from .optimize import PgaOptions
from .optimize import pga_optimize
from .optimize import project_unit_modulus
from .scenario import default_figure_scenario
from .scenario import no_ris
from .scenario import replace_scenario
from .utils.utils import stream
from .utils.utils import threads_from_env
from .version import __version__

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2

SELFTEST_SAMPLES = 10000
SELFTEST_COVARIANCE_TOLERANCE = 0.1


def _toy_scenario():
    return default_figure_scenario("fig2", {"M": 4, "K": 2, "L": 1, "N": 2})


def _check_covariance(seed: int) -> tuple:
    scenario = _toy_scenario()
    theta = PhaseConfig.random(scenario.L, scenario.N, seed)
    deviations = []
    for protocol in (PROTOCOL_DFT, PROTOCOL_DE):
        report = validate_covariance(
            scenario, theta, protocol,
            McConfig(n_samples=SELFTEST_SAMPLES, seed=seed), threads=1)
        deviations.append(report.max_deviation)
        deviations.append(float(report.orthogonality.max()))
    worst = max(deviations)
    return worst < SELFTEST_COVARIANCE_TOLERANCE, f"worst deviation {worst:.4f}"


def _check_perfect_limit(seed: int) -> tuple:
    scenario = replace_scenario(_toy_scenario(), rho_p=1e30)
    theta = PhaseConfig.random(scenario.L, scenario.N, seed)
    dft = sinr_det(scenario, theta, PROTOCOL_DFT)
    perfect = sinr_det(scenario, theta, PROTOCOL_PERFECT)
    error = float(numpy.max(numpy.abs(dft - perfect) / perfect))
    return error < 1e-6, f"relative error {error:.2e}"


def _check_noris(seed: int) -> tuple:
    scenario = _toy_scenario()
    baseline = no_ris(scenario)
    general = sinr_det(baseline, PhaseConfig.ones(0, scenario.N), PROTOCOL_DE)
    scalar = sinr_det_noris(scenario)
    error = float(numpy.max(numpy.abs(general - scalar) / scalar))
    return error < 1e-10, f"relative error {error:.2e}"


def _check_ordering(seed: int) -> tuple:
    scenario = _toy_scenario()
    theta = PhaseConfig.random(scenario.L, scenario.N, seed)
    gammas = [sinr_det(scenario, theta, protocol)
              for protocol in (PROTOCOL_PERFECT, PROTOCOL_DFT, PROTOCOL_DE)]
    tolerance = 1.0 + 1e-12
    ordered = (numpy.all(gammas[0] * tolerance >= gammas[1])
               and numpy.all(gammas[1] * tolerance >= gammas[2]))
    ordered = bool(ordered) and information_ordering(scenario, theta)
    return ordered, "perfect >= dft >= de"


def _check_pga(seed: int) -> tuple:
    scenario = _toy_scenario()
    _, trace = pga_optimize(scenario, PROTOCOL_DFT,
                            PgaOptions(max_iters=20, init="random", seed=seed))
    objectives = numpy.array([point.objective for point in trace])
    monotone = bool(numpy.all(numpy.diff(objectives) >= 0.0))
    return monotone, f"{len(trace) - 1} steps, objective {objectives[-1]:.6g}"


def _check_projection(seed: int) -> tuple:
    rng = stream(seed)
    x = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    once = project_unit_modulus(x)
    twice = project_unit_modulus(once)
    error = max(float(numpy.max(numpy.abs(numpy.abs(once) - 1.0))),
                float(numpy.max(numpy.abs(twice - once))))
    return error < 1e-12, f"max error {error:.2e}"


SELFTEST_CHECKS = (
    ("covariance oracle", _check_covariance),
    ("perfect CSI limit", _check_perfect_limit),
    ("no-RIS reduction", _check_noris),
    ("protocol ordering", _check_ordering),
    ("PGA monotonicity", _check_pga),
    ("unit-modulus projection", _check_projection),
)


def run_selftest(seed: int = 0) -> list:
    """
    Runs the internal consistency checks at toy dimensions.

    Arguments:
        seed: Seed of every random draw.

    Returns:
        A list of (name, passed, detail) tuples.
    """

    results = []
    for name, check in SELFTEST_CHECKS:
        try:
            passed, detail = check(seed)
        except Error as error:
            passed, detail = False, f"{type(error).__name__}: {error}"
        logger.info("Selftest %s: %s (%s)", name,
                    "PASS" if passed else "FAIL", detail)
        results.append((name, passed, detail))
    return results


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--samples", type=int,
                        help="Monte-Carlo samples per point, 0 disables sampling")
    common.add_argument("--out", help="output file, stdout when not set")
    common.add_argument("--format", choices=FORMATS, help="output format")
    common.add_argument("--threads", type=int,
                        help="worker threads, default RISNET_THREADS or 1")
    common.add_argument("--log-level", default="WARNING",
                        choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    common.add_argument("--debug", help="file receiving diagnostics")

    parser = argparse.ArgumentParser(
        prog="risnet",
        description="Distributed RIS downlink simulator.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)
    run = commands.add_parser("run", parents=[common],
                              help="run an experiment file")
    run.add_argument("config")
    preset = commands.add_parser("preset", parents=[common],
                                 help="run a predefined experiment")
    preset.add_argument("name", choices=PRESETS)
    validate = commands.add_parser("validate", parents=[common],
                                   help="check an experiment file")
    validate.add_argument("config")
    commands.add_parser("selftest", parents=[common],
                        help="run the consistency checks")
    return parser


def _apply_flags(experiment, args):
    changes = {}
    for name in ("seed", "samples", "debug", "format"):
        value = getattr(args, name)
        if value is not None:
            changes[name] = value
    return dataclasses.replace(experiment, **changes)


def _run(experiment, args) -> int:
    experiment = _apply_flags(experiment, args)
    table = run_experiment(experiment, threads_from_env(args.threads))
    text = emit_results(table, args.out, experiment.format)
    if args.out is None:
        sys.stdout.write(text)
    failed = [row for row in table.rows() if row["status"] == STATUS_ERROR]
    if failed:
        sys.stderr.write(f"{len(failed)} of {len(table)} rows failed.\n")
        return EXIT_ERROR
    return EXIT_OK


def main(argv: list = None) -> int:
    """
    Entry point of the risnet command.

    Arguments:
        argv: Arguments without the program name, sys.argv when None.

    Returns:
        0 on success, 1 for runtime or configuration errors,
        2 for usage errors.
    """

    try:
        args = _parser().parse_args(argv)
    except SystemExit as exit_:
        return EXIT_OK if exit_.code in (0, None) else EXIT_USAGE

    logging.basicConfig(level=getattr(logging, args.log_level),
                        stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            return _run(load_experiment(args.config), args)
        if args.command == "preset":
            return _run(preset_experiment(args.name), args)
        if args.command == "validate":
            experiment = _apply_flags(load_experiment(args.config), args)
            for warning in validate_experiment(experiment):
                sys.stdout.write(f"warning: {warning}\n")
            sys.stdout.write(f"{experiment.name}: {len(experiment.values)} "
                             f"points over {experiment.axis} are valid.\n")
            return EXIT_OK
        results = run_selftest(args.seed or 0)
        for name, passed, detail in results:
            sys.stdout.write(f"{'PASS' if passed else 'FAIL'} {name} "
                             f"({detail})\n")
        return EXIT_OK if all(passed for _, passed, _ in results) else EXIT_ERROR
    except (Error, OSError) as error:
        sys.stderr.write(f"error: {error}\n")
        return EXIT_ERROR
