"""
Experiments: a scenario template swept over one axis, evaluated for
several protocols and phase designs, and emitted as a result table.
"""

# External Imports
# Import only with "import package",
# it will make explicity in the code where it came from.

# Turns all annotations into string literals.
# This is one exception to the external import rule.
from __future__ import annotations
import concurrent.futures
import csv
import dataclasses
import io
import json
import logging
import numpy

# Internal Imports
# Import only with "from x import y", to simplify the code.

from .common.exceptions import Error
from .common.exceptions import InvalidConfigError
from .common.exceptions import InvalidOptionError
from .common.exceptions import SimulationPointError
from .common.exceptions import TrainingExceedsCoherenceError
from .common.exceptions import UnsupportedProtocolError
from .common.constants import BALLPARK_TOLERANCE
from .common.constants import ICSI_PRESET_REALIZATIONS
from .common.constants import MC_PRESET_SAMPLES
from .common.constants import PROTOCOL_DE
from .common.constants import PROTOCOL_DFT
from .common.constants import PROTOCOL_PERFECT
from .common.constants import PROTOCOLS
from .common.debug import debug_ballpark
from .common.resultobject import ResultRecord
from .channel import PhaseConfig
from .detequiv import sinr_det
from .estimation import information_ordering
from .estimation import simulated_subphases
from .estimation import training_subphases
from .montecarlo import McConfig
from .montecarlo import ergodic_sinr_mc
from .optimize import GaOptions
from .optimize import PgaOptions
from .optimize import icsi_average_rate
from .optimize import pga_optimize
from .precoding import net_rate
from .scenario import Scenario
from .scenario import default_figure_scenario
from .scenario import no_ris
from .scenario import replace_scenario
from .scenario import scenario_from_dict
from .utils.utils import threads_from_env

logger = logging.getLogger(__name__)

AXES = ("P_max", "N", "M", "K", "L")
DESIGN_RANDOM = "random"
DESIGN_SCSI = "scsi_pga"
DESIGN_ICSI = "icsi_ga"
DESIGN_NONE = "none"
DESIGNS = (DESIGN_RANDOM, DESIGN_SCSI, DESIGN_ICSI, DESIGN_NONE)
OUTPUTS = ("sinr_det", "sinr_mc", "netrate_det", "netrate_mc",
           "netrate_inst", "overhead")
FORMATS = ("csv", "json")

STATUS_OK = "ok"
STATUS_SKIPPED = "skipped"
STATUS_INFEASIBLE = "infeasible"
STATUS_ERROR = "error"

# Column order of every result table.
COLUMNS = ("experiment", "point", "axis", "value", "protocol", "design",
           "M", "K", "L", "N", "P_max_w", "seed", "samples",
           "overhead_symbols", "overhead_sim_symbols", "loss_factor",
           "sinr_det_mean", "sinr_mc_mean", "sinr_mc_stderr",
           "netrate_det_bps_hz", "netrate_mc_bps_hz", "netrate_inst_bps_hz",
           "status", "error")
_INTEGER_COLUMNS = ("point", "M", "K", "L", "N", "seed", "samples")
_TEXT_COLUMNS = ("experiment", "axis", "protocol", "design", "status", "error")


@dataclasses.dataclass(frozen=True, eq=False)
class Experiment:
    """
    Definition of a sweep.

    Arguments:
        name: Name copied to every row.
        scenario: Scenario template.
        axis: Swept parameter, one of P_max, N, M, K or L.
        values: Values of the swept parameter.
        protocols: Estimation protocols.
        designs: Phase designs, random, scsi_pga, icsi_ga or none.
        outputs: Requested outputs.
        samples: Monte-Carlo samples per point, 0 disables sampling.
        seed: Master seed.
        pga: Options of the S-CSI design.
        ga: Options of the I-CSI design.
        icsi_realizations: Channel realizations of the I-CSI design.
        ballpark: Reference values, dictionaries with value, protocol,
            design, column and reference.
        debug: If set, indicates the file to save the debug output created.
        format: Output format, csv or json.

    Exceptions:
        InvalidOptionError: Raised when the definition is inconsistent.
    """

    name: str
    scenario: Scenario
    axis: str
    values: tuple
    protocols: tuple
    designs: tuple
    outputs: tuple
    samples: int = MC_PRESET_SAMPLES
    seed: int = 0
    pga: PgaOptions = PgaOptions()
    ga: GaOptions = GaOptions()
    icsi_realizations: int = ICSI_PRESET_REALIZATIONS
    ballpark: tuple = ()
    debug: str = None
    format: str = "csv"

    def __post_init__(self):
        if self.axis not in AXES:
            raise InvalidOptionError(
                f"Unknown sweep axis {self.axis!r}, use one of {', '.join(AXES)}.")
        if len(self.values) == 0:
            raise InvalidOptionError("The sweep has no values.")
        if self.axis != "P_max":
            for value in self.values:
                if int(value) != value or value < 0:
                    raise InvalidOptionError(
                        f"Sweep values of {self.axis} must be integers, "
                        f"got {value!r}.")
        if len(self.protocols) == 0:
            raise InvalidOptionError("The protocol list is empty.")
        for protocol in self.protocols:
            if protocol not in PROTOCOLS:
                raise UnsupportedProtocolError(protocol)
        self._check_names("design", self.designs, DESIGNS)
        self._check_names("output", self.outputs, OUTPUTS)
        if self.samples < 0:
            raise InvalidOptionError("samples must not be negative.")
        if self.seed < 0:
            raise InvalidOptionError("seed must not be negative.")
        if self.icsi_realizations < 1:
            raise InvalidOptionError("icsi_realizations must be at least 1.")
        if self.format not in FORMATS:
            raise InvalidOptionError(
                f"Unknown format {self.format!r}, use csv or json.")

    @staticmethod
    def _check_names(kind: str, names: tuple, known: tuple) -> None:
        if len(names) == 0:
            raise InvalidOptionError(f"The {kind} list is empty.")
        for name in names:
            if name not in known:
                raise InvalidOptionError(
                    f"Unknown {kind} {name!r}, use one of {', '.join(known)}.")


@dataclasses.dataclass(eq=False)
class ResultTable:
    """
    Rows of an experiment in sweep order.

    Arguments:
        records: List of ResultRecord, one per point, protocol and design.
        columns: Column order.
    """

    records: list
    columns: tuple = COLUMNS

    def rows(self) -> list:
        """Returns the rows as dictionaries in column order."""

        return [record.asdict(self.columns) for record in self.records]

    def __len__(self) -> int:
        return len(self.records)


def point_scenario(experiment: Experiment, value) -> Scenario:
    """
    Scenario of one sweep point.

    Arguments:
        experiment: Experiment definition.
        value: Value of the swept parameter.
    """

    if experiment.axis == "P_max":
        return replace_scenario(experiment.scenario, P_max=float(value))
    return replace_scenario(experiment.scenario,
                            **{experiment.axis: int(value)})


def _overhead(scenario: Scenario, protocol: str, row: dict) -> float:
    S = training_subphases(scenario, protocol)
    row["overhead_symbols"] = S * scenario.tau_S
    if protocol == PROTOCOL_DFT:
        row["overhead_sim_symbols"] = (simulated_subphases(scenario)
                                       * scenario.tau_S)
    else:
        row["overhead_sim_symbols"] = row["overhead_symbols"]
    return S


def _phases(experiment: Experiment, scenario: Scenario, protocol: str,
            design: str, random_phases: PhaseConfig) -> PhaseConfig:
    if design == DESIGN_RANDOM:
        return random_phases
    if design == DESIGN_SCSI:
        phases, _ = pga_optimize(scenario, protocol, experiment.pga)
        return phases
    return PhaseConfig.ones(scenario.L, scenario.N)


def _evaluate(experiment: Experiment, scenario: Scenario, protocol: str,
              design: str, random_phases: PhaseConfig, index: int,
              row: dict) -> None:
    outputs = experiment.outputs
    if design == DESIGN_NONE:
        scenario = no_ris(scenario)
    S = _overhead(scenario, protocol, row)
    # Raises before any optimization when the training does not fit.
    row["loss_factor"] = net_rate(numpy.zeros(scenario.K), S,
                                  scenario).loss_factor

    if design == DESIGN_ICSI:
        if "netrate_inst" in outputs:
            result = icsi_average_rate(
                scenario, experiment.ga, experiment.icsi_realizations,
                seed=(experiment.seed, index), threads=1)
            row["netrate_inst_bps_hz"] = result.mean_rate
        return

    theta = _phases(experiment, scenario, protocol, design, random_phases)
    if "sinr_det" in outputs or "netrate_det" in outputs:
        gammas = sinr_det(scenario, theta, protocol)
        row["sinr_det_mean"] = float(gammas.mean())
        row["netrate_det_bps_hz"] = net_rate(gammas, S, scenario).sum_rate
    if experiment.samples > 0 and ("sinr_mc" in outputs
                                   or "netrate_mc" in outputs):
        mc = McConfig(n_samples=experiment.samples, seed=experiment.seed,
                      protocol=protocol)
        result = ergodic_sinr_mc(scenario, theta, mc, threads=1)
        row["sinr_mc_mean"] = float(result.gamma.mean())
        row["sinr_mc_stderr"] = float(result.stderr.mean())
        row["netrate_mc_bps_hz"] = net_rate(result.gamma, S, scenario).sum_rate
    if "sinr_det" not in outputs:
        row["sinr_det_mean"] = None
    if "netrate_det" not in outputs:
        row["netrate_det_bps_hz"] = None
    if "sinr_mc" not in outputs:
        row["sinr_mc_mean"] = row["sinr_mc_stderr"] = None
    if "netrate_mc" not in outputs:
        row["netrate_mc_bps_hz"] = None


def _skip_reason(experiment: Experiment, protocol: str, design: str) -> str:
    if design == DESIGN_ICSI and protocol != PROTOCOL_DFT:
        return f"the I-CSI design needs the {PROTOCOL_DFT} protocol"
    if design == DESIGN_ICSI and experiment.samples == 0:
        return "the I-CSI design needs sampling, samples is 0"
    return None


def _point_context(experiment: Experiment, index: int, value,
                   protocol: str = None, design: str = None) -> dict:
    context = {"experiment": experiment.name, "point": index,
               "axis": experiment.axis, "value": value}
    if protocol is not None:
        context.update(protocol=protocol, design=design)
    return context


def _build_point(experiment: Experiment, index: int, value) -> Scenario:
    try:
        return point_scenario(experiment, value)
    except Error as error:
        raise SimulationPointError(_point_context(experiment, index, value),
                                   error, experiment.debug) from error


def _evaluate_checked(experiment: Experiment, scenario: Scenario,
                      protocol: str, design: str, random_phases: PhaseConfig,
                      index: int, row: dict) -> None:
    try:
        _evaluate(experiment, scenario, protocol, design, random_phases,
                  index, row)
    except TrainingExceedsCoherenceError:
        raise
    except Error as error:
        context = _point_context(experiment, index, row["value"],
                                 protocol, design)
        raise SimulationPointError(context, error, experiment.debug) from error


def _error_text(failure: SimulationPointError) -> str:
    return f"{type(failure.cause).__name__}: {failure.cause}"


def _evaluate_point(experiment: Experiment, index: int, value) -> list:
    records = []
    try:
        scenario = _build_point(experiment, index, value)
    except SimulationPointError as failure:
        logger.error("Point %d failed: %s", index, failure.cause)
        scenario = None
        point_failure = failure
    if scenario is not None:
        random_phases = PhaseConfig.random(scenario.L, scenario.N,
                                           (experiment.seed, index))
        if (PROTOCOL_DFT in experiment.protocols
                and PROTOCOL_DE in experiment.protocols):
            information_ordering(scenario, PhaseConfig.ones(scenario.L,
                                                            scenario.N))

    for protocol in experiment.protocols:
        for design in experiment.designs:
            row = {"experiment": experiment.name, "point": index,
                   "axis": experiment.axis, "value": value,
                   "protocol": protocol, "design": design,
                   "seed": experiment.seed, "samples": experiment.samples}
            if scenario is None:
                row.update(status=STATUS_ERROR,
                           error=_error_text(point_failure))
                records.append(ResultRecord(row))
                continue
            row.update(M=scenario.M, K=scenario.K, L=scenario.L,
                       N=scenario.N, P_max_w=scenario.config.P_max)
            if design == DESIGN_NONE:
                row["L"] = 0
            reason = _skip_reason(experiment, protocol, design)
            if reason is not None:
                logger.warning("Skipping %s with %s at point %d: %s",
                               design, protocol, index, reason)
                row.update(status=STATUS_SKIPPED, error=reason)
                records.append(ResultRecord(row))
                continue
            try:
                _evaluate_checked(experiment, scenario, protocol, design,
                                  random_phases, index, row)
                row["status"] = STATUS_OK
            except TrainingExceedsCoherenceError as error:
                logger.warning("Point %d (%s, %s) is infeasible: %s",
                               index, protocol, design, error)
                row.update(status=STATUS_INFEASIBLE, error=str(error))
            except SimulationPointError as failure:
                logger.error("Point %d (%s, %s) failed: %s",
                             index, protocol, design, failure.cause)
                row.update(status=STATUS_ERROR, error=_error_text(failure))
            records.append(ResultRecord(row))
    logger.info("Point %d (%s = %s) done", index, experiment.axis, value)
    return records


def run_experiment(experiment: Experiment, threads: int = None) -> ResultTable:
    """
    Evaluates every sweep point, protocol and design. A failing point is
    recorded with its error and the run continues.

    Arguments:
        experiment: Experiment definition.
        threads: Worker threads, points run in parallel,
            by default RISNET_THREADS or 1.
    """

    logger.info("Experiment %s: %d points over %s", experiment.name,
                len(experiment.values), experiment.axis)
    workers = threads_from_env(threads)
    points = list(enumerate(experiment.values))
    if workers == 1:
        results = [_evaluate_point(experiment, index, value)
                   for index, value in points]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(
                lambda point: _evaluate_point(experiment, *point), points))
    table = ResultTable([record for records in results for record in records])
    if experiment.ballpark:
        check_ballpark(table, experiment)
    logger.info("Experiment %s finished with %d rows", experiment.name,
                len(table))
    return table


def check_ballpark(table: ResultTable, experiment: Experiment) -> list:
    """
    Compares the table with the reference values of the experiment.
    Deviations above 25 % are logged with the link statistics of the
    scenario and written to the debug file, they never stop the run.

    Arguments:
        table: Result table.
        experiment: Experiment carrying the reference values.

    Returns:
        The list of mismatches.
    """

    mismatches = []
    rows = table.rows()
    for reference in experiment.ballpark:
        matches = [row for row in rows
                   if row["status"] == STATUS_OK
                   and row["protocol"] == reference["protocol"]
                   and row["design"] == reference["design"]
                   and numpy.isclose(float(row["value"]),
                                     float(reference["value"]))
                   and row[reference["column"]] is not None]
        if not matches:
            continue
        observed = matches[0][reference["column"]]
        deviation = abs(observed - reference["reference"]) / abs(
            reference["reference"])
        if deviation > BALLPARK_TOLERANCE:
            mismatches.append(dict(reference, observed=observed,
                                   deviation=deviation))
    if mismatches:
        report = debug_ballpark(mismatches, experiment.scenario)
        logger.warning("%d reference values of %s deviate by more than "
                       "%d%%\n%s", len(mismatches), experiment.name,
                       round(BALLPARK_TOLERANCE * 100), report)
        if experiment.debug is not None:
            with open(experiment.debug, "a") as file_:
                file_.write(report)
    return mismatches


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, numpy.bool_)):
        return str(bool(value))
    if isinstance(value, (int, numpy.integer)):
        return str(int(value))
    if isinstance(value, (float, numpy.floating)):
        return repr(float(value))
    return str(value)


def emit_results(table: ResultTable, path: str = None,
                 format: str = "csv") -> str:
    """
    Serializes a table with a stable column order and full precision floats.

    Arguments:
        table: Result table.
        path: If set, the text is also written to this file.
        format: csv or json.

    Exceptions:
        InvalidOptionError: Raised for an unknown format.
    """

    if format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows():
            writer.writerow([_cell(row[column]) for column in table.columns])
        text = buffer.getvalue()
    elif format == "json":
        rows = [{column: (float(value) if isinstance(value, numpy.floating)
                          else value)
                 for column, value in row.items()}
                for row in table.rows()]
        text = json.dumps({"columns": list(table.columns), "rows": rows},
                          indent=2) + "\n"
    else:
        raise InvalidOptionError(f"Unknown format {format!r}, use csv or json.")
    if path is not None:
        with open(path, "w", newline="") as file_:
            file_.write(text)
    return text


def _parse_cell(column: str, text: str):
    if text == "":
        return None
    if column in _TEXT_COLUMNS:
        return text
    if column in _INTEGER_COLUMNS:
        return int(text)
    return float(text)


def read_results(path: str, format: str = None) -> ResultTable:
    """
    Parses a table written by emit_results.

    Arguments:
        path: File name.
        format: csv or json, by default taken from the file extension.
    """

    if format is None:
        format = "json" if path.endswith(".json") else "csv"
    with open(path, "r", newline="") as file_:
        if format == "json":
            data = json.load(file_)
            columns = tuple(data["columns"])
            records = [ResultRecord(row) for row in data["rows"]]
        else:
            reader = csv.reader(file_)
            columns = tuple(next(reader))
            records = [ResultRecord({column: _parse_cell(column, text)
                                     for column, text in zip(columns, line)})
                       for line in reader]
    return ResultTable(records, columns)


_DESK_FIG2 = {"M": 16, "N": 16, "L": 4, "K": 4}
_DESK_FIG4 = {"M": 30, "K": 10, "L": 10}
_P_MAX_SWEEP = tuple(float(value) for value in range(2, 21, 2))
_FIG4_N = (20, 60, 80, 100, 160, 240, 320)


def preset_experiment(name: str) -> Experiment:
    """
    Returns a predefined experiment: fig2, fig3 and fig4 on the full
    system, fig2-desk and fig4-desk at reduced dimensions.

    Arguments:
        name: Name of the preset.

    Exceptions:
        InvalidOptionError: Raised for an unknown preset.
    """

    if name == "fig2":
        ballpark = tuple(
            {"value": 10.0, "protocol": protocol, "design": DESIGN_SCSI,
             "column": "sinr_det_mean", "reference": reference}
            for protocol, reference in ((PROTOCOL_PERFECT, 0.0675),
                                        (PROTOCOL_DFT, 0.0561),
                                        (PROTOCOL_DE, 0.0542)))
        return Experiment(
            name=name, scenario=default_figure_scenario("fig2"),
            axis="P_max", values=_P_MAX_SWEEP,
            protocols=(PROTOCOL_PERFECT, PROTOCOL_DFT, PROTOCOL_DE),
            designs=(DESIGN_RANDOM, DESIGN_SCSI),
            outputs=("sinr_det", "sinr_mc"), ballpark=ballpark)
    if name == "fig3":
        ballpark = tuple(
            {"value": 10.0, "protocol": protocol, "design": design,
             "column": "netrate_det_bps_hz", "reference": reference}
            for protocol, design, reference in (
                (PROTOCOL_DE, DESIGN_SCSI, 1.481),
                (PROTOCOL_DFT, DESIGN_SCSI, 1.285),
                (PROTOCOL_DFT, DESIGN_RANDOM, 0.728),
                (PROTOCOL_DE, DESIGN_NONE, 0.500)))
        return Experiment(
            name=name, scenario=default_figure_scenario("fig3"),
            axis="P_max", values=_P_MAX_SWEEP,
            protocols=(PROTOCOL_PERFECT, PROTOCOL_DFT, PROTOCOL_DE),
            designs=(DESIGN_RANDOM, DESIGN_SCSI, DESIGN_NONE),
            outputs=("netrate_det", "netrate_mc"), ballpark=ballpark)
    if name == "fig4":
        ballpark = tuple(
            {"value": 100, "protocol": PROTOCOL_DFT, "design": design,
             "column": column, "reference": reference}
            for design, column, reference in (
                (DESIGN_ICSI, "netrate_inst_bps_hz", 0.690),
                (DESIGN_SCSI, "netrate_det_bps_hz", 0.607)))
        return Experiment(
            name=name, scenario=default_figure_scenario("fig4"),
            axis="N", values=_FIG4_N,
            protocols=(PROTOCOL_DFT, PROTOCOL_DE, PROTOCOL_PERFECT),
            designs=(DESIGN_SCSI, DESIGN_ICSI),
            outputs=("netrate_det", "netrate_inst", "overhead"),
            ballpark=ballpark)
    if name == "fig2-desk":
        return Experiment(
            name=name, scenario=default_figure_scenario("fig2", _DESK_FIG2),
            axis="P_max", values=(2.0, 8.0, 14.0, 20.0),
            protocols=(PROTOCOL_DFT, PROTOCOL_DE),
            designs=(DESIGN_RANDOM,), outputs=("sinr_det", "sinr_mc"),
            samples=10000)
    if name == "fig4-desk":
        return Experiment(
            name=name, scenario=default_figure_scenario("fig4", _DESK_FIG4),
            axis="N", values=(10, 30, 50, 80, 120),
            protocols=(PROTOCOL_DFT, PROTOCOL_DE), designs=(DESIGN_SCSI,),
            outputs=("netrate_det", "overhead"), samples=0)
    raise InvalidOptionError(
        f"Unknown preset {name!r}, use one of {', '.join(PRESETS)}.")


PRESETS = ("fig2", "fig3", "fig4", "fig2-desk", "fig4-desk")

_EXPERIMENT_KEYS = ("name", "preset", "scenario", "sweep", "protocols",
                    "designs", "outputs", "samples", "seed", "pga", "ga",
                    "icsi_realizations", "ballpark", "format", "debug")


def experiment_from_dict(data: dict) -> Experiment:
    """
    Creates an experiment from a dictionary, see the configuration page
    of the documentation for the schema. Keys given next to a preset
    replace the preset values.

    Arguments:
        data: Dictionary, usually parsed from JSON.

    Exceptions:
        InvalidConfigError: Raised for unknown keys or invalid values.
    """

    unknown = set(data) - set(_EXPERIMENT_KEYS)
    if unknown:
        raise InvalidConfigError(
            f"Unknown experiment keys: {', '.join(sorted(unknown))}.")
    try:
        values = {}
        if "preset" in data:
            base = preset_experiment(data["preset"])
            values = {field.name: getattr(base, field.name)
                      for field in dataclasses.fields(Experiment)}
        if "scenario" in data:
            values["scenario"] = scenario_from_dict(data["scenario"])
        elif "scenario" not in values:
            values["scenario"] = scenario_from_dict({})
        if "sweep" in data:
            sweep = dict(data["sweep"])
            if set(sweep) != {"axis", "values"}:
                raise InvalidConfigError(
                    "sweep needs exactly the keys axis and values.")
            values["axis"] = sweep["axis"]
            values["values"] = tuple(sweep["values"])
        for key in ("name", "samples", "seed", "icsi_realizations",
                    "format", "debug"):
            if key in data:
                values[key] = data[key]
        for key in ("protocols", "designs", "outputs"):
            if key in data:
                values[key] = tuple(data[key])
        if "pga" in data:
            values["pga"] = PgaOptions(**data["pga"])
        if "ga" in data:
            values["ga"] = GaOptions(**data["ga"])
        if "ballpark" in data:
            values["ballpark"] = tuple(dict(entry) for entry in data["ballpark"])
        values.setdefault("name", "experiment")
        missing = {"axis", "values", "protocols", "designs",
                   "outputs"} - set(values)
        if missing:
            raise InvalidConfigError(
                f"Missing experiment keys: {', '.join(sorted(missing))}.")
        return Experiment(**values)
    except InvalidOptionError as error:
        raise InvalidConfigError(str(error))
    except (TypeError, ValueError) as error:
        raise InvalidConfigError(f"Invalid options: {error}")


def load_experiment(path: str) -> Experiment:
    """
    Loads an experiment from a JSON file.

    Arguments:
        path: File name.

    Exceptions:
        InvalidConfigError: Raised when the file is not valid JSON
            or has invalid keys.
    """

    with open(path, "r") as file_:
        try:
            data = json.load(file_)
        except json.JSONDecodeError as error:
            raise InvalidConfigError(f"{path}: {error}")
    logger.debug("Loaded experiment file %s", path)
    return experiment_from_dict(data)


def validate_experiment(experiment: Experiment) -> list:
    """
    Builds the scenario of every sweep point without evaluating it.

    Arguments:
        experiment: Experiment definition.

    Returns:
        The list of warnings, one per point and protocol whose
        training does not fit in the coherence block.

    Exceptions:
        Error: Raised by the first point that cannot be built.
    """

    warnings = []
    for index, value in enumerate(experiment.values):
        scenario = point_scenario(experiment, value)
        for protocol in experiment.protocols:
            overhead = training_subphases(scenario, protocol) * scenario.tau_S
            if overhead > scenario.tau_C:
                warnings.append(
                    f"point {index} ({experiment.axis} = {value}): "
                    f"{protocol} training of {overhead:g} symbols exceeds "
                    f"tau_C = {scenario.tau_C:g}")
    return warnings
