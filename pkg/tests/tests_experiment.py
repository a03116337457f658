"""
RISNET tests
Perform test on the sweep runner, result files, presets and
experiment configuration files
"""

# External Imports
# Import only with "import package",
# it will make explicity in the code where it came from.
import dataclasses
import json
import logging
import pathlib
import numpy
import pytest

# Internal imports
# Import only with "from x import y", to simplify the code.
from risnet.common.exceptions import InvalidConfigError
from risnet.common.exceptions import InvalidOptionError
from risnet.common.exceptions import UnsupportedProtocolError
from risnet.channel import PhaseConfig
from risnet.detequiv import net_sum_rate_det
from risnet.detequiv import sinr_det
from risnet.experiment import COLUMNS
from risnet.experiment import PRESETS
from risnet.experiment import Experiment
from risnet.experiment import check_ballpark
from risnet.experiment import emit_results
from risnet.experiment import experiment_from_dict
from risnet.experiment import load_experiment
from risnet.experiment import preset_experiment
from risnet.experiment import read_results
from risnet.experiment import run_experiment
from risnet.experiment import validate_experiment
from risnet.optimize import GaOptions
from risnet.optimize import PgaOptions
from risnet.scenario import default_figure_scenario
from risnet.scenario import replace_scenario

CONFIGS = pathlib.Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def sweep(toy):
    return Experiment(
        name="toy-sweep", scenario=toy, axis="P_max", values=(2.0, 10.0),
        protocols=("dft", "de"), designs=("random", "scsi_pga", "none"),
        outputs=("sinr_det", "sinr_mc", "netrate_det", "netrate_mc",
                 "overhead"),
        samples=100, seed=3, pga=PgaOptions(max_iters=3))


def test_experiment_is_validated(toy):
    values = {"name": "x", "scenario": toy, "axis": "P_max",
              "values": (1.0,), "protocols": ("dft",),
              "designs": ("random",), "outputs": ("sinr_det",)}
    Experiment(**values)
    for change in ({"axis": "sigma2"}, {"values": ()}, {"designs": ("best",)},
                   {"outputs": ()}, {"samples": -1}, {"format": "xml"},
                   {"axis": "N", "values": (2.5,)}):
        with pytest.raises(InvalidOptionError):
            Experiment(**{**values, **change})
    with pytest.raises(UnsupportedProtocolError):
        Experiment(**{**values, "protocols": ("ls",)})


def test_rows_follow_the_sweep(sweep):
    table = run_experiment(sweep, threads=1)
    rows = table.rows()
    assert len(table) == 12
    assert list(rows[0]) == list(COLUMNS)
    assert [(row["point"], row["protocol"], row["design"]) for row in rows[:6]] == [
        (0, "dft", "random"), (0, "dft", "scsi_pga"), (0, "dft", "none"),
        (0, "de", "random"), (0, "de", "scsi_pga"), (0, "de", "none")]
    assert all(row["status"] == "ok" for row in rows)
    assert all(row["experiment"] == "toy-sweep" for row in rows)
    assert all(row["L"] == 0 for row in rows if row["design"] == "none")
    assert all(row["netrate_inst_bps_hz"] is None for row in rows)


def test_rows_hold_the_deterministic_values(sweep, toy):
    rows = run_experiment(sweep, threads=1).rows()
    row = rows[6]
    assert (row["point"], row["protocol"], row["design"]) == (1, "dft",
                                                              "random")
    scenario = replace_scenario(toy, P_max=10.0)
    theta = PhaseConfig.random(toy.L, toy.N, (3, 1))
    assert row["sinr_det_mean"] == pytest.approx(
        float(numpy.mean(sinr_det(scenario, theta, "dft"))), rel=1e-12)
    assert row["netrate_det_bps_hz"] == pytest.approx(
        net_sum_rate_det(scenario, theta, "dft"), rel=1e-12)
    assert row["overhead_symbols"] == pytest.approx(2.0 * toy.K)
    assert row["loss_factor"] == pytest.approx(1.0 - 2.0 * toy.K / toy.tau_C)
    assert row["sinr_mc_mean"] > 0
    assert row["P_max_w"] == 10.0


def test_threads_do_not_change_results(sweep):
    single = emit_results(run_experiment(sweep, threads=1))
    pooled = emit_results(run_experiment(sweep, threads=2))
    assert single == pooled


def test_unrequested_outputs_are_empty(sweep):
    experiment = dataclasses.replace(sweep, outputs=("netrate_det",),
                                     designs=("random",))
    row = run_experiment(experiment).rows()[0]
    assert row["netrate_det_bps_hz"] is not None
    assert row["sinr_det_mean"] is None
    assert row["sinr_mc_mean"] is None
    assert row["netrate_mc_bps_hz"] is None


def test_training_longer_than_the_block(sweep, toy):
    experiment = dataclasses.replace(
        sweep, scenario=replace_scenario(toy, tau_C=5.0), designs=("random",))
    rows = run_experiment(experiment).rows()
    dft = [row for row in rows if row["protocol"] == "dft"]
    de = [row for row in rows if row["protocol"] == "de"]
    assert all(row["status"] == "infeasible" for row in dft)
    assert all(row["overhead_symbols"] == pytest.approx(6.0) for row in dft)
    assert all(row["netrate_det_bps_hz"] is None for row in dft)
    assert all(row["status"] == "ok" for row in de)


def test_failing_point_does_not_stop_the_run(sweep, tmp_path):
    debug = tmp_path / "debug.txt"
    experiment = dataclasses.replace(
        sweep, axis="N", values=(0, 4), designs=("random",),
        debug=str(debug))
    rows = run_experiment(experiment).rows()
    assert [row["status"] for row in rows] == ["error", "error", "ok", "ok"]
    assert rows[0]["error"].startswith("InvalidOptionError")
    assert rows[1]["error"] == rows[0]["error"]
    # One report per failed point, not per protocol and design.
    assert debug.read_text().count("Sweep Point:") == 1


def test_icsi_design_rows(toy):
    experiment = Experiment(
        name="icsi", scenario=toy, axis="P_max", values=(10.0,),
        protocols=("dft", "de"), designs=("icsi_ga",),
        outputs=("netrate_inst", "overhead"), samples=10,
        ga=GaOptions(population_size=6, generations=3), icsi_realizations=2)
    rows = run_experiment(experiment).rows()
    assert rows[0]["status"] == "ok"
    assert rows[0]["netrate_inst_bps_hz"] > 0
    assert rows[1]["status"] == "skipped"
    no_samples = dataclasses.replace(experiment, samples=0)
    assert run_experiment(no_samples).rows()[0]["status"] == "skipped"


def test_training_overhead_of_the_large_system():
    experiment = Experiment(
        name="overhead", scenario=default_figure_scenario("fig4"), axis="N",
        values=(100, 320), protocols=("dft", "de"), designs=("random",),
        outputs=("overhead",), samples=0)
    rows = run_experiment(experiment).rows()
    assert round(rows[0]["overhead_symbols"], 2) == 686.67
    assert rows[0]["overhead_sim_symbols"] == pytest.approx(700.0)
    assert rows[0]["status"] == "ok"
    assert rows[1]["overhead_symbols"] == pytest.approx(20.0)
    assert round(rows[2]["overhead_symbols"], 2) == 2153.33
    assert rows[2]["status"] == "infeasible"


@pytest.mark.parametrize("format", ["csv", "json"])
def test_result_files(sweep, tmp_path, format):
    experiment = dataclasses.replace(sweep, values=(10.0,),
                                     designs=("random", "none"))
    table = run_experiment(experiment)
    path = tmp_path / f"results.{format}"
    text = emit_results(table, str(path), format)
    assert path.read_text() == text
    loaded = read_results(str(path))
    assert loaded.columns == COLUMNS
    for original, parsed in zip(table.rows(), loaded.rows()):
        assert parsed["sinr_mc_mean"] == original["sinr_mc_mean"]
        assert parsed["netrate_inst_bps_hz"] is None
        assert parsed["point"] == original["point"]


def test_csv_layout(sweep):
    experiment = dataclasses.replace(sweep, values=(10.0,),
                                     designs=("random",), protocols=("de",))
    lines = emit_results(run_experiment(experiment)).splitlines()
    assert lines[0] == ",".join(COLUMNS)
    assert len(lines) == 2
    with pytest.raises(InvalidOptionError):
        emit_results(run_experiment(experiment), format="xml")


def test_ballpark_mismatch_is_reported(sweep, tmp_path):
    debug = tmp_path / "debug.txt"
    reference = {"value": 10.0, "protocol": "de", "design": "random",
                 "column": "netrate_det_bps_hz", "reference": 1e6}
    experiment = dataclasses.replace(sweep, designs=("random",),
                                     ballpark=(reference,), debug=str(debug))
    table = run_experiment(experiment)
    mismatches = check_ballpark(table, experiment)
    assert len(mismatches) == 1
    assert mismatches[0]["deviation"] == pytest.approx(1.0, abs=1e-3)
    assert "Ballpark Mismatches" in debug.read_text()


def test_ballpark_mismatch_is_logged_without_debug_file(sweep, caplog):
    reference = {"value": 10.0, "protocol": "de", "design": "random",
                 "column": "sinr_det_mean", "reference": 1e6}
    experiment = dataclasses.replace(sweep, designs=("random",),
                                     outputs=("sinr_det",), samples=0,
                                     ballpark=(reference,))
    with caplog.at_level(logging.WARNING, logger="risnet.experiment"):
        table = run_experiment(experiment)
    assert all(row["status"] == "ok" for row in table.rows())
    assert "Ballpark Mismatches" in caplog.text
    assert "beta_2:" in caplog.text
    assert "kappa_2:" in caplog.text


def test_presets():
    for name in PRESETS:
        experiment = preset_experiment(name)
        assert experiment.name == name
    desk = preset_experiment("fig2-desk")
    assert (desk.scenario.M, desk.scenario.K, desk.scenario.L,
            desk.scenario.N) == (16, 4, 4, 16)
    assert preset_experiment("fig4").values[-1] == 320
    with pytest.raises(InvalidOptionError):
        preset_experiment("fig5")


def test_fig4_warns_about_the_longest_training():
    warnings = validate_experiment(preset_experiment("fig4"))
    assert len(warnings) == 1
    assert "N = 320" in warnings[0]
    assert "dft" in warnings[0]


def test_experiment_from_dict():
    experiment = experiment_from_dict({
        "preset": "fig4", "sweep": {"axis": "N", "values": [20]},
        "samples": 5, "ga": {"population_size": 4, "generations": 2}})
    assert experiment.values == (20,)
    assert experiment.samples == 5
    assert experiment.ga.population_size == 4
    assert experiment.protocols == preset_experiment("fig4").protocols
    for data in ({"colour": 1},
                 {"preset": "fig2", "pga": {"epsilon": -1.0}},
                 {"preset": "fig2", "pga": {"speed": 2}},
                 {"preset": "fig2", "sweep": {"axis": "N"}},
                 {"scenario": {"M": 4}, "protocols": ["dft"]},
                 {"preset": "fig2", "protocols": ["ls"]}):
        with pytest.raises(InvalidConfigError):
            experiment_from_dict(data)


def test_shipped_configuration_files():
    desk = load_experiment(str(CONFIGS / "experiment_desk.json"))
    assert desk.seed == 7
    assert desk.pga.max_iters == 50
    assert validate_experiment(desk) == []
    coarse = load_experiment(str(CONFIGS / "experiment_fig4_coarse.json"))
    assert coarse.values == (20, 100, 240)
    assert coarse.ga.seed == 3


def test_load_experiment_rejects_broken_json(tmp_path):
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps({"preset": "fig2"})[:-1])
    with pytest.raises(InvalidConfigError):
        load_experiment(str(path))


@pytest.mark.slow
def test_element_sweep_trends_on_desk_system():
    experiment = preset_experiment("fig4-desk")
    assert experiment.values == (10, 30, 50, 80, 120)
    rows = run_experiment(experiment).rows()
    assert all(row["status"] == "ok" for row in rows)
    dft = [row for row in rows if row["protocol"] == "dft"]
    de = [row for row in rows if row["protocol"] == "de"]
    for row in dft:
        expected = (row["N"] * row["L"] / row["M"] + 1.0) * row["K"]
        assert row["overhead_symbols"] == pytest.approx(expected, rel=1e-12)
    assert dft[0]["overhead_symbols"] == pytest.approx(130.0 / 3.0)
    assert all(row["overhead_symbols"] == row["K"] for row in de)
    # More elements help until the training of every element dominates.
    dft_rates = numpy.array([row["netrate_det_bps_hz"] for row in dft])
    best = int(numpy.argmax(dft_rates))
    assert 0 < best < len(dft_rates) - 1
    de_rates = numpy.array([row["netrate_det_bps_hz"] for row in de])
    assert numpy.all(numpy.diff(de_rates) >= 0.0)


@pytest.mark.slow
def test_reference_sinr_values_on_full_system(caplog):
    experiment = dataclasses.replace(
        preset_experiment("fig2"), values=(10.0,), designs=("scsi_pga",),
        outputs=("sinr_det",), samples=0, pga=PgaOptions(max_iters=20))
    with caplog.at_level(logging.WARNING, logger="risnet.experiment"):
        table = run_experiment(experiment)
    rows = {row["protocol"]: row for row in table.rows()}
    assert all(row["status"] == "ok" for row in rows.values())
    expected = 0
    for reference in experiment.ballpark:
        observed = rows[reference["protocol"]]["sinr_det_mean"]
        if abs(observed - reference["reference"]) > 0.25 * reference["reference"]:
            expected += 1
    mismatches = check_ballpark(table, experiment)
    assert len(mismatches) == expected
    # A mismatch is reported with the link statistics, never raised.
    if mismatches:
        assert "kappa_d:" in caplog.text
        assert "beta_1:" in caplog.text
