"""
RISNET tests
Perform test on the phase designs: projected gradient ascent on the
deterministic net sum-rate and the genetic algorithm on instantaneous CSI
"""

# External Imports
# Import only with "import package",
# it will make explicity in the code where it came from.
import csv
import numpy
import pytest

# Internal imports
# Import only with "from x import y", to simplify the code.
from risnet.common.exceptions import ConstraintViolationError
from risnet.common.exceptions import InvalidOptionError
from risnet.common.exceptions import UnsupportedProtocolError
from risnet.common.constants import STREAM_REALIZATION
from risnet.channel import PhaseConfig
from risnet.channel import sample_channels
from risnet.detequiv import net_sum_rate_det
from risnet.estimation import estimate
from risnet.estimation import estimate_mmse_dft
from risnet.optimize import GaOptions
from risnet.optimize import PgaOptions
from risnet.optimize import _RateModel
from risnet.optimize import emit_trace
from risnet.optimize import ga_optimize_icsi
from risnet.optimize import icsi_average_rate
from risnet.optimize import numeric_gradient
from risnet.optimize import objective_scsi
from risnet.optimize import pga_optimize
from risnet.optimize import project_unit_modulus
from risnet.optimize import random_search
from risnet.precoding import instantaneous_net_sum_rate
from risnet.scenario import default_figure_scenario
from risnet.scenario import no_ris
from risnet.scenario import replace_scenario
from risnet.scenario import scenario_from_dict


@pytest.fixture
def strong():
    # A RIS close to the BS, so its links weigh on the objective.
    return scenario_from_dict({
        "M": 4, "K": 2, "L": 1, "N": 4,
        "geometry": {"ris_positions": [[0.0, 20.0, 0.0]]}})


@pytest.fixture
def dft_estimates(toy, toy_theta):
    realization = sample_channels(toy, toy_theta, 8)
    return estimate(toy, toy_theta, realization, "dft", 8)


def test_projection():
    rng = numpy.random.default_rng(0)
    x = rng.standard_normal(12) + 1j * rng.standard_normal(12)
    once = project_unit_modulus(x)
    assert numpy.allclose(numpy.abs(once), 1.0, rtol=0.0, atol=1e-12)
    assert numpy.allclose(numpy.angle(once), numpy.angle(x))
    assert numpy.allclose(project_unit_modulus(once), once, rtol=0.0,
                          atol=1e-12)
    assert project_unit_modulus(numpy.zeros(1, dtype=complex))[0] == 1.0


def test_options_are_validated():
    for options in ({"epsilon": 0.0}, {"backtrack_beta": 1.0},
                    {"fd_step": 0.0}, {"init": "zeros"}, {"max_iters": 0}):
        with pytest.raises(InvalidOptionError):
            PgaOptions(**options)
    for options in ({"population_size": 1}, {"mutation_rate": 1.5},
                    {"elitism_count": 50}, {"generations": 0}):
        with pytest.raises(InvalidOptionError):
            GaOptions(**options)


def test_objective(toy, toy_theta):
    model = _RateModel(toy, "dft")
    assert model.value(toy_theta.phi) == pytest.approx(
        objective_scsi(toy, "dft", toy_theta), rel=1e-12)
    with pytest.raises(ConstraintViolationError):
        objective_scsi(toy, "dft", PhaseConfig(toy_theta.phi * 1.01))


@pytest.mark.parametrize("protocol", ["dft", "de", "perfect"])
def test_gradient_matches_full_evaluation(strong, protocol):
    theta = PhaseConfig.random(strong.L, strong.N, 3)
    step = 1e-5
    model = _RateModel(strong, protocol)
    gradient = numeric_gradient(strong, protocol, theta, step)
    expected = numpy.empty(theta.size, dtype=complex)
    for i in range(theta.size):
        values = []
        for delta in (step, -step, 1j * step, -1j * step):
            phi = theta.phi.copy()
            phi[i] += delta
            values.append(model.value(phi))
        expected[i] = ((values[0] - values[1])
                       + 1j * (values[2] - values[3])) / (2.0 * step)
    assert numpy.allclose(gradient, expected, rtol=1e-6,
                          atol=1e-6 * numpy.max(numpy.abs(expected)))


def test_gradient_predicts_phase_rotations(strong):
    theta = PhaseConfig.random(strong.L, strong.N, 4)
    gradient = numeric_gradient(strong, "dft", theta)
    direction = numpy.random.default_rng(1).standard_normal(theta.size)
    h = 1e-3
    forward = objective_scsi(
        strong, "dft", PhaseConfig(theta.phi * numpy.exp(1j * h * direction)))
    backward = objective_scsi(
        strong, "dft", PhaseConfig(theta.phi * numpy.exp(-1j * h * direction)))
    secant = (forward - backward) / (2.0 * h)
    predicted = numpy.real(numpy.vdot(gradient, 1j * theta.phi * direction))
    assert abs(predicted) > 0.0
    assert secant == pytest.approx(predicted, rel=1e-3)


def test_gradient_vanishes_without_ris_links():
    scenario = default_figure_scenario(
        "fig2", {"M": 4, "K": 2, "L": 1, "N": 4, "alpha_2": 50.0})
    theta = PhaseConfig.random(1, 4, 2)
    gradient = numeric_gradient(scenario, "dft", theta)
    assert numpy.linalg.norm(gradient) < 1e-8


def test_small_gradient_step_ascends(strong):
    theta = PhaseConfig.random(strong.L, strong.N, 6)
    gradient = numeric_gradient(strong, "dft", theta)
    moved = PhaseConfig(project_unit_modulus(
        theta.phi + 1e-3 / numpy.max(numpy.abs(gradient)) * gradient))
    assert (objective_scsi(strong, "dft", moved)
            >= objective_scsi(strong, "dft", theta) - 1e-10)


@pytest.mark.parametrize("init", ["all-ones", "random"])
def test_pga_is_monotone(strong, init):
    phases, trace = pga_optimize(strong, "dft",
                                 PgaOptions(max_iters=40, init=init, seed=2))
    objectives = [point.objective for point in trace]
    assert all(later >= earlier
               for earlier, later in zip(objectives, objectives[1:]))
    assert [point.iteration for point in trace] == sorted(
        point.iteration for point in trace)
    phases.check()
    assert objective_scsi(strong, "dft", phases) == pytest.approx(
        objectives[-1], rel=1e-10)
    assert objectives[-1] > objectives[0]


def test_pga_large_epsilon_stops_after_one_step(strong):
    _, trace = pga_optimize(strong, "dft", PgaOptions(epsilon=1e9))
    assert len(trace) <= 2


def test_pga_without_ris(toy):
    phases, trace = pga_optimize(no_ris(toy), "de")
    assert phases.size == 0
    assert len(trace) == 1


def test_random_search(strong):
    best, value = random_search(strong, "dft", draws=5, seed=3)
    values = [objective_scsi(strong, "dft",
                             PhaseConfig.random(strong.L, strong.N, (3, draw)))
              for draw in range(5)]
    assert value == pytest.approx(max(values), rel=1e-12)
    assert objective_scsi(strong, "dft", best) == pytest.approx(value,
                                                                rel=1e-12)
    with pytest.raises(InvalidOptionError):
        random_search(strong, "dft", draws=0)


def test_emit_trace(tmp_path, strong):
    _, trace = pga_optimize(strong, "dft", PgaOptions(max_iters=3))
    path = tmp_path / "trace.csv"
    emit_trace(trace, str(path))
    with open(path, newline="") as file_:
        rows = list(csv.reader(file_))
    assert rows[0] == ["iteration", "objective", "step"]
    assert len(rows) == len(trace) + 1
    assert float(rows[-1][1]) == trace[-1].objective


def test_ga_matches_instantaneous_rate(toy, dft_estimates):
    options = GaOptions(population_size=12, generations=8, seed=1)
    phases, trace = ga_optimize_icsi(toy, dft_estimates, options)
    assert len(trace) == options.generations + 1
    assert instantaneous_net_sum_rate(dft_estimates, toy, phases) == (
        pytest.approx(trace[-1], rel=1e-9))


def test_ga_elitism_keeps_the_best(toy, dft_estimates):
    options = GaOptions(population_size=10, generations=15, elitism_count=2,
                        seed=4)
    _, trace = ga_optimize_icsi(toy, dft_estimates, options)
    for earlier, later in zip(trace, trace[1:]):
        assert later >= earlier - 1e-12 * abs(earlier)


def test_ga_without_variation_is_constant(toy, dft_estimates):
    options = GaOptions(population_size=6, generations=5, mutation_rate=0.0,
                        seed=2)
    angles = PhaseConfig.random(toy.L, toy.N, 7).angles
    initial = numpy.tile(angles, (options.population_size, 1))
    _, trace = ga_optimize_icsi(toy, dft_estimates, options, initial)
    assert trace == pytest.approx([trace[0]] * len(trace), rel=1e-12)


def test_ga_is_reproducible(toy, dft_estimates):
    options = GaOptions(population_size=8, generations=4, seed=9)
    first, first_trace = ga_optimize_icsi(toy, dft_estimates, options)
    second, second_trace = ga_optimize_icsi(toy, dft_estimates, options)
    assert numpy.array_equal(first.phi, second.phi)
    assert first_trace == second_trace


def test_ga_needs_link_estimates(toy, toy_theta):
    realization = sample_channels(toy, toy_theta, 8)
    estimates = estimate(toy, toy_theta, realization, "de", 8)
    with pytest.raises(UnsupportedProtocolError):
        ga_optimize_icsi(toy, estimates, GaOptions(population_size=4,
                                                   generations=1))


def test_icsi_design_beats_its_warm_start(toy, toy_theta):
    options = GaOptions(population_size=10, generations=10, seed=5)
    result = icsi_average_rate(toy, options, realizations=3, seed=6,
                               warm_start=toy_theta)
    assert len(result.rates) == 3
    assert result.mean_rate == pytest.approx(numpy.mean(result.rates))
    for index, rate in enumerate(result.rates):
        seed = (6, STREAM_REALIZATION, index)
        realization = sample_channels(toy, toy_theta, seed)
        estimates = estimate_mmse_dft(toy, toy_theta, realization, seed)
        baseline = instantaneous_net_sum_rate(estimates, toy, toy_theta)
        assert rate >= baseline - 1e-9 * abs(baseline)


def test_icsi_threads_do_not_change_results(toy):
    options = GaOptions(population_size=6, generations=3, seed=1)
    single = icsi_average_rate(toy, options, realizations=4, seed=2, threads=1)
    pooled = icsi_average_rate(toy, options, realizations=4, seed=2, threads=3)
    assert numpy.array_equal(single.rates, pooled.rates)
    with pytest.raises(InvalidOptionError):
        icsi_average_rate(toy, options, realizations=0)


@pytest.mark.slow
def test_pga_beats_random_phases_on_full_system():
    scenario = default_figure_scenario("fig2")
    _, best_random = random_search(scenario, "dft", draws=20, seed=0)
    _, trace = pga_optimize(scenario, "dft")
    assert trace[-1].objective >= 1.2 * best_random


@pytest.mark.slow
@pytest.mark.parametrize("P_max", [2.0, 10.0, 20.0])
def test_direct_estimation_wins_after_training_loss(P_max):
    scenario = replace_scenario(default_figure_scenario("fig2"),
                                P_max=P_max, tau_C=2000.0)
    options = PgaOptions(max_iters=50)
    rates = {}
    for protocol in ("dft", "de"):
        theta, _ = pga_optimize(scenario, protocol, options)
        rates[protocol] = net_sum_rate_det(scenario, theta, protocol)
    baseline = net_sum_rate_det(no_ris(scenario),
                                PhaseConfig.ones(0, scenario.N), "de")
    assert rates["de"] > rates["dft"] > baseline


@pytest.mark.slow
def test_instantaneous_design_beats_statistical_design():
    scenario = default_figure_scenario("fig2", {"M": 8, "K": 2, "L": 2,
                                                "N": 8})
    theta, _ = pga_optimize(scenario, "dft")
    statistical = net_sum_rate_det(scenario, theta, "dft")
    result = icsi_average_rate(scenario, GaOptions(seed=0), realizations=10,
                               seed=0, warm_start=theta)
    assert result.mean_rate >= statistical
