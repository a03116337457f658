"""
RIS phase designs: projected gradient ascent on the deterministic
net sum-rate (statistical CSI) and a genetic algorithm on the
instantaneous net sum-rate (instantaneous CSI).
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
import logging
from typing import NamedTuple
import numpy

# Internal Imports
# Import only with "from x import y", to simplify the code.

from .common.exceptions import InvalidOptionError
from .common.exceptions import UnsupportedProtocolError
from .common.constants import GA_CROSSOVER_RATE
from .common.constants import GA_ELITISM
from .common.constants import GA_GENERATIONS
from .common.constants import GA_MUTATION_RATE
from .common.constants import GA_MUTATION_SIGMA
from .common.constants import GA_POPULATION
from .common.constants import GA_TOURNAMENT_SIZE
from .common.constants import GRADIENT_CHUNK
from .common.constants import PGA_BACKTRACK_BETA
from .common.constants import PGA_BACKTRACK_C
from .common.constants import PGA_EPSILON
from .common.constants import PGA_FD_STEP
from .common.constants import PGA_MAX_ITERS
from .common.constants import PGA_MIN_STEP
from .common.constants import PGA_MU0
from .common.constants import PROTOCOL_DFT
from .common.constants import STREAM_GA
from .common.constants import STREAM_REALIZATION
from .channel import PhaseConfig
from .channel import channel_covariances
from .channel import los_bs_ris_matrices
from .channel import los_user_arrays
from .channel import sample_channels
from .detequiv import net_sum_rate_det
from .estimation import EstimateSet
from .estimation import estimate_covariance
from .estimation import estimate_mmse_dft
from .estimation import training_subphases
from .precoding import net_rate
from .scenario import Scenario
from .utils.utils import Seed
from .utils.utils import stream
from .utils.utils import threads_from_env

logger = logging.getLogger(__name__)

INIT_ONES = "all-ones"
INIT_RANDOM = "random"


@dataclasses.dataclass(frozen=True)
class PgaOptions:
    """
    Options of the projected gradient ascent.

    Arguments:
        epsilon: Stops when the squared objective change is below it.
        mu0: Largest move of the first trial step.
        backtrack_beta: Step shrink factor.
        backtrack_c: Armijo slope constant.
        max_iters: Maximum number of iterations.
        fd_step: Finite-difference step.
        init: all-ones or random.
        seed: Seed of the random initialization.
        min_step: Smallest move tried before stopping.

    Exceptions:
        InvalidOptionError: Raised when an option is out of range.
    """

    epsilon: float = PGA_EPSILON
    mu0: float = PGA_MU0
    backtrack_beta: float = PGA_BACKTRACK_BETA
    backtrack_c: float = PGA_BACKTRACK_C
    max_iters: int = PGA_MAX_ITERS
    fd_step: float = PGA_FD_STEP
    init: str = INIT_ONES
    seed: int = 0
    min_step: float = PGA_MIN_STEP

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidOptionError("epsilon must be positive.")
        if not self.mu0 > 0:
            raise InvalidOptionError("mu0 must be positive.")
        if not 0 < self.backtrack_beta < 1:
            raise InvalidOptionError("backtrack_beta must be in (0, 1).")
        if not 0 <= self.backtrack_c < 1:
            raise InvalidOptionError("backtrack_c must be in [0, 1).")
        if self.max_iters < 1:
            raise InvalidOptionError("max_iters must be at least 1.")
        if not self.fd_step > 0:
            raise InvalidOptionError("fd_step must be positive.")
        if self.init not in (INIT_ONES, INIT_RANDOM):
            raise InvalidOptionError(
                f"init must be {INIT_ONES} or {INIT_RANDOM}.")
        if not self.min_step > 0:
            raise InvalidOptionError("min_step must be positive.")


@dataclasses.dataclass(frozen=True)
class GaOptions:
    """
    Options of the genetic algorithm.

    Arguments:
        population_size: Individuals per generation.
        generations: Number of generations.
        crossover_rate: Probability that a pair of parents is crossed.
        mutation_rate: Probability that a gene is mutated.
        mutation_sigma: Standard deviation of a mutation in radians.
        elitism_count: Best individuals copied to the next generation.
        seed: Seed of the algorithm.
        tournament_size: Contenders per tournament.

    Exceptions:
        InvalidOptionError: Raised when an option is out of range.
    """

    population_size: int = GA_POPULATION
    generations: int = GA_GENERATIONS
    crossover_rate: float = GA_CROSSOVER_RATE
    mutation_rate: float = GA_MUTATION_RATE
    mutation_sigma: float = GA_MUTATION_SIGMA
    elitism_count: int = GA_ELITISM
    seed: int = 0
    tournament_size: int = GA_TOURNAMENT_SIZE

    def __post_init__(self):
        if self.population_size < 2:
            raise InvalidOptionError("population_size must be at least 2.")
        if self.generations < 1:
            raise InvalidOptionError("generations must be at least 1.")
        for name in ("crossover_rate", "mutation_rate"):
            if not 0 <= getattr(self, name) <= 1:
                raise InvalidOptionError(f"{name} must be in [0, 1].")
        if self.mutation_sigma < 0:
            raise InvalidOptionError("mutation_sigma must not be negative.")
        if not 0 <= self.elitism_count < self.population_size:
            raise InvalidOptionError(
                "elitism_count must be in [0, population_size).")
        if self.tournament_size < 1:
            raise InvalidOptionError("tournament_size must be at least 1.")


class TracePoint(NamedTuple):
    iteration: int
    objective: float
    step: float


def project_unit_modulus(x: numpy.ndarray) -> numpy.ndarray:
    """
    Closest unit-modulus vector, exp(j arg x), zero entries map to 1.

    Arguments:
        x: Complex vector.
    """

    return numpy.exp(1j * numpy.angle(x))


def _columns(H: numpy.ndarray) -> numpy.ndarray:
    # columns[:, l * N + n] = H_1l[:, n]
    L, M, N = H.shape
    return H.transpose(1, 0, 2).reshape(M, L * N)


def _chunks(size: int):
    for start in range(0, size, GRADIENT_CHUNK):
        yield slice(start, min(start + GRADIENT_CHUNK, size))


class _RateModel:
    """
    Deterministic net sum-rate as a function of the phase vector.

    Everything that does not depend on the phases is computed once.
    The finite differences of the gradient perturb a single element,
    which changes hbar_k by a rank-one term, so every statistic
    is updated instead of rebuilt.
    """

    def __init__(self, scenario: Scenario, protocol: str) -> _RateModel:
        L, N = scenario.L, scenario.N
        H = los_bs_ris_matrices(scenario)
        hbar_d, hbar_2 = los_user_arrays(scenario)
        covariances = channel_covariances(scenario, H)
        C, _ = estimate_covariance(scenario, PhaseConfig.ones(L, N),
                                   protocol, covariances=covariances)
        S = training_subphases(scenario, protocol)
        self.loss = net_rate(numpy.zeros(scenario.K), S, scenario).loss_factor
        self.p = scenario.p
        self.rho = scenario.rho
        self.A = covariances.A
        self.C = C
        self.hbar_d = hbar_d
        self.columns = _columns(H)
        self.coef = hbar_2.transpose(1, 0, 2).reshape(scenario.K, L * N)
        self.trace_C = numpy.real(numpy.trace(C, axis1=1, axis2=2))
        self.trace_CA = numpy.real(numpy.einsum("fmn,knm->fk", C, self.A))
        self.column_norms = numpy.sum(numpy.abs(self.columns) ** 2, axis=0)
        size = L * N
        self.quad_C = numpy.empty((scenario.K, size))
        self.quad_A = numpy.empty((scenario.K, size))
        for chunk in _chunks(size):
            columns = self.columns[:, chunk]
            self.quad_C[:, chunk] = numpy.real(
                numpy.sum(columns.conj() * (self.C @ columns), axis=1))
            self.quad_A[:, chunk] = numpy.real(
                numpy.sum(columns.conj() * (self.A @ columns), axis=1))

    def los(self, phi: numpy.ndarray) -> numpy.ndarray:
        return self.hbar_d + (self.coef * phi) @ self.columns.T

    def _statistics(self, a: numpy.ndarray) -> tuple:
        norms = numpy.sum(numpy.abs(a) ** 2, axis=1)
        gram = a.conj() @ a.T
        quad_C = numpy.real(numpy.einsum("km,fmn,kn->fk", a.conj(), self.C, a))
        quad_A = numpy.real(numpy.einsum("fm,kmn,fn->fk", a.conj(), self.A, a))
        return norms, gram, quad_C, quad_A

    def _rates(self, norms, gram, quad_C, quad_A) -> numpy.ndarray:
        # Leading axes are batch axes, the last two are (f, k).
        p = self.p
        traces = norms + self.trace_C
        cross = numpy.abs(gram) ** 2 + quad_C + quad_A + self.trace_CA
        interference = (numpy.einsum("f,...fk->...k", p, cross)
                        - p * numpy.diagonal(cross, axis1=-2, axis2=-1))
        psi = traces @ p
        gamma = p * traces ** 2 / (interference + psi[..., numpy.newaxis] / self.rho)
        return self.loss * numpy.sum(numpy.log2(1.0 + gamma), axis=-1)

    def value(self, phi: numpy.ndarray) -> float:
        return float(self._rates(*self._statistics(self.los(phi))))

    def gradient(self, phi: numpy.ndarray, step: float) -> numpy.ndarray:
        a = self.los(phi)
        norms, gram, quad_C, quad_A = self._statistics(a)
        # Ca[f, k] = C_f a_k, Aa[f, k] = A_k a_f
        Ca = numpy.einsum("fmn,kn->fkm", self.C, a)
        Aa = numpy.einsum("kmn,fn->fkm", self.A, a)
        result = numpy.empty(phi.size, dtype=complex)
        for chunk in _chunks(phi.size):
            columns = self.columns[:, chunk]
            u = (a.conj() @ columns).T
            X = (Ca.conj() @ columns).transpose(2, 0, 1)
            Y = (Aa.conj() @ columns).transpose(2, 0, 1)
            sC = self.quad_C[:, chunk].T
            sA = self.quad_A[:, chunk].T
            nh = self.column_norms[chunk]
            coef = self.coef[:, chunk].T
            values = []
            for delta in (step, -step, 1j * step, -1j * step):
                d = delta * coef
                d2 = numpy.abs(d) ** 2
                new_norms = (norms + 2.0 * numpy.real(d * u)
                             + d2 * nh[:, numpy.newaxis])
                new_gram = (gram
                            + d[:, numpy.newaxis, :] * u[:, :, numpy.newaxis]
                            + numpy.conj(d[:, :, numpy.newaxis]
                                         * u[:, numpy.newaxis, :])
                            + (numpy.conj(d)[:, :, numpy.newaxis]
                               * d[:, numpy.newaxis, :]
                               * nh[:, numpy.newaxis, numpy.newaxis]))
                new_quad_C = (quad_C
                              + 2.0 * numpy.real(d[:, numpy.newaxis, :] * X)
                              + d2[:, numpy.newaxis, :] * sC[:, :, numpy.newaxis])
                new_quad_A = (quad_A
                              + 2.0 * numpy.real(d[:, :, numpy.newaxis] * Y)
                              + d2[:, :, numpy.newaxis] * sA[:, numpy.newaxis, :])
                values.append(self._rates(new_norms, new_gram,
                                          new_quad_C, new_quad_A))
            d_real = (values[0] - values[1]) / (2.0 * step)
            d_imag = (values[2] - values[3]) / (2.0 * step)
            result[chunk] = d_real + 1j * d_imag
        return result


def objective_scsi(scenario: Scenario, protocol: str,
                   phi: PhaseConfig) -> float:
    """
    Deterministic net sum-rate maximized by the statistical CSI design.

    Arguments:
        scenario: Scenario to use.
        protocol: dft, de or perfect.
        phi: Phases of the RISs.

    Exceptions:
        ConstraintViolationError: Raised when phi is not unit modulus.
    """

    phi.check()
    return net_sum_rate_det(scenario, phi, protocol)


def numeric_gradient(scenario: Scenario, protocol: str, phi: PhaseConfig,
                     fd_step: float = PGA_FD_STEP) -> numpy.ndarray:
    """
    Complex gradient [p]_i = dR/dRe(phi_i) + j dR/dIm(phi_i) from central
    finite differences, perturbations are not projected.

    Arguments:
        scenario: Scenario to use.
        protocol: dft, de or perfect.
        phi: Phases of the RISs.
        fd_step: Finite-difference step.

    Exceptions:
        ConstraintViolationError: Raised when phi is not unit modulus.
    """

    phi.check()
    return _RateModel(scenario, protocol).gradient(phi.phi, fd_step)


def pga_optimize(scenario: Scenario, protocol: str,
                 options: PgaOptions = None) -> tuple:
    """
    Projected gradient ascent with Armijo backtracking.
    A step is accepted only when the projected point does not lower the
    objective, so the accepted objectives never decrease.

    Arguments:
        scenario: Scenario to use.
        protocol: dft, de or perfect.
        options: Algorithm options.

    Returns:
        The best phases and the list of accepted TracePoint entries,
        entry 0 is the initialization.

    Exceptions:
        TrainingExceedsCoherenceError: Raised when the protocol training
            does not fit in the coherence block.
    """

    if options is None:
        options = PgaOptions()
    L, N = scenario.L, scenario.N
    model = _RateModel(scenario, protocol)
    if options.init == INIT_RANDOM:
        phi = PhaseConfig.random(L, N, options.seed).phi
    else:
        phi = PhaseConfig.ones(L, N).phi
    value = model.value(phi)
    trace = [TracePoint(0, value, 0.0)]
    if phi.size == 0:
        return PhaseConfig(phi), trace

    mu = None
    for iteration in range(1, options.max_iters + 1):
        direction = model.gradient(phi, options.fd_step)
        scale = float(numpy.max(numpy.abs(direction)))
        if scale == 0.0:
            logger.debug("Zero gradient at iteration %d", iteration)
            break
        if mu is None:
            mu = options.mu0 / scale
        else:
            mu = min(mu / options.backtrack_beta, options.mu0 / scale)
        accepted = False
        while mu * scale >= options.min_step:
            candidate = project_unit_modulus(phi + mu * direction)
            candidate_value = model.value(candidate)
            slope = float(numpy.real(numpy.vdot(direction, candidate - phi)))
            if candidate_value >= value + options.backtrack_c * max(0.0, slope):
                accepted = True
                break
            mu *= options.backtrack_beta
        if not accepted:
            logger.debug("Step underflow at iteration %d", iteration)
            break
        change = candidate_value - value
        phi, value = candidate, candidate_value
        trace.append(TracePoint(iteration, value, mu))
        logger.debug("PGA iteration %d objective %.10g step %.3e",
                     iteration, value, mu)
        if change ** 2 < options.epsilon:
            break

    logger.info("PGA (%s) finished after %d accepted steps, objective %.6g",
                protocol, len(trace) - 1, value)
    return PhaseConfig(phi), trace


def random_search(scenario: Scenario, protocol: str, draws: int = 20,
                  seed: int = 0) -> tuple:
    """
    Best of several random phase vectors.

    Arguments:
        scenario: Scenario to use.
        protocol: dft, de or perfect.
        draws: Number of random vectors.
        seed: Seed of the draws.

    Returns:
        The best phases and their objective.

    Exceptions:
        InvalidOptionError: Raised when draws is smaller than 1.
    """

    if draws < 1:
        raise InvalidOptionError("draws must be at least 1.")
    model = _RateModel(scenario, protocol)
    best, best_value = None, -numpy.inf
    for draw in range(draws):
        phi = PhaseConfig.random(scenario.L, scenario.N, (seed, draw))
        value = model.value(phi.phi)
        if value > best_value:
            best, best_value = phi, value
    return best, best_value


class _InstantaneousModel:
    """
    Instantaneous net sum-rate of one coherence block for a population
    of phase vectors, evaluated from the per-link estimates.
    """

    def __init__(self, scenario: Scenario,
                 estimates: EstimateSet) -> _InstantaneousModel:
        if estimates.protocol != PROTOCOL_DFT or estimates.h_d_hat is None:
            raise UnsupportedProtocolError(estimates.protocol,
                                           "the I-CSI design")
        S = training_subphases(scenario, estimates.protocol)
        self.loss = net_rate(numpy.zeros(scenario.K), S, scenario).loss_factor
        self.p = scenario.p
        self.rho = scenario.rho
        self.columns = _columns(los_bs_ris_matrices(scenario))
        self.h_d = estimates.h_d_hat
        self.coef = estimates.h_2_hat.transpose(1, 0, 2).reshape(
            scenario.K, scenario.L * scenario.N)
        self.C_tilde = estimates.C_tilde

    def fitness(self, phases: numpy.ndarray) -> numpy.ndarray:
        p = self.p
        h = (self.h_d
             + (self.coef[numpy.newaxis] * phases[:, numpy.newaxis, :])
             @ self.columns.T)
        gram = h.conj() @ h.transpose(0, 2, 1)
        power = numpy.abs(gram) ** 2
        norms = numpy.real(numpy.diagonal(gram, axis1=1, axis2=2))
        signal = p * norms ** 2
        interference = power @ p - p * numpy.diagonal(power, axis1=1, axis2=2)
        projected = numpy.einsum("kmn,pfn->pkfm", self.C_tilde, h)
        leakage = numpy.real(numpy.einsum("pfm,pkfm,f->pk", h.conj(),
                                          projected, p))
        psi = norms @ p
        gamma = signal / (interference + leakage
                          + psi[:, numpy.newaxis] / self.rho)
        return self.loss * numpy.sum(numpy.log2(1.0 + gamma), axis=1)


def _tournament(rng: numpy.random.Generator, fitness: numpy.ndarray,
                count: int, size: int) -> numpy.ndarray:
    contenders = rng.integers(0, fitness.size, (count, size))
    winners = numpy.argmax(fitness[contenders], axis=1)
    return contenders[numpy.arange(count), winners]


def _evolve(model: _InstantaneousModel, options: GaOptions, genes: int,
            rng: numpy.random.Generator, initial: numpy.ndarray = None) -> tuple:
    size = options.population_size
    two_pi = 2.0 * numpy.pi
    population = rng.uniform(0.0, two_pi, (size, genes))
    if initial is not None:
        rows = numpy.atleast_2d(numpy.mod(initial, two_pi))[:size]
        population[:rows.shape[0]] = rows
    fitness = model.fitness(numpy.exp(1j * population))
    trace = [float(fitness.max())]
    children_count = size - options.elitism_count
    pairs = (children_count + 1) // 2

    for generation in range(1, options.generations + 1):
        order = numpy.argsort(-fitness, kind="stable")
        elites = population[order[:options.elitism_count]]

        parents = population[_tournament(rng, fitness, 2 * pairs,
                                         options.tournament_size)]
        first, second = parents[:pairs], parents[pairs:]
        crossed = rng.random(pairs) < options.crossover_rate
        mask = (rng.random((pairs, genes)) < 0.5) & crossed[:, numpy.newaxis]
        children = numpy.concatenate([numpy.where(mask, second, first),
                                      numpy.where(mask, first, second)])
        children = children[:children_count]

        mutated = rng.random(children.shape) < options.mutation_rate
        noise = rng.normal(0.0, options.mutation_sigma, children.shape)
        children = numpy.mod(children + mutated * noise, two_pi)

        population = numpy.concatenate([elites, children])
        fitness = model.fitness(numpy.exp(1j * population))
        trace.append(float(fitness.max()))
        logger.debug("GA generation %d best %.10g", generation, trace[-1])

    best = int(numpy.argmax(fitness))
    return population[best], trace


def ga_optimize_icsi(scenario: Scenario, estimates: EstimateSet,
                     options: GaOptions = None,
                     initial: numpy.ndarray = None) -> tuple:
    """
    Genetic algorithm over the angles in [0, 2 pi)^(LN) maximizing the
    instantaneous net sum-rate of one block of MMSE-DFT estimates.
    Uses tournament selection, uniform crossover, Gaussian angle mutation
    and elitism.

    Arguments:
        scenario: Scenario to use.
        estimates: MMSE-DFT estimates of the block.
        options: Algorithm options.
        initial: Angles of the first individuals, shape (LN,) or (n, LN).

    Returns:
        The best phases and the best fitness of every generation,
        entry 0 is the initial population.

    Exceptions:
        UnsupportedProtocolError: Raised for estimates without
            per-link estimates.
    """

    if options is None:
        options = GaOptions()
    model = _InstantaneousModel(scenario, estimates)
    angles, trace = _evolve(model, options, scenario.L * scenario.N,
                            stream(options.seed, STREAM_GA), initial)
    return PhaseConfig.from_angles(angles), trace


@dataclasses.dataclass(frozen=True, eq=False)
class IcsiResult:
    """
    Outcome of the per-realization I-CSI design.

    Arguments:
        mean_rate: Average instantaneous net sum-rate.
        rates: Instantaneous net sum-rate of every realization.
        phases: Designed phases of every realization.
    """

    mean_rate: float
    rates: numpy.ndarray
    phases: list


def icsi_average_rate(scenario: Scenario, options: GaOptions = None,
                      realizations: int = 5, seed: Seed = 0,
                      warm_start: PhaseConfig = None,
                      threads: int = 1) -> IcsiResult:
    """
    Designs the phases of every channel realization with the genetic
    algorithm and averages the instantaneous net sum-rate.

    Arguments:
        scenario: Scenario to use.
        options: Algorithm options.
        realizations: Number of channel realizations.
        seed: Seed of the realizations and training noise.
        warm_start: If set, the phases used during training and
            the first individual of every population.
        threads: Worker threads, realizations run in parallel.

    Exceptions:
        InvalidOptionError: Raised when realizations is smaller than 1.
    """

    if options is None:
        options = GaOptions()
    if realizations < 1:
        raise InvalidOptionError("realizations must be at least 1.")
    if warm_start is None:
        theta = PhaseConfig.ones(scenario.L, scenario.N)
        initial = None
    else:
        theta = warm_start
        initial = warm_start.angles
    seed = (seed,) if isinstance(seed, (int, numpy.integer)) else tuple(seed)

    def design(index: int) -> tuple:
        draw_seed = seed + (STREAM_REALIZATION, index)
        realization = sample_channels(scenario, theta, draw_seed)
        estimates = estimate_mmse_dft(scenario, theta, realization, draw_seed)
        model = _InstantaneousModel(scenario, estimates)
        angles, trace = _evolve(model, options, scenario.L * scenario.N,
                                stream(options.seed, STREAM_GA, index),
                                initial)
        return PhaseConfig.from_angles(angles), trace[-1]

    workers = threads_from_env(threads)
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(design, range(realizations)))
    rates = numpy.array([rate for _, rate in outcomes])
    logger.info("I-CSI design over %d realizations, mean rate %.6g",
                realizations, rates.mean())
    return IcsiResult(mean_rate=float(rates.mean()), rates=rates,
                      phases=[phases for phases, _ in outcomes])


def emit_trace(trace: list, path: str) -> None:
    """
    Writes an optimizer trace as CSV with columns iteration,
    objective and step.

    Arguments:
        trace: List of TracePoint entries.
        path: File name.
    """

    with open(path, "w", newline="") as file_:
        writer = csv.writer(file_)
        writer.writerow(["iteration", "objective", "step"])
        for point in trace:
            writer.writerow([point.iteration, repr(float(point.objective)),
                             repr(float(point.step))])
