"""
Sample averages of the ergodic SINR under MRT and empirical checks
of the closed-form estimate statistics.
"""

# External Imports
# Import only with "import package",
# it will make explicity in the code where it came from.

# Turns all annotations into string literals.
# This is one exception to the external import rule.
from __future__ import annotations
import concurrent.futures
import dataclasses
import logging
import numpy

# Internal Imports
# Import only with "from x import y", to simplify the code.

from .common.exceptions import InvalidOptionError
from .common.exceptions import UnsupportedProtocolError
from .common.constants import MC_CHUNK
from .common.constants import PROTOCOL_DFT
from .common.constants import PROTOCOLS
from .common.constants import STREAM_SAMPLE
from .channel import CovarianceSet
from .channel import PhaseConfig
from .channel import channel_covariances
from .channel import los_aggregate
from .channel import sample_channels
from .estimation import estimate
from .estimation import estimate_covariance
from .estimation import simulated_subphases
from .estimation import training_subphases
from .precoding import net_rate
from .scenario import Scenario
from .utils.utils import relative_frobenius
from .utils.utils import threads_from_env

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class McConfig:
    """
    Monte-Carlo settings.

    Arguments:
        n_samples: Number of channel realizations.
        seed: Master seed, sample i uses the stream (seed, i).
        protocol: dft, de or perfect.

    Exceptions:
        InvalidOptionError: Raised when n_samples is smaller than 1.
        UnsupportedProtocolError: Raised for an unknown protocol.
    """

    n_samples: int
    seed: int = 0
    protocol: str = PROTOCOL_DFT

    def __post_init__(self):
        if self.n_samples < 1:
            raise InvalidOptionError("n_samples must be at least 1.")
        if self.seed < 0:
            raise InvalidOptionError("seed must not be negative.")
        if self.protocol not in PROTOCOLS:
            raise UnsupportedProtocolError(self.protocol)


@dataclasses.dataclass(frozen=True, eq=False)
class McSinr:
    """
    Sample-average SINR of every user.

    Arguments:
        gamma: Plug-in SINR per user.
        stderr: Jackknife standard error per user, NaN below 3 samples.
        n_samples: Number of samples.
        psi: Average tr(P H_hat H_hat^H).
    """

    gamma: numpy.ndarray
    stderr: numpy.ndarray
    n_samples: int
    psi: float


@dataclasses.dataclass(frozen=True, eq=False)
class CovarianceReport:
    """
    Empirical statistics of x_k = h_hat_k - hbar_k against the closed forms.

    Arguments:
        protocol: dft, de or perfect.
        deviation: Relative Frobenius distance of the sample covariance
            of x_k from C_k, per user.
        orthogonality: ||E[e_k x_k^H]||_F / ||C_k||_F per user, with
            e_k = h_k - h_hat_k.
        mean_error: ||E[x_k]|| / sqrt(tr C_k) per user.
        n_samples: Number of samples.
    """

    protocol: str
    deviation: numpy.ndarray
    orthogonality: numpy.ndarray
    mean_error: numpy.ndarray
    n_samples: int

    @property
    def max_deviation(self) -> float:
        return float(numpy.max(self.deviation))


def _sample_seed(mc: McConfig, index: int) -> tuple:
    return (mc.seed, STREAM_SAMPLE, index)


def _draw(scenario: Scenario, theta: PhaseConfig, mc: McConfig,
          index: int, covariances: CovarianceSet) -> tuple:
    seed = _sample_seed(mc, index)
    realization = sample_channels(scenario, theta, seed)
    estimates = estimate(scenario, theta, realization, mc.protocol, seed,
                         covariances)
    return realization.h, estimates.h_hat


def _run_chunks(function, n_samples: int, threads: int) -> list:
    # Chunks are fixed by MC_CHUNK, so results are assembled
    # in the same order for every worker count.
    chunks = [range(start, min(start + MC_CHUNK, n_samples))
              for start in range(0, n_samples, MC_CHUNK)]
    workers = threads_from_env(threads)
    if workers == 1:
        return [function(chunk) for chunk in chunks]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(function, chunks))


def _sinr_terms(scenario: Scenario, theta: PhaseConfig, mc: McConfig,
                threads: int = None) -> tuple:
    p = scenario.p
    covariances = channel_covariances(scenario)

    def run(chunk: range) -> tuple:
        size = len(chunk)
        signal = numpy.empty((size, scenario.K), dtype=complex)
        interference = numpy.empty((size, scenario.K))
        psi = numpy.empty(size)
        for row, index in enumerate(chunk):
            h, h_hat = _draw(scenario, theta, mc, index, covariances)
            # cross[k, f] = h_k^H h_hat_f
            cross = h.conj() @ h_hat.T
            power = numpy.abs(cross) ** 2
            signal[row] = numpy.diag(cross)
            interference[row] = power @ p - p * numpy.diag(power)
            psi[row] = numpy.sum(p * numpy.sum(numpy.abs(h_hat) ** 2, axis=1))
        logger.debug("Monte-Carlo samples %d to %d done",
                     chunk.start, chunk.stop - 1)
        return signal, interference, psi

    results = _run_chunks(run, mc.n_samples, threads)
    signal = numpy.concatenate([result[0] for result in results])
    interference = numpy.concatenate([result[1] for result in results])
    psi = numpy.concatenate([result[2] for result in results])
    return signal, interference, psi


def _plug_in(p, rho, signal_mean, variance, interference_mean, psi_mean):
    return p * numpy.abs(signal_mean) ** 2 / (
        p * variance + interference_mean + psi_mean / rho)


def ergodic_sinr_mc(scenario: Scenario, theta: PhaseConfig, mc: McConfig,
                    threads: int = None) -> McSinr:
    """
    Estimates
    gamma_k = p_k |E[h_k^H h_hat_k]|^2 / (p_k Var[h_k^H h_hat_k]
    + sum_{f != k} p_f E[|h_k^H h_hat_f|^2] + Psi / rho)
    by sample averages, the variance uses the n - 1 estimator.
    The standard errors come from the leave-one-out jackknife.

    Arguments:
        scenario: Scenario to use.
        theta: Phases of the RISs.
        mc: Monte-Carlo settings.
        threads: Worker threads, by default RISNET_THREADS or 1.

    Exceptions:
        ConstraintViolationError: Raised when theta is not unit modulus.
    """

    theta.check()
    signal, interference, psi = _sinr_terms(scenario, theta, mc, threads)
    n = mc.n_samples
    p = scenario.p
    rho = scenario.rho

    signal_mean = signal.mean(axis=0)
    centered = signal - signal_mean
    squares = numpy.abs(centered) ** 2
    total = squares.sum(axis=0)
    variance = total / (n - 1) if n > 1 else numpy.zeros(scenario.K)
    gamma = _plug_in(p, rho, signal_mean, variance,
                     interference.mean(axis=0), psi.mean())

    if n < 3:
        stderr = numpy.full(scenario.K, numpy.nan)
    else:
        loo_signal = (n * signal_mean - signal) / (n - 1)
        loo_variance = numpy.maximum(
            total - n / (n - 1) * squares, 0.0) / (n - 2)
        loo_interference = (interference.sum(axis=0) - interference) / (n - 1)
        loo_psi = (psi.sum() - psi) / (n - 1)
        loo_gamma = _plug_in(p, rho, loo_signal, loo_variance,
                             loo_interference, loo_psi[:, numpy.newaxis])
        spread = loo_gamma - loo_gamma.mean(axis=0)
        stderr = numpy.sqrt((n - 1) / n * numpy.sum(spread ** 2, axis=0))

    logger.debug("Monte-Carlo SINR (%s, %d samples) %s",
                 mc.protocol, n, gamma)
    return McSinr(gamma=gamma, stderr=stderr, n_samples=n,
                  psi=float(psi.mean()))


def ergodic_net_sum_rate_mc(scenario: Scenario, theta: PhaseConfig,
                            mc: McConfig, threads: int = None) -> float:
    """
    Net sum-rate from the sample-average SINRs.

    Arguments:
        scenario: Scenario to use.
        theta: Phases of the RISs.
        mc: Monte-Carlo settings.
        threads: Worker threads, by default RISNET_THREADS or 1.

    Exceptions:
        TrainingExceedsCoherenceError: Raised when S * tau_S > tau_C.
    """

    S = training_subphases(scenario, mc.protocol)
    # Checked before sampling.
    net_rate(numpy.zeros(scenario.K), S, scenario)
    gammas = ergodic_sinr_mc(scenario, theta, mc, threads).gamma
    return net_rate(gammas, S, scenario).sum_rate


def validate_covariance(scenario: Scenario, theta: PhaseConfig,
                        protocol: str, mc: McConfig,
                        threads: int = None) -> CovarianceReport:
    """
    Compares the sample covariance of h_hat_k - hbar_k with the closed-form
    C_k of the simulated protocol (integer S for dft, A_k for perfect CSI).

    Arguments:
        scenario: Scenario to use.
        theta: Phases of the RISs.
        protocol: dft, de or perfect, overrides the protocol of mc.
        mc: Monte-Carlo settings.
        threads: Worker threads, by default RISNET_THREADS or 1.
    """

    mc = dataclasses.replace(mc, protocol=protocol)
    subphases = simulated_subphases(scenario) if protocol == PROTOCOL_DFT else None
    covariances = channel_covariances(scenario)
    C, _ = estimate_covariance(scenario, theta, protocol, subphases=subphases,
                               covariances=covariances)
    hbar = los_aggregate(scenario, theta)
    K, M = scenario.K, scenario.M

    def run(chunk: range) -> tuple:
        second = numpy.zeros((K, M, M), dtype=complex)
        cross = numpy.zeros((K, M, M), dtype=complex)
        first = numpy.zeros((K, M), dtype=complex)
        for index in chunk:
            h, h_hat = _draw(scenario, theta, mc, index, covariances)
            x = h_hat - hbar
            e = h - h_hat
            second += x[:, :, numpy.newaxis] * x.conj()[:, numpy.newaxis, :]
            cross += e[:, :, numpy.newaxis] * x.conj()[:, numpy.newaxis, :]
            first += x
        return second, cross, first

    results = _run_chunks(run, mc.n_samples, threads)
    n = mc.n_samples
    second = sum(result[0] for result in results) / n
    cross = sum(result[1] for result in results) / n
    first = sum(result[2] for result in results) / n

    scale = numpy.linalg.norm(C, axis=(1, 2))
    traces = numpy.real(numpy.trace(C, axis1=1, axis2=2))
    deviation = numpy.array([relative_frobenius(second[k], C[k])
                             for k in range(K)])
    orthogonality = numpy.linalg.norm(cross, axis=(1, 2)) / scale
    mean_error = numpy.linalg.norm(first, axis=1) / numpy.sqrt(traces)
    logger.info("Covariance check (%s, %d samples) max deviation %.4f",
                protocol, n, deviation.max())
    return CovarianceReport(protocol=protocol, deviation=deviation,
                            orthogonality=orthogonality,
                            mean_error=mean_error, n_samples=n)
