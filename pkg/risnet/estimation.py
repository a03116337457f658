"""
Channel estimation: the multi sub-phase MMSE-DFT protocol,
the single sub-phase direct estimation (DE) protocol and perfect CSI.
"""

# External Imports
# Import only with "import package",
# it will make explicity in the code where it came from.

# Turns all annotations into string literals.
# This is one exception to the external import rule.
from __future__ import annotations
import dataclasses
import logging
import numpy
import scipy.linalg

# Internal Imports
# Import only with "from x import y", to simplify the code.

from .common.exceptions import InvalidConfigError
from .common.exceptions import InvalidOptionError
from .common.exceptions import UnsupportedProtocolError
from .common.constants import PROTOCOL_DE
from .common.constants import PROTOCOL_DFT
from .common.constants import PROTOCOL_PERFECT
from .common.constants import STREAM_NOISE_DE
from .common.constants import STREAM_NOISE_DFT
from .channel import ChannelRealization
from .channel import CovarianceSet
from .channel import PhaseConfig
from .channel import cascade
from .channel import channel_covariances
from .channel import los_aggregate
from .channel import los_bs_ris_matrices
from .channel import los_user_arrays
from .scenario import Scenario
from .utils.utils import Seed
from .utils.utils import complex_normal
from .utils.utils import stream

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True, eq=False)
class TrainingMatrix:
    """
    RIS training matrix, [V]_{s,n} = exp(-j 2 pi n s / S) (0-based).

    Arguments:
        V: Complex matrix, shape (S, N * L + 1).
        S: Number of sub-phases.
        N: Elements per RIS.
        L: Number of RISs.
    """

    V: numpy.ndarray
    S: int
    N: int
    L: int

    @property
    def first_column(self) -> numpy.ndarray:
        """Column applied to the direct links, all ones."""

        return self.V[:, 0]

    def block(self, l: int) -> numpy.ndarray:
        """Columns of RIS l, shape (S, N)."""

        start = 1 + l * self.N
        return self.V[:, start:start + self.N]


@dataclasses.dataclass(frozen=True, eq=False)
class EstimateSet:
    """
    Channel estimates of every user and their second-order statistics.

    Arguments:
        protocol: dft, de or perfect.
        h_hat: Aggregate estimates, shape (K, M).
        C: Covariance of h_hat - hbar(Theta), shape (K, M, M).
        C_tilde: Error covariance, shape (K, M, M), None for de.
        S: Sub-phases consumed by the training.
        h_d_hat: Direct link estimates (dft and perfect), shape (K, M).
        h_2_hat: RIS-user link estimates (dft and perfect),
            shape (L, K, N).
    """

    protocol: str
    h_hat: numpy.ndarray
    C: numpy.ndarray
    C_tilde: numpy.ndarray
    S: int
    h_d_hat: numpy.ndarray = None
    h_2_hat: numpy.ndarray = None

    def aggregate(self, scenario: Scenario,
                  theta: PhaseConfig) -> EstimateSet:
        """
        Re-assembles the aggregate estimates for other data phases
        from the per-link estimates, the covariances do not depend
        on the phases.

        Arguments:
            scenario: Scenario of the estimates.
            theta: Phases of the RISs.

        Exceptions:
            UnsupportedProtocolError: Raised for protocols without
                per-link estimates (de).
        """

        if self.h_d_hat is None:
            raise UnsupportedProtocolError(self.protocol, "aggregate")
        theta.check()
        h_hat = cascade(los_bs_ris_matrices(scenario), theta, scenario,
                        self.h_d_hat, self.h_2_hat)
        return dataclasses.replace(self, h_hat=h_hat)


def dft_training_matrix(S: int, N: int, L: int) -> TrainingMatrix:
    """
    Builds the NL + 1 leading columns of an S-point DFT matrix.

    Arguments:
        S: Number of sub-phases.
        N: Elements per RIS.
        L: Number of RISs.

    Exceptions:
        InvalidOptionError: Raised when S is smaller than 1.
    """

    if S < 1:
        raise InvalidOptionError("The number of sub-phases must be at least 1.")
    s = numpy.arange(S)[:, numpy.newaxis]
    n = numpy.arange(N * L + 1)[numpy.newaxis, :]
    V = numpy.exp(-2j * numpy.pi * n * s / S)
    return TrainingMatrix(V=V, S=S, N=N, L=L)


def training_subphases(scenario: Scenario, protocol: str) -> float:
    """
    Sub-phases charged to the training loss: NL/M + 1 for dft (real valued),
    1 for de, and 0 for perfect CSI unless the scenario asks
    for the training loss of perfect CSI, then 1.

    Arguments:
        scenario: Scenario to use.
        protocol: dft, de or perfect.

    Exceptions:
        UnsupportedProtocolError: Raised for an unknown protocol.
    """

    if protocol == PROTOCOL_DFT:
        return scenario.N * scenario.L / scenario.M + 1.0
    if protocol == PROTOCOL_DE:
        return 1.0
    if protocol == PROTOCOL_PERFECT:
        return 1.0 if scenario.config.perfect_csi_training_loss else 0.0
    raise UnsupportedProtocolError(protocol)


def simulated_subphases(scenario: Scenario) -> int:
    """
    Integer number of sub-phases simulated by the MMSE-DFT protocol,
    ceil(NL/M) + 1.

    Arguments:
        scenario: Scenario to use.
    """

    return -(-scenario.N * scenario.L // scenario.M) + 1


def link_shrinkage(scenario: Scenario, S: float) -> tuple:
    """
    Scalar MMSE factors of the MMSE-DFT protocol, for the direct links
    (shape (K,)) and the RIS-user links (shape (L, K)).

    Arguments:
        scenario: Scenario to use.
        S: Number of sub-phases.
    """

    stats = scenario.stats
    budget = S * scenario.rho_p * scenario.tau_S
    beta_d = stats.beta_d_nlos
    beta_2 = stats.beta_2_nlos
    shrink_d = beta_d / (beta_d + 1.0 / budget)
    shrink_2 = beta_2 / (
        beta_2 + 1.0 / (budget * scenario.M * stats.beta_1[:, numpy.newaxis]))
    return shrink_d, shrink_2


def _dft_covariance(scenario: Scenario, covariances: CovarianceSet,
                    S: float) -> numpy.ndarray:
    stats = scenario.stats
    shrink_d, shrink_2 = link_shrinkage(scenario, S)
    identity = numpy.eye(scenario.M)
    return ((shrink_d * stats.beta_d_nlos)[:, numpy.newaxis, numpy.newaxis]
            * identity
            + numpy.einsum("lk,lmp->kmp", shrink_2 * stats.beta_2_nlos,
                           covariances.gram))


def _de_filters(scenario: Scenario, covariances: CovarianceSet) -> numpy.ndarray:
    """Returns R_k Q_k for every user, shape (K, M, M)."""

    noise = 1.0 / (scenario.rho_p * scenario.tau_S)
    identity = numpy.eye(scenario.M)
    filters = numpy.empty_like(covariances.R)
    for k, R in enumerate(covariances.R):
        # Q_k and R_k commute, so R_k Q_k = (R_k + noise I)^-1 R_k.
        filters[k] = scipy.linalg.solve(R + noise * identity, R,
                                        assume_a="pos")
    return filters


def _check_training(scenario: Scenario) -> None:
    if not scenario.rho_p > 0:
        raise InvalidConfigError("rho_p must be positive.")


def estimate_covariance(scenario: Scenario, theta: PhaseConfig,
                        protocol: str, subphases: float = None,
                        covariances: CovarianceSet = None) -> tuple:
    """
    Closed-form covariance C_k of the estimates and, for dft and perfect,
    the error covariance C_tilde_k = A_k - C_k, without sampling.

    Arguments:
        scenario: Scenario to use.
        theta: Phases of the RISs.
        protocol: dft, de or perfect.
        subphases: Sub-phases used in the dft shrinkage, by default
            the real valued NL/M + 1.
        covariances: Channel covariances, computed when not given.

    Exceptions:
        UnsupportedProtocolError: Raised for an unknown protocol.
    """

    theta.check()
    _check_training(scenario)
    if covariances is None:
        covariances = channel_covariances(scenario)
    if protocol == PROTOCOL_DFT:
        if subphases is None:
            subphases = training_subphases(scenario, protocol)
        C = _dft_covariance(scenario, covariances, subphases)
        return C, covariances.A - C
    if protocol == PROTOCOL_DE:
        C = _de_filters(scenario, covariances) @ covariances.R
        C = 0.5 * (C + numpy.conj(numpy.swapaxes(C, 1, 2)))
        return C, None
    if protocol == PROTOCOL_PERFECT:
        return covariances.A.copy(), numpy.zeros_like(covariances.A)
    raise UnsupportedProtocolError(protocol)


def estimate_mmse_dft(scenario: Scenario, theta: PhaseConfig,
                      realization: ChannelRealization,
                      seed: Seed,
                      covariances: CovarianceSet = None) -> EstimateSet:
    """
    MMSE-DFT protocol at the level of the observation vectors:
    every link is observed with the combined training noise and
    shrunk with its scalar MMSE factor.

    Arguments:
        scenario: Scenario to use.
        theta: Phases of the RISs during data transmission.
        realization: True channels.
        seed: Seed of the training noise.
        covariances: Channel covariances, computed when not given.

    Exceptions:
        InvalidConfigError: Raised when rho_p is not positive.
        ConstraintViolationError: Raised when theta is not unit modulus.
    """

    theta.check()
    _check_training(scenario)
    K, L, M, N = scenario.K, scenario.L, scenario.M, scenario.N
    S = simulated_subphases(scenario)
    training = dft_training_matrix(S, N, L)
    noise = complex_normal(stream(seed, STREAM_NOISE_DFT), (K, S, M),
                           1.0 / (scenario.rho_p * scenario.tau_S))

    H = los_bs_ris_matrices(scenario)
    hbar_d, hbar_2 = los_user_arrays(scenario)
    shrink_d, shrink_2 = link_shrinkage(scenario, S)

    # First training column is all ones.
    r_0 = realization.h_d + noise.sum(axis=1) / S
    h_d_hat = hbar_d + shrink_d[:, numpy.newaxis] * (r_0 - hbar_d)

    # projected[l, k, s, n] = H_1l[:, n]^H noise_ks
    projected = noise[numpy.newaxis] @ H.conj()[:, numpy.newaxis]
    # blocks[l] = training.block(l)
    blocks = training.V[:, 1:].reshape(S, L, N).transpose(1, 0, 2)
    combined = numpy.einsum("lsn,lksn->lkn", blocks.conj(), projected)
    beta_1 = scenario.stats.beta_1[:, numpy.newaxis, numpy.newaxis]
    r_2 = realization.h_2 + combined / (S * M * beta_1)
    h_2_hat = hbar_2 + shrink_2[:, :, numpy.newaxis] * (r_2 - hbar_2)

    h_hat = cascade(H, theta, scenario, h_d_hat, h_2_hat)
    if covariances is None:
        covariances = channel_covariances(scenario, H)
    C = _dft_covariance(scenario, covariances, S)
    return EstimateSet(protocol=PROTOCOL_DFT, h_hat=h_hat, C=C,
                       C_tilde=covariances.A - C, S=S,
                       h_d_hat=h_d_hat, h_2_hat=h_2_hat)


def estimate_de(scenario: Scenario, theta: PhaseConfig,
                realization: ChannelRealization, seed: Seed,
                covariances: CovarianceSet = None) -> EstimateSet:
    """
    DE protocol: the aggregate channel for the given phases is observed
    once in noise and estimated with h_hat = hbar + R Q (y - hbar).

    Arguments:
        scenario: Scenario to use.
        theta: Phases of the RISs, fixed during training and data.
        realization: True channels.
        seed: Seed of the training noise.
        covariances: Channel covariances, computed when not given.

    Exceptions:
        InvalidConfigError: Raised when rho_p is not positive.
        ConstraintViolationError: Raised when theta is not unit modulus.
    """

    theta.check()
    _check_training(scenario)
    noise = complex_normal(stream(seed, STREAM_NOISE_DE),
                           (scenario.K, scenario.M),
                           1.0 / (scenario.rho_p * scenario.tau_S))
    h = realization.aggregate(scenario, theta)
    hbar = los_aggregate(scenario, theta)
    if covariances is None:
        covariances = channel_covariances(scenario)
    filters = _de_filters(scenario, covariances)
    h_hat = hbar + numpy.einsum("kmn,kn->km", filters, h + noise - hbar)
    C = filters @ covariances.R
    C = 0.5 * (C + numpy.conj(numpy.swapaxes(C, 1, 2)))
    return EstimateSet(protocol=PROTOCOL_DE, h_hat=h_hat, C=C,
                       C_tilde=None, S=1)


def estimate_perfect(scenario: Scenario, theta: PhaseConfig,
                     realization: ChannelRealization,
                     covariances: CovarianceSet = None) -> EstimateSet:
    """
    Perfect CSI: the estimates are the true channels, C = A and C_tilde = 0.

    Arguments:
        scenario: Scenario to use.
        theta: Phases of the RISs.
        realization: True channels.
        covariances: Channel covariances, computed when not given.
    """

    theta.check()
    if covariances is None:
        covariances = channel_covariances(scenario)
    return EstimateSet(
        protocol=PROTOCOL_PERFECT,
        h_hat=realization.aggregate(scenario, theta),
        C=covariances.A, C_tilde=numpy.zeros_like(covariances.A),
        S=int(training_subphases(scenario, PROTOCOL_PERFECT)),
        h_d_hat=realization.h_d, h_2_hat=realization.h_2)


def estimate(scenario: Scenario, theta: PhaseConfig,
             realization: ChannelRealization, protocol: str,
             seed: Seed,
             covariances: CovarianceSet = None) -> EstimateSet:
    """
    Runs the estimator of a protocol.

    Arguments:
        scenario: Scenario to use.
        theta: Phases of the RISs.
        realization: True channels.
        protocol: dft, de or perfect.
        seed: Seed of the training noise.
        covariances: Channel covariances, computed when not given.

    Exceptions:
        UnsupportedProtocolError: Raised for an unknown protocol.
    """

    if protocol == PROTOCOL_DFT:
        return estimate_mmse_dft(scenario, theta, realization, seed,
                                 covariances)
    if protocol == PROTOCOL_DE:
        return estimate_de(scenario, theta, realization, seed, covariances)
    if protocol == PROTOCOL_PERFECT:
        return estimate_perfect(scenario, theta, realization, covariances)
    raise UnsupportedProtocolError(protocol)


def information_ordering(scenario: Scenario, theta: PhaseConfig) -> bool:
    """
    Checks tr(C_k) of dft against de for every user, logs a warning
    when dft carries less information than de for some user.

    Arguments:
        scenario: Scenario to use.
        theta: Phases of the RISs.
    """

    covariances = channel_covariances(scenario)
    C_dft, _ = estimate_covariance(scenario, theta, PROTOCOL_DFT,
                                   covariances=covariances)
    C_de, _ = estimate_covariance(scenario, theta, PROTOCOL_DE,
                                  covariances=covariances)
    trace_dft = numpy.real(numpy.trace(C_dft, axis1=1, axis2=2))
    trace_de = numpy.real(numpy.trace(C_de, axis1=1, axis2=2))
    violated = numpy.flatnonzero(trace_dft < trace_de * (1.0 - 1e-12))
    if violated.size:
        logger.warning("tr(C) under dft is below de for users %s",
                       violated.tolist())
        return False
    return True
