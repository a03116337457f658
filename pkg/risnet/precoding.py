"""MRT precoding, power normalization and net rates."""

# External Imports
# Import only with "import package",
# it will make explicity in the code where it came from.

# Turns all annotations into string literals.
# This is one exception to the external import rule.
from __future__ import annotations
import dataclasses
import logging
import numpy

# Internal Imports
# Import only with "from x import y", to simplify the code.

from .common.exceptions import InvalidOptionError
from .common.exceptions import TrainingExceedsCoherenceError
from .common.exceptions import UnsupportedProtocolError
from .channel import PhaseConfig
from .channel import los_aggregate
from .estimation import EstimateSet
from .estimation import estimate_covariance
from .estimation import training_subphases
from .scenario import Scenario

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True, eq=False)
class Precoder:
    """
    MRT precoder.

    Arguments:
        G: Precoding vectors g_k = zeta h_hat_k as columns, shape (M, K).
        zeta: Power normalization.
        psi: Normalization denominator.
    """

    G: numpy.ndarray
    zeta: float
    psi: float

    def transmit_power(self, p: numpy.ndarray) -> float:
        """Returns tr(P G^H G)."""

        return float(numpy.sum(p * numpy.sum(numpy.abs(self.G) ** 2, axis=0)))


@dataclasses.dataclass(frozen=True, eq=False)
class RateRecord:
    """
    Net rates of every user.

    Arguments:
        gamma: SINR per user (linear).
        rate: Net rate per user in bits/s/Hz.
        sum_rate: Net sum-rate in bits/s/Hz.
        overhead_symbols: Training symbols S * tau_S.
        loss_factor: 1 - S * tau_S / tau_C.
    """

    gamma: numpy.ndarray
    rate: numpy.ndarray
    sum_rate: float
    overhead_symbols: float
    loss_factor: float


def mrt_precoder(estimates: EstimateSet, scenario: Scenario,
                 psi: float) -> Precoder:
    """
    Builds g_k = zeta h_hat_k with zeta^2 = P_max / psi.

    Arguments:
        estimates: Channel estimates.
        scenario: Scenario to use.
        psi: Normalization denominator.

    Exceptions:
        InvalidOptionError: Raised when psi is not positive.
    """

    if not psi > 0:
        raise InvalidOptionError("psi must be positive.")
    zeta = float(numpy.sqrt(scenario.config.P_max / psi))
    return Precoder(G=zeta * estimates.h_hat.T, zeta=zeta, psi=float(psi))


def psi_deterministic(scenario: Scenario, theta: PhaseConfig,
                      protocol: str) -> float:
    """
    Psi = sum_k p_k tr(D_k + C_k), the expected tr(P H_hat H_hat^H).

    Arguments:
        scenario: Scenario to use.
        theta: Phases of the RISs.
        protocol: dft, de or perfect (C_k = A_k).
    """

    hbar = los_aggregate(scenario, theta)
    C, _ = estimate_covariance(scenario, theta, protocol)
    traces = (numpy.sum(numpy.abs(hbar) ** 2, axis=1)
              + numpy.real(numpy.trace(C, axis1=1, axis2=2)))
    return float(numpy.sum(scenario.p * traces))


def psi_instantaneous(estimates: EstimateSet, scenario: Scenario) -> float:
    """
    Psi_inst = tr(P H_hat H_hat^H) of the estimates at hand.

    Arguments:
        estimates: Channel estimates.
        scenario: Scenario to use.
    """

    norms = numpy.sum(numpy.abs(estimates.h_hat) ** 2, axis=1)
    return float(numpy.sum(scenario.p * norms))


def instantaneous_sinr(estimates: EstimateSet, scenario: Scenario,
                       theta: PhaseConfig = None) -> numpy.ndarray:
    """
    SINR of every user when the BS only knows the estimates, the estimation
    error is treated as uncorrelated noise with covariance C_tilde_k.

    Arguments:
        estimates: Channel estimates carrying C_tilde.
        scenario: Scenario to use.
        theta: If set, the estimates are re-assembled for these phases.

    Exceptions:
        UnsupportedProtocolError: Raised when the estimates have no
            error covariance (de).
    """

    if estimates.C_tilde is None:
        raise UnsupportedProtocolError(estimates.protocol,
                                       "the instantaneous SINR")
    if theta is not None:
        estimates = estimates.aggregate(scenario, theta)
    h_hat = estimates.h_hat
    p = scenario.p

    gram = h_hat.conj() @ h_hat.T
    power = numpy.abs(gram) ** 2
    signal = p * numpy.real(numpy.diag(gram)) ** 2
    # interference[k] = sum_{f != k} p_f |h_k^H h_f|^2
    interference = power @ p - p * numpy.diag(power)
    # leakage[k] = sum_f p_f h_f^H C_tilde_k h_f
    leakage = numpy.real(numpy.einsum(
        "fm,kmn,fn,f->k", h_hat.conj(), estimates.C_tilde, h_hat, p))
    noise = psi_instantaneous(estimates, scenario) / scenario.rho
    return signal / (interference + leakage + noise)


def net_rate(gammas: numpy.ndarray, S: float,
             scenario: Scenario) -> RateRecord:
    """
    Net rates (1 - S tau_S / tau_C) log2(1 + gamma_k).

    Arguments:
        gammas: SINR per user.
        S: Number of training sub-phases.
        scenario: Scenario to use.

    Exceptions:
        TrainingExceedsCoherenceError: Raised when S * tau_S > tau_C.
    """

    overhead = S * scenario.tau_S
    if overhead > scenario.tau_C:
        raise TrainingExceedsCoherenceError(overhead, scenario.tau_C)
    loss = 1.0 - overhead / scenario.tau_C
    gammas = numpy.asarray(gammas, dtype=float)
    rates = loss * numpy.log2(1.0 + gammas)
    return RateRecord(gamma=gammas, rate=rates, sum_rate=float(rates.sum()),
                      overhead_symbols=float(overhead),
                      loss_factor=float(loss))


def instantaneous_net_sum_rate(estimates: EstimateSet, scenario: Scenario,
                               theta: PhaseConfig = None) -> float:
    """
    Instantaneous net sum-rate of one coherence block.

    Arguments:
        estimates: Channel estimates carrying C_tilde.
        scenario: Scenario to use.
        theta: If set, the estimates are re-assembled for these phases.
    """

    gammas = instantaneous_sinr(estimates, scenario, theta)
    S = training_subphases(scenario, estimates.protocol)
    return net_rate(gammas, S, scenario).sum_rate
