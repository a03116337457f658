"""
Deterministic equivalents of the MRT SINR and of the net sum-rate,
these only depend on channel statistics.
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

from .common.exceptions import UnsupportedProtocolError
from .common.constants import PROTOCOL_DE
from .common.constants import PROTOCOL_DFT
from .common.constants import PROTOCOL_PERFECT
from .common.constants import PROTOCOLS
from .channel import PhaseConfig
from .channel import channel_covariances
from .channel import los_aggregate
from .channel import los_user_arrays
from .estimation import estimate_covariance
from .estimation import training_subphases
from .precoding import RateRecord
from .precoding import net_rate
from .scenario import Scenario

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True, eq=False)
class DetEquivInputs:
    """
    Every quantity the deterministic equivalents are built from.

    Arguments:
        protocol: dft, de or perfect.
        hbar: Aggregate LoS vectors, D_k = hbar_k hbar_k^H, shape (K, M).
        A: Channel covariances, shape (K, M, M).
        C: Estimate covariances, shape (K, M, M).
        R: Covariances of the DE protocol, shape (K, M, M).
        Q: (R_k + I / (rho_p tau_S))^-1 for de, None otherwise.
        p: Power allocation, shape (K,).
        rho: Data SNR.
        rho_p: Training SNR.
        tau_S: Sub-phase length.
        S: Sub-phases (real valued for dft).
    """

    protocol: str
    hbar: numpy.ndarray
    A: numpy.ndarray
    C: numpy.ndarray
    R: numpy.ndarray
    Q: numpy.ndarray
    p: numpy.ndarray
    rho: float
    rho_p: float
    tau_S: float
    S: float

    @property
    def M(self) -> int:
        return self.hbar.shape[1]

    @property
    def K(self) -> int:
        return self.hbar.shape[0]

    @property
    def D(self) -> numpy.ndarray:
        """D_k = hbar_k hbar_k^H, shape (K, M, M)."""

        return (self.hbar[:, :, numpy.newaxis]
                * self.hbar.conj()[:, numpy.newaxis, :])


def det_equiv_inputs(scenario: Scenario, theta: PhaseConfig,
                     protocol: str) -> DetEquivInputs:
    """
    Collects the statistics of a protocol, with C_k from the real valued
    S = NL/M + 1 for dft, R_k Q_k R_k for de and A_k for perfect CSI.

    Arguments:
        scenario: Scenario to use.
        theta: Phases of the RISs.
        protocol: dft, de or perfect.

    Exceptions:
        UnsupportedProtocolError: Raised for an unknown protocol.
        ConstraintViolationError: Raised when theta is not unit modulus.
    """

    if protocol not in PROTOCOLS:
        raise UnsupportedProtocolError(protocol)
    covariances = channel_covariances(scenario)
    C, _ = estimate_covariance(scenario, theta, protocol,
                               covariances=covariances)
    Q = None
    if protocol == PROTOCOL_DE:
        noise = 1.0 / (scenario.rho_p * scenario.tau_S)
        identity = numpy.eye(scenario.M)
        Q = numpy.stack([scipy.linalg.inv(R + noise * identity)
                         for R in covariances.R])
    return DetEquivInputs(
        protocol=protocol, hbar=los_aggregate(scenario, theta),
        A=covariances.A, C=C, R=covariances.R, Q=Q, p=scenario.p,
        rho=scenario.rho, rho_p=scenario.rho_p, tau_S=scenario.tau_S,
        S=training_subphases(scenario, protocol))


def sinr_from_inputs(inputs: DetEquivInputs) -> numpy.ndarray:
    """
    Evaluates
    gamma_k = p_k tr(D_k + C_k)^2 / (sum_{f != k} p_f tr((D_f + C_f)(D_k + A_k))
    + Psi / rho) with Psi = sum_f p_f tr(D_f + C_f).
    The 1/M factors of numerator and denominator cancel.

    Arguments:
        inputs: Statistics of the protocol.
    """

    a = inputs.hbar
    A = inputs.A
    C = inputs.C
    p = inputs.p

    traces = (numpy.sum(numpy.abs(a) ** 2, axis=1)
              + numpy.real(numpy.trace(C, axis1=1, axis2=2)))
    signal = p * traces ** 2

    # cross[f, k] = tr((D_f + C_f)(D_k + A_k))
    gram = a.conj() @ a.T
    cross = (numpy.abs(gram) ** 2
             + numpy.real(numpy.einsum("km,fmn,kn->fk", a.conj(), C, a))
             + numpy.real(numpy.einsum("fm,kmn,fn->fk", a.conj(), A, a))
             + numpy.real(numpy.einsum("fmn,knm->fk", C, A)))
    interference = p @ cross - p * numpy.diag(cross)
    psi = float(numpy.sum(p * traces))
    return signal / (interference + psi / inputs.rho)


def sinr_det(scenario: Scenario, theta: PhaseConfig,
             protocol: str) -> numpy.ndarray:
    """
    Deterministic SINR of every user for a protocol.

    Arguments:
        scenario: Scenario to use.
        theta: Phases of the RISs.
        protocol: dft, de or perfect.
    """

    return sinr_from_inputs(det_equiv_inputs(scenario, theta, protocol))


def sinr_det_dft(scenario: Scenario, theta: PhaseConfig) -> numpy.ndarray:
    """
    Deterministic SINR under the MMSE-DFT protocol.

    Arguments:
        scenario: Scenario to use.
        theta: Phases of the RISs.
    """

    return sinr_det(scenario, theta, PROTOCOL_DFT)


def sinr_det_de(scenario: Scenario, theta: PhaseConfig) -> numpy.ndarray:
    """
    Deterministic SINR under the DE protocol, C_k = R_k Q_k R_k.

    Arguments:
        scenario: Scenario to use.
        theta: Phases of the RISs.
    """

    return sinr_det(scenario, theta, PROTOCOL_DE)


def sinr_det_perfect(scenario: Scenario, theta: PhaseConfig) -> numpy.ndarray:
    """
    Deterministic SINR with perfect CSI, C_k = A_k.

    Arguments:
        scenario: Scenario to use.
        theta: Phases of the RISs.
    """

    return sinr_det(scenario, theta, PROTOCOL_PERFECT)


def sinr_det_noris(scenario: Scenario) -> numpy.ndarray:
    """
    Deterministic SINR of the DE protocol without RISs, in scalar form.
    The RISs of the scenario, if any, are ignored.

    Arguments:
        scenario: Scenario to use.
    """

    hbar_d, _ = los_user_arrays(scenario)
    beta = scenario.stats.beta_d_nlos
    shrink = beta ** 2 / (beta + 1.0 / (scenario.rho_p * scenario.tau_S))
    p = scenario.p
    M = scenario.M

    norms = numpy.sum(numpy.abs(hbar_d) ** 2, axis=1)
    traces = norms + M * shrink
    signal = p * traces ** 2
    gram = numpy.abs(hbar_d.conj() @ hbar_d.T) ** 2
    # cross[f, k] = tr((hbar_f hbar_f^H + c_f I)(hbar_k hbar_k^H + beta_k I))
    cross = (gram
             + shrink[:, numpy.newaxis] * norms[numpy.newaxis, :]
             + norms[:, numpy.newaxis] * beta[numpy.newaxis, :]
             + M * shrink[:, numpy.newaxis] * beta[numpy.newaxis, :])
    interference = p @ cross - p * numpy.diag(cross)
    psi = float(numpy.sum(p * traces))
    return signal / (interference + psi / scenario.rho)


def rate_record_det(scenario: Scenario, theta: PhaseConfig,
                    protocol: str) -> RateRecord:
    """
    Deterministic SINRs and net rates of a protocol.

    Arguments:
        scenario: Scenario to use.
        theta: Phases of the RISs.
        protocol: dft, de or perfect.

    Exceptions:
        TrainingExceedsCoherenceError: Raised when S * tau_S > tau_C.
    """

    gammas = sinr_det(scenario, theta, protocol)
    return net_rate(gammas, training_subphases(scenario, protocol), scenario)


def net_sum_rate_det(scenario: Scenario, theta: PhaseConfig,
                     protocol: str) -> float:
    """
    Deterministic net sum-rate in bits/s/Hz.

    Arguments:
        scenario: Scenario to use.
        theta: Phases of the RISs.
        protocol: dft, de or perfect.

    Exceptions:
        TrainingExceedsCoherenceError: Raised when S * tau_S > tau_C.
    """

    return rate_record_det(scenario, theta, protocol).sum_rate
