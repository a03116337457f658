"""
Deterministic LoS components, Rician channel draws
and the covariances of the aggregate channels.
"""

# External Imports
# Import only with "import package",
# it will make explicity in the code where it came from.

# Turns all annotations into string literals.
# This is one exception to the external import rule.
from __future__ import annotations
import csv
import dataclasses
import logging
import numpy

# Internal Imports
# Import only with "from x import y", to simplify the code.

from .common.exceptions import ConstraintViolationError
from .common.exceptions import InvalidGeometryError
from .common.exceptions import InvalidOptionError
from .common.constants import STREAM_DIRECT
from .common.constants import STREAM_PHASES
from .common.constants import STREAM_RIS
from .scenario import Scenario
from .scenario import ris_axes
from .utils.utils import Seed
from .utils.utils import complex_normal
from .utils.utils import stream
from .utils.utils import unit_modulus_deviation

logger = logging.getLogger(__name__)

UNIT_MODULUS_TOLERANCE = 1e-9


@dataclasses.dataclass(frozen=True, eq=False)
class PhaseConfig:
    """
    RIS reflection coefficients, entry l * N + n is element n of RIS l.

    Arguments:
        phi: Complex vector of length L * N.
    """

    phi: numpy.ndarray

    @classmethod
    def ones(cls, L: int, N: int) -> PhaseConfig:
        """All coefficients equal to 1 (theta = 0)."""

        return cls(numpy.ones(L * N, dtype=complex))

    @classmethod
    def from_angles(cls, theta: numpy.ndarray) -> PhaseConfig:
        """
        Creates a phase vector from angles in radians.

        Arguments:
            theta: Real vector of length L * N.
        """

        return cls(numpy.exp(1j * numpy.asarray(theta, dtype=float)))

    @classmethod
    def random(cls, L: int, N: int, seed: Seed) -> PhaseConfig:
        """
        Draws angles uniformly in [0, 2 pi).

        Arguments:
            L: Number of RISs.
            N: Elements per RIS.
            seed: Seed of the draw.
        """

        rng = stream(seed, STREAM_PHASES)
        return cls.from_angles(rng.uniform(0.0, 2.0 * numpy.pi, L * N))

    @property
    def angles(self) -> numpy.ndarray:
        """Angles in [0, 2 pi)."""

        return numpy.mod(numpy.angle(self.phi), 2.0 * numpy.pi)

    @property
    def size(self) -> int:
        return self.phi.size

    def blocks(self, L: int, N: int) -> numpy.ndarray:
        """Returns the coefficients as an (L, N) array."""

        return self.phi.reshape(L, N)

    def check(self, tolerance: float = UNIT_MODULUS_TOLERANCE) -> None:
        """
        Checks |phi| = 1 for every element.

        Exceptions:
            ConstraintViolationError: Raised when an element is not
                unit modulus.
        """

        deviation = unit_modulus_deviation(self.phi)
        if deviation > tolerance:
            raise ConstraintViolationError(deviation)


@dataclasses.dataclass(frozen=True, eq=False)
class UserLosVectors:
    """
    LoS components of one user.

    Arguments:
        hbar_d: BS-user LoS vector, shape (M,).
        hbar_2: RIS-user LoS vectors, shape (L, N).
    """

    hbar_d: numpy.ndarray
    hbar_2: numpy.ndarray


@dataclasses.dataclass(frozen=True, eq=False)
class ChannelRealization:
    """
    One draw of every random channel component.

    Arguments:
        h_d_nlos: NLoS part of the direct links, shape (K, M).
        h_2_nlos: NLoS part of the RIS-user links, shape (L, K, N).
        h_d: Direct links, shape (K, M).
        h_2: RIS-user links, shape (L, K, N).
        h: Aggregate channels for the phases used to draw, shape (K, M).
        seed: Seed of the draw.
    """

    h_d_nlos: numpy.ndarray
    h_2_nlos: numpy.ndarray
    h_d: numpy.ndarray
    h_2: numpy.ndarray
    h: numpy.ndarray
    seed: Seed

    def aggregate(self, scenario: Scenario,
                  theta: PhaseConfig) -> numpy.ndarray:
        """
        Aggregate channels of the same draw under other phases.

        Arguments:
            scenario: Scenario of the draw.
            theta: Phases of the RISs.
        """

        theta.check()
        return cascade(los_bs_ris_matrices(scenario), theta, scenario,
                       self.h_d, self.h_2)


@dataclasses.dataclass(frozen=True, eq=False)
class CovarianceSet:
    """
    Covariances of the aggregate channels.

    Arguments:
        A: NLoS covariance of the aggregate channels, shape (K, M, M).
        R: Covariance used by the direct estimation, shape (K, M, M).
        gram: H_1l H_1l^H per RIS, shape (L, M, M).
    """

    A: numpy.ndarray
    R: numpy.ndarray
    gram: numpy.ndarray

    def D(self, scenario: Scenario, theta: PhaseConfig) -> numpy.ndarray:
        """
        Returns D_k = hbar_k hbar_k^H for every user, shape (K, M, M).

        Arguments:
            scenario: Scenario of the covariances.
            theta: Phases of the RISs.
        """

        hbar = los_aggregate(scenario, theta)
        return hbar[:, :, numpy.newaxis] * hbar.conj()[:, numpy.newaxis, :]


def antenna_positions(scenario: Scenario) -> numpy.ndarray:
    """
    Positions of the BS antennas, centered on the BS position, shape (M, 3).

    Arguments:
        scenario: Scenario to use.
    """

    config = scenario.config
    spacing = config.d_bs * config.wavelength
    offsets = (numpy.arange(config.M) - (config.M - 1) / 2.0) * spacing
    geometry = scenario.geometry
    return geometry.bs_position + offsets[:, numpy.newaxis] * geometry.bs_axis


def element_positions(scenario: Scenario, l: int) -> numpy.ndarray:
    """
    Positions of the elements of RIS l, element (n1, n2) at row
    n = n1 * N2 + n2, grid centered on the RIS position, shape (N, 3).

    Arguments:
        scenario: Scenario to use.
        l: RIS index.
    """

    config = scenario.config
    axis_1, axis_2 = ris_axes(scenario.geometry.ris_orientations[l])
    offsets_1 = ((numpy.arange(config.N1) - (config.N1 - 1) / 2.0)
                 * config.d_ris_1 * config.wavelength)
    offsets_2 = ((numpy.arange(config.N2) - (config.N2 - 1) / 2.0)
                 * config.d_ris_2 * config.wavelength)
    grid = (offsets_1[:, numpy.newaxis, numpy.newaxis] * axis_1
            + offsets_2[numpy.newaxis, :, numpy.newaxis] * axis_2)
    return scenario.geometry.ris_positions[l] + grid.reshape(config.N, 3)


def los_bs_ris_matrix(scenario: Scenario, l: int) -> numpy.ndarray:
    """
    Spherical-wave LoS matrix between the BS and RIS l, shape (M, N),
    every entry has modulus sqrt(beta_1l).

    Arguments:
        scenario: Scenario to use.
        l: RIS index.

    Exceptions:
        InvalidGeometryError: Raised when an antenna and an element
            are at the same position.
    """

    if not 0 <= l < scenario.L:
        raise InvalidOptionError(f"RIS index {l} out of range.")
    antennas = antenna_positions(scenario)
    elements = element_positions(scenario, l)
    distance = numpy.linalg.norm(
        antennas[:, numpy.newaxis, :] - elements[numpy.newaxis, :, :], axis=-1)
    if not numpy.all(distance > 0):
        raise InvalidGeometryError(
            f"An antenna and an element of RIS {l} overlap.")
    wavenumber = 2.0 * numpy.pi / scenario.config.wavelength
    return (numpy.sqrt(scenario.stats.beta_1[l])
            * numpy.exp(1j * wavenumber * distance))


def los_bs_ris_matrices(scenario: Scenario) -> numpy.ndarray:
    """
    LoS matrices of every RIS, shape (L, M, N).

    Arguments:
        scenario: Scenario to use.
    """

    if scenario.L == 0:
        return numpy.zeros((0, scenario.M, scenario.N), dtype=complex)
    return numpy.stack([los_bs_ris_matrix(scenario, l)
                        for l in range(scenario.L)])


def los_user_arrays(scenario: Scenario) -> tuple:
    """
    LoS vectors of every user, hbar_d with shape (K, M) and hbar_2 with
    shape (L, K, N).

    Arguments:
        scenario: Scenario to use.
    """

    config = scenario.config
    stats = scenario.stats

    m = numpy.arange(config.M)
    phase_d = 2.0 * numpy.pi * config.d_bs * numpy.cos(stats.phi_d)
    hbar_d = (numpy.sqrt(stats.beta_d_los)[:, numpy.newaxis]
              * numpy.exp(1j * phase_d[:, numpy.newaxis] * m))

    cos_2 = numpy.cos(stats.phi_2)[:, :, numpy.newaxis]
    b_z = numpy.exp(1j * 2.0 * numpy.pi * config.d_ris_1 * cos_2
                    * numpy.arange(config.N1))
    b_x = numpy.exp(1j * 2.0 * numpy.pi * config.d_ris_2 * cos_2
                    * numpy.arange(config.N2))
    kron = (b_z[:, :, :, numpy.newaxis]
            * b_x[:, :, numpy.newaxis, :]).reshape(config.L, config.K, config.N)
    hbar_2 = numpy.sqrt(stats.beta_2_los)[:, :, numpy.newaxis] * kron
    return hbar_d, hbar_2


def los_user_vectors(scenario: Scenario, k: int) -> UserLosVectors:
    """
    LoS vectors of user k: the ULA vector of the direct link
    and the b_z kron b_x vectors of the RIS links.

    Arguments:
        scenario: Scenario to use.
        k: User index.
    """

    if not 0 <= k < scenario.K:
        raise InvalidOptionError(f"User index {k} out of range.")
    hbar_d, hbar_2 = los_user_arrays(scenario)
    return UserLosVectors(hbar_d[k], hbar_2[:, k, :])


def cascade(H: numpy.ndarray, theta: PhaseConfig, scenario: Scenario,
            direct: numpy.ndarray, reflected: numpy.ndarray) -> numpy.ndarray:
    """
    Computes direct_k + sum_l H_1l Theta_l reflected_lk for every user.

    Arguments:
        H: LoS matrices, shape (L, M, N).
        theta: Phases of the RISs.
        scenario: Scenario to use.
        direct: Direct vectors, shape (K, M).
        reflected: RIS-user vectors, shape (L, K, N).
    """

    if scenario.L == 0:
        return numpy.array(direct, dtype=complex)
    phases = theta.blocks(scenario.L, scenario.N)
    return direct + numpy.einsum(
        "lmn,lkn->km", H, phases[:, numpy.newaxis, :] * reflected)


def los_aggregate(scenario: Scenario, theta: PhaseConfig) -> numpy.ndarray:
    """
    Aggregate LoS vectors hbar_k(Theta) of every user, shape (K, M).

    Arguments:
        scenario: Scenario to use.
        theta: Phases of the RISs.

    Exceptions:
        ConstraintViolationError: Raised when theta is not unit modulus.
    """

    theta.check()
    hbar_d, hbar_2 = los_user_arrays(scenario)
    return cascade(los_bs_ris_matrices(scenario), theta, scenario,
                   hbar_d, hbar_2)


def los_combined(scenario: Scenario, theta: PhaseConfig, k: int) -> tuple:
    """
    Returns hbar_k(Theta) and D_k = hbar_k(Theta) hbar_k(Theta)^H.
    D_k is assembled from its four-term expansion: the direct term,
    the two direct-reflected cross terms and the sum over RIS pairs.

    Arguments:
        scenario: Scenario to use.
        theta: Phases of the RISs.
        k: User index.

    Exceptions:
        ConstraintViolationError: Raised when theta is not unit modulus.
        InvalidOptionError: Raised when k is out of range.
    """

    theta.check()
    vectors = los_user_vectors(scenario, k)
    hbar_d = vectors.hbar_d
    D = numpy.outer(hbar_d, hbar_d.conj())
    if scenario.L == 0:
        return numpy.array(hbar_d, dtype=complex), D

    phases = theta.blocks(scenario.L, scenario.N)
    # reflected[l] = H_1l Theta_l hbar_2lk
    reflected = numpy.einsum("lmn,ln->lm", los_bs_ris_matrices(scenario),
                             phases * vectors.hbar_2)
    cross = numpy.outer(hbar_d, reflected.sum(axis=0).conj())
    D = (D + cross + cross.conj().T
         + numpy.einsum("lm,jn->mn", reflected, reflected.conj()))
    return hbar_d + reflected.sum(axis=0), D


def channel_covariances(scenario: Scenario,
                        H: numpy.ndarray = None) -> CovarianceSet:
    """
    A_k = beta^n_dk I + sum_l beta^n_2lk H_1l H_1l^H for every user.

    Arguments:
        scenario: Scenario to use.
        H: LoS matrices, computed when not given.
    """

    if H is None:
        H = los_bs_ris_matrices(scenario)
    stats = scenario.stats
    gram = H @ numpy.conj(numpy.swapaxes(H, 1, 2))
    identity = numpy.eye(scenario.M)
    A = (stats.beta_d_nlos[:, numpy.newaxis, numpy.newaxis] * identity
         + numpy.einsum("lk,lmp->kmp", stats.beta_2_nlos, gram))
    # R_k has the same closed form as A_k.
    R = A.copy()
    return CovarianceSet(A=A, R=R, gram=gram)


def sample_channels(scenario: Scenario, theta: PhaseConfig,
                    seed: Seed) -> ChannelRealization:
    """
    Draws the NLoS components and assembles the Rician channels.

    Arguments:
        scenario: Scenario to use.
        theta: Phases of the RISs for the aggregate channels.
        seed: Seed of the draw, the direct and the RIS links
            use separate streams.

    Exceptions:
        ConstraintViolationError: Raised when theta is not unit modulus.
    """

    theta.check()
    stats = scenario.stats
    K, L, M, N = scenario.K, scenario.L, scenario.M, scenario.N

    h_d_nlos = complex_normal(stream(seed, STREAM_DIRECT), (K, M),
                              stats.beta_d_nlos[:, numpy.newaxis])
    h_2_nlos = complex_normal(stream(seed, STREAM_RIS), (L, K, N),
                              stats.beta_2_nlos[:, :, numpy.newaxis])
    hbar_d, hbar_2 = los_user_arrays(scenario)
    h_d = hbar_d + h_d_nlos
    h_2 = hbar_2 + h_2_nlos
    h = cascade(los_bs_ris_matrices(scenario), theta, scenario, h_d, h_2)
    return ChannelRealization(h_d_nlos=h_d_nlos, h_2_nlos=h_2_nlos,
                              h_d=h_d, h_2=h_2, h=h, seed=seed)


def dump_realization(realization: ChannelRealization, path: str) -> None:
    """
    Writes a realization to a CSV file, one row per entry in column-major
    order, the shape column names the dimensions of each array.

    Arguments:
        realization: Realization to write.
        path: File name.
    """

    arrays = (("h_d", "K x M", realization.h_d),
              ("h_2", "L x K x N", realization.h_2),
              ("h", "K x M", realization.h))
    with open(path, "w", newline="") as file_:
        writer = csv.writer(file_)
        writer.writerow(["array", "dimensions", "shape", "index",
                         "real", "imag"])
        for name, dimensions, values in arrays:
            shape = "x".join(str(size) for size in values.shape)
            for index, value in enumerate(values.ravel(order="F")):
                writer.writerow([name, dimensions, shape, index,
                                 repr(float(value.real)),
                                 repr(float(value.imag))])
    logger.debug("Realization written to %s", path)
