# External Imports
# Import only with "import package",
# it will make explicity in the code where it came from.

# Turns all annotations into string literals.
# This is one exception to the external import rule.
from __future__ import annotations
import math
import os
from typing import Sequence
from typing import Union
import numpy
import scipy.linalg

# Internal Imports
# Import only with "from x import y", to simplify the code.

from ..common.exceptions import InvalidOptionError
from ..common.constants import THREADS_ENV

Seed = Union[int, Sequence[int]]


def dbm_to_watts(dbm: float) -> float:
    """
    Converts a power in dBm to watts.

    Arguments:
        dbm: Power in dBm.
    """

    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    """
    Converts a power in watts to dBm.

    Arguments:
        watts: Power in watts.
    """

    return 10.0 * math.log10(watts) + 30.0


def db_to_linear(db: float) -> float:
    """
    Converts a ratio in dB to a linear ratio.

    Arguments:
        db: Ratio in dB.
    """

    return 10.0 ** (db / 10.0)


def stream(seed: Seed, *tags: int) -> numpy.random.Generator:
    """
    Creates an independent random generator for a seed and a list of tags.

    The same seed and tags always give the same sequence,
    different tags give statistically independent sequences.

    Arguments:
        seed: Master seed, an integer or a sequence of integers
            (for example (master, sample_index)).
        tags: Extra integers that select the stream.

    Exceptions:
        InvalidOptionError: Raised when the seed is negative.
    """

    if isinstance(seed, (int, numpy.integer)):
        entropy = [int(seed)]
    else:
        entropy = [int(value) for value in seed]
    entropy.extend(int(tag) for tag in tags)
    if any(value < 0 for value in entropy):
        raise InvalidOptionError("Seeds must be non-negative integers.")
    return numpy.random.default_rng(numpy.random.SeedSequence(entropy))


def complex_normal(rng: numpy.random.Generator, shape: tuple,
                   variance: Union[float, numpy.ndarray] = 1.0) -> numpy.ndarray:
    """
    Draws circularly-symmetric complex Gaussian samples CN(0, variance),
    real and imaginary parts each with variance variance/2.

    Arguments:
        rng: Random generator.
        shape: Shape of the output array.
        variance: Variance, a scalar or an array broadcastable to shape.
    """

    draws = rng.standard_normal(shape + (2,))
    scale = numpy.sqrt(numpy.asarray(variance, dtype=float) / 2.0)
    return scale * (draws[..., 0] + 1j * draws[..., 1])


def grid_shape(n: int) -> tuple:
    """
    Splits N elements into an N1 x N2 grid as square as possible,
    N1 is the largest divisor of N not above sqrt(N).

    Arguments:
        n: Number of elements.

    Exceptions:
        InvalidOptionError: Raised when n is smaller than 1.
    """

    if n < 1:
        raise InvalidOptionError("Number of RIS elements must be at least 1.")
    n1 = math.isqrt(n)
    while n % n1 != 0:
        n1 -= 1
    return n1, n // n1


def unit_modulus_deviation(phi: numpy.ndarray) -> float:
    """
    Returns the largest | |phi| - 1 | of a complex vector, 0 for an empty one.

    Arguments:
        phi: Complex vector.
    """

    if phi.size == 0:
        return 0.0
    return float(numpy.max(numpy.abs(numpy.abs(phi) - 1.0)))


def min_eigenvalue(matrix: numpy.ndarray) -> float:
    """
    Returns the smallest eigenvalue of a Hermitian matrix.

    Arguments:
        matrix: Hermitian matrix.
    """

    return float(scipy.linalg.eigvalsh(matrix)[0])


def relative_frobenius(estimate: numpy.ndarray,
                       reference: numpy.ndarray) -> float:
    """
    Returns ||estimate - reference||_F / ||reference||_F,
    or the absolute error when the reference is zero.

    Arguments:
        estimate: Matrix or vector being checked.
        reference: Reference matrix or vector.
    """

    error = numpy.linalg.norm(estimate - reference)
    scale = numpy.linalg.norm(reference)
    if scale == 0.0:
        return float(error)
    return float(error / scale)


def threads_from_env(threads: int = None) -> int:
    """
    Returns the number of worker threads to use.

    Arguments:
        threads: Explicit number of threads, if None the RISNET_THREADS
            environment variable is used, and 1 if it is not set.

    Exceptions:
        InvalidOptionError: Raised when the number of threads is invalid.
    """

    if threads is None:
        value = os.environ.get(THREADS_ENV, "1")
        try:
            threads = int(value)
        except ValueError:
            raise InvalidOptionError(
                f"{THREADS_ENV} must be an integer, got {value!r}.")
    if threads < 1:
        raise InvalidOptionError("Number of threads must be at least 1.")
    return threads
