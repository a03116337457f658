"""
RISNET tests
Perform test on the channel model: LoS vectors, covariances and sampling
"""

# External Imports
# Import only with "import package",
# it will make explicity in the code where it came from.
import csv
import dataclasses
import numpy
import pytest

# Internal imports
# Import only with "from x import y", to simplify the code.
from risnet.common.exceptions import ConstraintViolationError
from risnet.common.exceptions import InvalidOptionError
from risnet.channel import PhaseConfig
from risnet.channel import antenna_positions
from risnet.channel import channel_covariances
from risnet.channel import dump_realization
from risnet.channel import element_positions
from risnet.channel import los_aggregate
from risnet.channel import los_bs_ris_matrices
from risnet.channel import los_bs_ris_matrix
from risnet.channel import los_combined
from risnet.channel import los_user_vectors
from risnet.channel import sample_channels
from risnet.scenario import Scenario
from risnet.scenario import default_figure_scenario
from risnet.scenario import no_ris
from risnet.scenario import scenario_from_dict
from risnet.utils.utils import min_eigenvalue
from risnet.utils.utils import relative_frobenius


def test_phase_config():
    ones = PhaseConfig.ones(2, 3)
    assert ones.size == 6
    assert numpy.allclose(ones.angles, 0.0)
    random = PhaseConfig.random(2, 3, 4)
    assert numpy.allclose(numpy.abs(random.phi), 1.0)
    assert numpy.array_equal(random.phi, PhaseConfig.random(2, 3, 4).phi)
    assert random.blocks(2, 3).shape == (2, 3)
    angles = numpy.array([0.5, 6.0, 3.0])
    assert numpy.allclose(PhaseConfig.from_angles(angles).angles, angles)


def test_phase_check():
    with pytest.raises(ConstraintViolationError):
        PhaseConfig(numpy.array([1.0, 1.1])).check()
    PhaseConfig(numpy.zeros(0, dtype=complex)).check()


def test_array_geometry(toy):
    antennas = antenna_positions(toy)
    spacing = toy.config.d_bs * toy.config.wavelength
    assert numpy.allclose(numpy.diff(antennas, axis=0), [0.0, 0.0, spacing])
    assert numpy.allclose(antennas.mean(axis=0), toy.geometry.bs_position)
    elements = element_positions(toy, 0)
    assert elements.shape == (toy.N, 3)
    assert numpy.allclose(elements.mean(axis=0), toy.geometry.ris_positions[0])
    # The elements lie in the plane of the RIS.
    offsets = elements - toy.geometry.ris_positions[0]
    assert numpy.allclose(offsets @ toy.geometry.ris_orientations[0], 0.0)


def test_bs_ris_matrix_modulus(toy):
    H = los_bs_ris_matrix(toy, 1)
    assert H.shape == (toy.M, toy.N)
    assert numpy.allclose(numpy.abs(H), numpy.sqrt(toy.stats.beta_1[1]))
    assert numpy.array_equal(los_bs_ris_matrices(toy)[1], H)
    with pytest.raises(InvalidOptionError):
        los_bs_ris_matrix(toy, toy.L)


def test_user_los_vectors(toy):
    vectors = los_user_vectors(toy, 2)
    assert vectors.hbar_d.shape == (toy.M,)
    assert vectors.hbar_2.shape == (toy.L, toy.N)
    assert numpy.allclose(numpy.abs(vectors.hbar_d) ** 2,
                          toy.stats.beta_d_los[2])
    assert numpy.allclose(numpy.abs(vectors.hbar_2) ** 2,
                          toy.stats.beta_2_los[:, 2:3])
    with pytest.raises(InvalidOptionError):
        los_user_vectors(toy, toy.K)


def test_los_aggregate_matches_sum(toy, toy_theta):
    hbar = los_aggregate(toy, toy_theta)
    H = los_bs_ris_matrices(toy)
    vectors = los_user_vectors(toy, 0)
    phases = toy_theta.blocks(toy.L, toy.N)
    expected = vectors.hbar_d + sum(H[l] @ (phases[l] * vectors.hbar_2[l])
                                    for l in range(toy.L))
    assert numpy.allclose(hbar[0], expected, rtol=1e-12, atol=0.0)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_los_combined_expansion_is_outer_product(toy, seed):
    theta = PhaseConfig.random(toy.L, toy.N, seed)
    for k in range(toy.K):
        vector, D = los_combined(toy, theta, k)
        hbar = los_aggregate(toy, theta)[k]
        assert relative_frobenius(vector, hbar) < 1e-12
        assert relative_frobenius(D, numpy.outer(hbar, hbar.conj())) < 1e-12
        assert numpy.allclose(D, D.conj().T, rtol=0.0, atol=0.0)


def test_los_combined_without_ris(toy, toy_theta):
    vector, D = los_combined(no_ris(toy), PhaseConfig.ones(0, toy.N), 1)
    hbar_d = los_user_vectors(toy, 1).hbar_d
    assert numpy.allclose(vector, hbar_d, rtol=1e-12, atol=0.0)
    assert numpy.allclose(D, numpy.outer(hbar_d, hbar_d.conj()),
                          rtol=1e-12, atol=0.0)


def test_los_combined_of_rayleigh_links_is_zero():
    scenario = default_figure_scenario(
        "fig2", {"M": 4, "K": 2, "L": 1, "N": 2, "kappa_intercept": 0.0})
    _, D = los_combined(scenario, PhaseConfig.random(1, 2, 3), 0)
    assert numpy.all(D == 0)


def test_direct_los_vector_at_broadside(toy):
    # Users are broadside to the BS array, cos(phi_d) = 0.
    vectors = los_user_vectors(toy, 0)
    amplitude = numpy.sqrt(toy.stats.beta_d_los[0])
    assert numpy.allclose(vectors.hbar_d, amplitude * numpy.ones(toy.M),
                          rtol=1e-9, atol=0.0)


def test_ris_los_vector_kronecker_order():
    scenario = scenario_from_dict(
        {"figure": "fig2", "M": 4, "K": 1, "L": 1, "N1": 2, "N2": 2})
    assert scenario.config.d_ris_1 == scenario.config.d_ris_2 == 0.5
    stats = dataclasses.replace(
        scenario.stats, phi_2=numpy.zeros_like(scenario.stats.phi_2))
    endfire = Scenario(scenario.config, scenario.geometry, stats)
    hbar_2 = los_user_vectors(endfire, 0).hbar_2[0]
    amplitude = numpy.sqrt(endfire.stats.beta_2_los[0, 0])
    assert numpy.allclose(hbar_2 / amplitude, [1, -1, -1, 1],
                          rtol=0.0, atol=1e-12)


def test_single_antenna_single_element_entry():
    scenario = default_figure_scenario(
        "fig2", {"M": 1, "K": 1, "L": 1, "N": 1})
    H = los_bs_ris_matrix(scenario, 0)
    distance = scenario.stats.d_1[0]
    expected = numpy.sqrt(scenario.stats.beta_1[0]) * numpy.exp(
        2j * numpy.pi * distance / scenario.config.wavelength)
    assert H.shape == (1, 1)
    assert H[0, 0] == pytest.approx(expected, rel=1e-9)


def test_bs_ris_matrix_matches_straight_line_distances():
    # RIS on the y axis facing the BS: element rows along z, columns along x.
    scenario = scenario_from_dict(
        {"figure": "fig2", "M": 2, "K": 1, "L": 1, "N1": 1, "N2": 2,
         "geometry": {"ris_positions": [[0.0, 20.0, 0.0]]}})
    wavelength = scenario.config.wavelength
    half = 0.5 * scenario.config.d_bs * wavelength
    antennas = [(0.0, 0.0, -half), (0.0, 0.0, half)]
    half = 0.5 * scenario.config.d_ris_2 * wavelength
    elements = [(-half, 20.0, 0.0), (half, 20.0, 0.0)]
    H = los_bs_ris_matrix(scenario, 0)
    amplitude = numpy.sqrt(scenario.stats.beta_1[0])
    for m, antenna in enumerate(antennas):
        for n, element in enumerate(elements):
            distance = sum((a - e) ** 2 for a, e in zip(antenna, element)) ** 0.5
            expected = amplitude * numpy.exp(
                2j * numpy.pi * distance / wavelength)
            assert H[m, n] == pytest.approx(expected, rel=1e-9)


def test_los_aggregate_rejects_non_unit_phases(toy):
    with pytest.raises(ConstraintViolationError):
        los_aggregate(toy, PhaseConfig(numpy.full(toy.L * toy.N, 0.9 + 0j)))


def test_covariances_are_hermitian(toy):
    covariances = channel_covariances(toy)
    A = covariances.A
    assert A.shape == (toy.K, toy.M, toy.M)
    assert numpy.allclose(A, numpy.conj(numpy.swapaxes(A, 1, 2)))
    assert min_eigenvalue(A[0]) > 0.0
    assert numpy.array_equal(covariances.R, A)
    H = los_bs_ris_matrices(toy)
    expected = (toy.stats.beta_d_nlos[1] * numpy.eye(toy.M)
                + sum(toy.stats.beta_2_nlos[l, 1] * H[l] @ H[l].conj().T
                      for l in range(toy.L)))
    assert numpy.allclose(A[1], expected, rtol=1e-10, atol=0.0)


def test_covariances_without_ris(toy):
    baseline = no_ris(toy)
    A = channel_covariances(baseline).A
    expected = toy.stats.beta_d_nlos[:, numpy.newaxis, numpy.newaxis] * numpy.eye(toy.M)
    assert numpy.allclose(A, expected, rtol=1e-12, atol=0.0)


def test_sampling_is_reproducible(toy, toy_theta):
    first = sample_channels(toy, toy_theta, (1, 2))
    second = sample_channels(toy, toy_theta, (1, 2))
    other = sample_channels(toy, toy_theta, (1, 3))
    assert numpy.array_equal(first.h, second.h)
    assert not numpy.array_equal(first.h, other.h)
    assert first.h_2.shape == (toy.L, toy.K, toy.N)
    assert numpy.allclose(first.aggregate(toy, toy_theta), first.h)


def test_sampled_covariance(tiny, tiny_theta):
    n = 20000
    hbar = los_aggregate(tiny, tiny_theta)
    A = channel_covariances(tiny).A
    second = numpy.zeros_like(A)
    first = numpy.zeros_like(hbar)
    for index in range(n):
        x = sample_channels(tiny, tiny_theta, (0, index)).h - hbar
        second += x[:, :, numpy.newaxis] * x.conj()[:, numpy.newaxis, :]
        first += x
    for k in range(tiny.K):
        error = numpy.linalg.norm(second[k] / n - A[k]) / numpy.linalg.norm(A[k])
        assert error < 0.05
        assert numpy.linalg.norm(first[k] / n) < 0.05 * numpy.sqrt(
            numpy.trace(A[k]).real)


def test_rayleigh_limit_has_no_los():
    scenario = default_figure_scenario(
        "fig2", {"M": 4, "K": 2, "L": 1, "N": 2, "kappa_intercept": 0.0})
    hbar = los_aggregate(scenario, PhaseConfig.ones(1, 2))
    assert numpy.all(hbar == 0)


def test_dump_realization(tmp_path, tiny, tiny_theta):
    realization = sample_channels(tiny, tiny_theta, 0)
    path = tmp_path / "realization.csv"
    dump_realization(realization, str(path))
    with open(path, newline="") as file_:
        rows = list(csv.reader(file_))
    assert rows[0] == ["array", "dimensions", "shape", "index", "real", "imag"]
    total = realization.h_d.size + realization.h_2.size + realization.h.size
    assert len(rows) == total + 1
    h_2 = [row for row in rows[1:] if row[0] == "h_2"]
    assert h_2[1][2] == "1x2x2"
    # Column-major order.
    value = realization.h_2[0, 1, 0]
    assert float(h_2[1][4]) == value.real
