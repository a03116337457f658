"""
System description: dimensions, power and training budgets, layout,
and the per-link statistics derived from the layout.
"""

# External Imports
# Import only with "import package",
# it will make explicity in the code where it came from.

# Turns all annotations into string literals.
# This is one exception to the external import rule.
from __future__ import annotations
import dataclasses
import json
import logging
import numpy

# Internal Imports
# Import only with "from x import y", to simplify the code.

from .common.exceptions import InvalidConfigError
from .common.exceptions import InvalidGeometryError
from .common.exceptions import InvalidOptionError
from .common.constants import ANTENNA_SPACING
from .common.constants import ARC_SPAN_DEGREES
from .common.constants import COHERENCE_BLOCK
from .common.constants import ELEMENT_SPACING
from .common.constants import KAPPA_INTERCEPT
from .common.constants import KAPPA_SLOPE
from .common.constants import NOISE_POWER_DBM
from .common.constants import P_MAX
from .common.constants import PATH_LOSS_C0_DB
from .common.constants import PATH_LOSS_EXPONENT_BS_RIS
from .common.constants import PATH_LOSS_EXPONENT_BS_USER
from .common.constants import PATH_LOSS_EXPONENT_RIS_USER
from .common.constants import RIS_ARC_RADIUS
from .common.constants import USER_ARC_RADIUS
from .common.constants import WAVELENGTH
from .utils.utils import db_to_linear
from .utils.utils import dbm_to_watts
from .utils.utils import grid_shape

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class SystemConfig:
    """
    Static system parameters.

    rho_p, tau_S and p may be left as None, they then follow
    P_max / sigma2, K and 1/K respectively.

    Arguments:
        M: Number of BS antennas.
        K: Number of users.
        L: Number of RISs, 0 for a system without RISs.
        N1: RIS rows.
        N2: RIS columns.
        d_bs: BS antenna spacing in wavelengths.
        d_ris_1: RIS spacing along the rows in wavelengths.
        d_ris_2: RIS spacing along the columns in wavelengths.
        wavelength: Carrier wavelength in meters.
        P_max: Transmit power budget in watts.
        sigma2: Noise power in watts.
        rho_p: Training SNR (linear).
        tau_S: Training sub-phase length in symbols.
        tau_C: Coherence block length in symbols.
        p: Power allocation per user in watts.
        C0_db: Path loss attenuation at 1 m in dB.
        alpha_1: Path loss exponent of the BS-RIS links.
        alpha_2: Path loss exponent of the RIS-user links.
        alpha_d: Path loss exponent of the BS-user links.
        kappa_intercept: Rician factor at distance 0.
        kappa_slope: Rician factor decrease per meter.
        perfect_csi_training_loss: Applies the training loss of a single
            sub-phase to perfect CSI rates.
    """

    M: int = 60
    K: int = 20
    L: int = 20
    N1: int = 6
    N2: int = 10
    d_bs: float = ANTENNA_SPACING
    d_ris_1: float = ELEMENT_SPACING
    d_ris_2: float = ELEMENT_SPACING
    wavelength: float = WAVELENGTH
    P_max: float = P_MAX
    sigma2: float = dbm_to_watts(NOISE_POWER_DBM)
    rho_p: float = None
    tau_S: float = None
    tau_C: float = COHERENCE_BLOCK
    p: tuple = None
    C0_db: float = PATH_LOSS_C0_DB
    alpha_1: float = PATH_LOSS_EXPONENT_BS_RIS
    alpha_2: float = PATH_LOSS_EXPONENT_RIS_USER
    alpha_d: float = PATH_LOSS_EXPONENT_BS_USER
    kappa_intercept: float = KAPPA_INTERCEPT
    kappa_slope: float = KAPPA_SLOPE
    perfect_csi_training_loss: bool = False

    @property
    def N(self) -> int:
        """Number of elements per RIS."""

        return self.N1 * self.N2


@dataclasses.dataclass(frozen=True, eq=False)
class Geometry:
    """
    Positions in meters.

    Arguments:
        bs_position: BS array center, shape (3,).
        ris_positions: RIS centers, shape (L, 3).
        user_positions: Users, shape (K, 3).
        ris_orientations: Unit normals of the RISs, shape (L, 3).
        bs_axis: Unit vector of the BS array, shape (3,).
    """

    bs_position: numpy.ndarray
    ris_positions: numpy.ndarray
    user_positions: numpy.ndarray
    ris_orientations: numpy.ndarray
    bs_axis: numpy.ndarray = dataclasses.field(
        default_factory=lambda: numpy.array([0.0, 0.0, 1.0]))


@dataclasses.dataclass(frozen=True, eq=False)
class LinkStats:
    """
    Per-link statistics, index order (l, k) for RIS-user links.
    """

    d_1: numpy.ndarray
    d_d: numpy.ndarray
    d_2: numpy.ndarray
    beta_1: numpy.ndarray
    beta_d: numpy.ndarray
    beta_2: numpy.ndarray
    kappa_d: numpy.ndarray
    kappa_2: numpy.ndarray
    phi_d: numpy.ndarray
    phi_2: numpy.ndarray

    @property
    def beta_d_nlos(self) -> numpy.ndarray:
        """NLoS power of the direct links, beta_d / (kappa_d + 1)."""

        return self.beta_d / (self.kappa_d + 1.0)

    @property
    def beta_2_nlos(self) -> numpy.ndarray:
        """NLoS power of the RIS-user links, beta_2 / (kappa_2 + 1)."""

        return self.beta_2 / (self.kappa_2 + 1.0)

    @property
    def beta_d_los(self) -> numpy.ndarray:
        """LoS power of the direct links per antenna."""

        return self.beta_d * self.kappa_d / (self.kappa_d + 1.0)

    @property
    def beta_2_los(self) -> numpy.ndarray:
        """LoS power of the RIS-user links per element."""

        return self.beta_2 * self.kappa_2 / (self.kappa_2 + 1.0)


@dataclasses.dataclass(frozen=True, eq=False)
class Scenario:
    """
    Immutable system description shared by every module.

    Arguments:
        config: System parameters.
        geometry: Layout.
        stats: Link statistics derived from config and geometry.
    """

    config: SystemConfig
    geometry: Geometry
    stats: LinkStats

    @property
    def M(self) -> int:
        return self.config.M

    @property
    def K(self) -> int:
        return self.config.K

    @property
    def L(self) -> int:
        return self.config.L

    @property
    def N(self) -> int:
        return self.config.N

    @property
    def rho(self) -> float:
        """Data SNR P_max / sigma2."""

        return self.config.P_max / self.config.sigma2

    @property
    def rho_p(self) -> float:
        """Training SNR."""

        if self.config.rho_p is None:
            return self.rho
        return self.config.rho_p

    @property
    def tau_S(self) -> float:
        """Training sub-phase length in symbols."""

        if self.config.tau_S is None:
            return float(self.config.K)
        return self.config.tau_S

    @property
    def tau_C(self) -> float:
        return self.config.tau_C

    @property
    def p(self) -> numpy.ndarray:
        """Power allocation vector, shape (K,)."""

        if self.config.p is None:
            return numpy.full(self.config.K, 1.0 / self.config.K)
        return numpy.asarray(self.config.p, dtype=float)

    @property
    def C0(self) -> float:
        """Path loss at 1 m (linear)."""

        return db_to_linear(-self.config.C0_db)


def arc_positions(count: int, radius: float,
                  span_degrees: float = ARC_SPAN_DEGREES) -> numpy.ndarray:
    """
    Places points on an arc in the xy plane, equally spaced in angle
    over [-span, span] measured from the y-axis.

    Arguments:
        count: Number of points.
        radius: Arc radius in meters.
        span_degrees: Half span of the arc in degrees.
    """

    if count == 0:
        return numpy.zeros((0, 3))
    if count == 1:
        angles = numpy.zeros(1)
    else:
        angles = numpy.radians(
            numpy.linspace(-span_degrees, span_degrees, count))
    return numpy.stack([radius * numpy.sin(angles),
                        radius * numpy.cos(angles),
                        numpy.zeros(count)], axis=1)


def default_geometry(K: int, L: int) -> Geometry:
    """
    Creates the default layout: BS at the origin with its array along z,
    RISs on a 250 m arc facing the BS and users on a 400 m arc.

    Arguments:
        K: Number of users.
        L: Number of RISs.
    """

    bs_position = numpy.zeros(3)
    ris_positions = arc_positions(L, RIS_ARC_RADIUS)
    user_positions = arc_positions(K, USER_ARC_RADIUS)
    if L > 0:
        normals = bs_position - ris_positions
        normals = normals / numpy.linalg.norm(normals, axis=1, keepdims=True)
    else:
        normals = numpy.zeros((0, 3))
    return Geometry(bs_position, ris_positions, user_positions, normals)


def ris_axes(normal: numpy.ndarray) -> tuple:
    """
    Returns the two in-plane unit axes of a RIS, the row axis (N1 direction)
    and the column axis (N2 direction).

    Arguments:
        normal: Unit normal of the RIS.
    """

    axis_2 = numpy.cross(numpy.array([0.0, 0.0, 1.0]), normal)
    norm = numpy.linalg.norm(axis_2)
    if norm < 1e-12:
        axis_2 = numpy.array([1.0, 0.0, 0.0])
    else:
        axis_2 = axis_2 / norm
    axis_1 = numpy.cross(normal, axis_2)
    return axis_1 / numpy.linalg.norm(axis_1), axis_2


def _check_geometry(config: SystemConfig, geometry: Geometry) -> None:
    shapes = {
        "bs_position": (geometry.bs_position, (3,)),
        "bs_axis": (geometry.bs_axis, (3,)),
        "ris_positions": (geometry.ris_positions, (config.L, 3)),
        "user_positions": (geometry.user_positions, (config.K, 3)),
        "ris_orientations": (geometry.ris_orientations, (config.L, 3)),
    }
    for name, (value, shape) in shapes.items():
        if numpy.shape(value) != shape:
            raise InvalidGeometryError(
                f"{name} has shape {numpy.shape(value)}, expected {shape}.")
        if not numpy.all(numpy.isfinite(value)):
            raise InvalidGeometryError(f"{name} has non-finite values.")
    if abs(numpy.linalg.norm(geometry.bs_axis) - 1.0) > 1e-9:
        raise InvalidGeometryError("bs_axis must be a unit vector.")
    if config.L > 0:
        norms = numpy.linalg.norm(geometry.ris_orientations, axis=1)
        if numpy.any(numpy.abs(norms - 1.0) > 1e-9):
            raise InvalidGeometryError(
                "ris_orientations must be unit vectors.")


def _check_config(config: SystemConfig) -> None:
    for name in ("M", "K", "N1", "N2"):
        if int(getattr(config, name)) < 1:
            raise InvalidConfigError(f"{name} must be at least 1.")
    if config.L < 0:
        raise InvalidConfigError("L must not be negative.")
    positive = ("d_bs", "d_ris_1", "d_ris_2", "wavelength", "P_max",
                "sigma2", "tau_C")
    for name in positive:
        if not getattr(config, name) > 0:
            raise InvalidConfigError(f"{name} must be positive.")
    if config.rho_p is not None and not config.rho_p > 0:
        raise InvalidConfigError("rho_p must be positive.")
    if config.tau_S is not None:
        if not 0 < config.tau_S <= config.tau_C:
            raise InvalidConfigError("tau_S must satisfy 0 < tau_S <= tau_C.")
    elif config.K > config.tau_C:
        raise InvalidConfigError("tau_S = K exceeds tau_C.")
    if config.p is not None:
        if len(config.p) != config.K:
            raise InvalidConfigError(
                f"p has {len(config.p)} entries, expected K={config.K}.")
        if any(not value > 0 for value in config.p):
            raise InvalidConfigError("All p_k must be positive.")


def _distances(origin: numpy.ndarray, targets: numpy.ndarray) -> numpy.ndarray:
    return numpy.linalg.norm(targets - origin, axis=-1)


def build_scenario(config: SystemConfig, geometry: Geometry) -> Scenario:
    """
    Derives path losses, Rician factors and departure angles
    from the layout, without any randomness.

    Arguments:
        config: System parameters.
        geometry: Layout.

    Exceptions:
        InvalidConfigError: Raised when a parameter is out of range.
        InvalidGeometryError: Raised when a distance is not positive
            or a position array has the wrong shape.
    """

    _check_config(config)
    _check_geometry(config, geometry)

    bs = geometry.bs_position
    ris = geometry.ris_positions
    users = geometry.user_positions

    d_1 = _distances(bs, ris)
    d_d = _distances(bs, users)
    d_2 = numpy.linalg.norm(
        users[numpy.newaxis, :, :] - ris[:, numpy.newaxis, :], axis=-1)
    for name, values in (("BS-RIS", d_1), ("BS-user", d_d),
                         ("RIS-user", d_2)):
        if values.size and not numpy.all(values > 0):
            raise InvalidGeometryError(
                f"{name} distances must be strictly positive.")

    c0 = db_to_linear(-config.C0_db)
    beta_1 = c0 / d_1 ** config.alpha_1
    beta_d = c0 / d_d ** config.alpha_d
    beta_2 = c0 / d_2 ** config.alpha_2

    # Negative values of the distance formula mean pure Rayleigh.
    kappa_d = numpy.maximum(
        0.0, config.kappa_intercept - config.kappa_slope * d_d)
    kappa_2 = numpy.maximum(
        0.0, config.kappa_intercept - config.kappa_slope * d_2)

    cos_d = (users - bs) @ geometry.bs_axis / d_d
    phi_d = numpy.arccos(numpy.clip(cos_d, -1.0, 1.0))
    phi_2 = numpy.zeros((config.L, config.K))
    for l in range(config.L):
        _, axis_2 = ris_axes(geometry.ris_orientations[l])
        cos_2 = (users - ris[l]) @ axis_2 / d_2[l]
        phi_2[l] = numpy.arccos(numpy.clip(cos_2, -1.0, 1.0))

    stats = LinkStats(d_1=d_1, d_d=d_d, d_2=d_2, beta_1=beta_1,
                      beta_d=beta_d, beta_2=beta_2, kappa_d=kappa_d,
                      kappa_2=kappa_2, phi_d=phi_d, phi_2=phi_2)
    return Scenario(config, geometry, stats)


FIGURE_DIMENSIONS = {
    "fig2": {"M": 60, "K": 20, "L": 20, "N": 60},
    "fig3": {"M": 60, "K": 20, "L": 20, "N": 60},
    "fig4": {"M": 60, "K": 20, "L": 20, "N": 100},
}


def _apply_overrides(config: SystemConfig, overrides: dict) -> SystemConfig:
    fields = {field.name for field in dataclasses.fields(SystemConfig)}
    changes = {}
    for name, value in overrides.items():
        if name == "N":
            changes["N1"], changes["N2"] = grid_shape(int(value))
        elif name in fields:
            changes[name] = value
        else:
            raise InvalidOptionError(f"Unknown scenario field {name!r}.")
    if changes.get("p") is not None:
        changes["p"] = tuple(float(value) for value in changes["p"])
    return dataclasses.replace(config, **changes)


def default_figure_scenario(figure_id: str, overrides: dict = None) -> Scenario:
    """
    Creates the scenario of a figure setup with the default layout.

    Arguments:
        figure_id: One of fig2, fig3 or fig4.
        overrides: SystemConfig fields to change, N is also accepted
            and split into N1 x N2.

    Exceptions:
        InvalidOptionError: Raised when the figure or a field is unknown.
    """

    if figure_id not in FIGURE_DIMENSIONS:
        raise InvalidOptionError(
            f"Unknown figure {figure_id!r}, "
            f"use one of {', '.join(FIGURE_DIMENSIONS)}.")
    settings = dict(FIGURE_DIMENSIONS[figure_id])
    settings.update(overrides or {})
    config = _apply_overrides(SystemConfig(), settings)
    return build_scenario(config, default_geometry(config.K, config.L))


def replace_scenario(scenario: Scenario, **overrides) -> Scenario:
    """
    Rebuilds a scenario with some fields changed.
    The default layout is regenerated when K or L change,
    unless a geometry is given.

    Arguments:
        scenario: Scenario to start from.
        overrides: SystemConfig fields, N, or geometry.

    Exceptions:
        InvalidOptionError: Raised when a field is unknown.
    """

    geometry = overrides.pop("geometry", None)
    config = _apply_overrides(scenario.config, overrides)
    if geometry is None:
        if config.K == scenario.K and config.L == scenario.L:
            geometry = scenario.geometry
        else:
            geometry = default_geometry(config.K, config.L)
    return build_scenario(config, geometry)


def no_ris(scenario: Scenario) -> Scenario:
    """
    Returns the same system without RISs.

    Arguments:
        scenario: Scenario with RISs.
    """

    geometry = Geometry(scenario.geometry.bs_position,
                        numpy.zeros((0, 3)),
                        scenario.geometry.user_positions,
                        numpy.zeros((0, 3)),
                        scenario.geometry.bs_axis)
    return replace_scenario(scenario, L=0, geometry=geometry)


_UNIT_KEYS = {
    "P_max": ("P_max_w", "P_max_dbm"),
    "sigma2": ("sigma2_w", "sigma2_dbm"),
    "rho_p": ("rho_p", "rho_p_db"),
}
_PLAIN_KEYS = ("M", "K", "L", "N", "N1", "N2", "d_bs", "d_ris_1", "d_ris_2",
               "wavelength", "tau_S", "tau_C", "C0_db", "alpha_1", "alpha_2",
               "alpha_d", "kappa_intercept", "kappa_slope",
               "perfect_csi_training_loss")


def _geometry_from_dict(data: dict, K: int, L: int) -> Geometry:
    known = {"bs_position", "ris_positions", "user_positions",
             "ris_orientations", "bs_axis"}
    unknown = set(data) - known
    if unknown:
        raise InvalidConfigError(
            f"Unknown geometry keys: {', '.join(sorted(unknown))}.")
    default = default_geometry(K, L)
    values = {}
    for name in known:
        if name in data:
            values[name] = numpy.asarray(data[name], dtype=float)
            if name in ("ris_positions", "ris_orientations",
                        "user_positions"):
                values[name] = values[name].reshape(-1, 3)
        else:
            values[name] = getattr(default, name)
    if "ris_positions" in data and "ris_orientations" not in data:
        normals = values["bs_position"] - values["ris_positions"]
        norms = numpy.linalg.norm(normals, axis=1, keepdims=True)
        if numpy.any(norms == 0):
            raise InvalidGeometryError("A RIS is placed on the BS.")
        values["ris_orientations"] = normals / norms
    return Geometry(**values)


def scenario_from_dict(data: dict) -> Scenario:
    """
    Creates a scenario from a dictionary with unit-suffixed power keys,
    see the configuration page of the documentation for the schema.

    Arguments:
        data: Dictionary, usually parsed from JSON.

    Exceptions:
        InvalidConfigError: Raised for unknown or conflicting keys.
    """

    data = dict(data)
    figure = data.pop("figure", None)
    geometry_data = data.pop("geometry", None)
    overrides = {}
    for field, (linear_key, log_key) in _UNIT_KEYS.items():
        if linear_key in data and log_key in data:
            raise InvalidConfigError(
                f"Use only one of {linear_key} and {log_key}.")
        if linear_key in data:
            overrides[field] = float(data.pop(linear_key))
        elif log_key in data:
            value = float(data.pop(log_key))
            if log_key.endswith("_dbm"):
                overrides[field] = dbm_to_watts(value)
            else:
                overrides[field] = db_to_linear(value)
    if "p_w" in data:
        overrides["p"] = tuple(float(value) for value in data.pop("p_w"))
    for key in _PLAIN_KEYS:
        if key in data:
            overrides[key] = data.pop(key)
    if data:
        raise InvalidConfigError(
            f"Unknown scenario keys: {', '.join(sorted(data))}.")
    if "N" in overrides and ("N1" in overrides or "N2" in overrides):
        raise InvalidConfigError("Use either N or N1/N2.")

    try:
        if figure is not None:
            base = default_figure_scenario(figure)
            config = _apply_overrides(base.config, overrides)
        else:
            config = _apply_overrides(SystemConfig(), overrides)
    except InvalidOptionError as error:
        raise InvalidConfigError(str(error))
    if geometry_data is None:
        geometry = default_geometry(config.K, config.L)
    else:
        geometry = _geometry_from_dict(geometry_data, config.K, config.L)
    return build_scenario(config, geometry)


def load_scenario(path: str) -> Scenario:
    """
    Loads a scenario from a JSON file.

    Arguments:
        path: File name.

    Exceptions:
        InvalidConfigError: Raised when the file is not valid JSON
            or has invalid keys.
    """

    with open(path, "r") as file_:
        try:
            data = json.load(file_)
        except json.JSONDecodeError as error:
            raise InvalidConfigError(f"{path}: {error}")
    logger.debug("Loaded scenario file %s", path)
    return scenario_from_dict(data)
