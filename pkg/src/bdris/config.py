"""Scenario description and configuration loading.

A :class:`ScenarioConfig` captures the whole network: cell/user/antenna
counts, transmit and noise powers, planar geometry, fading parameters,
per-user rate weights and the master RNG seed.  Powers are stored in dBm
and converted to linear milliwatts on access; channels downstream carry
linear amplitude.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass

import yaml

import numpy as np

from .exceptions import ConfigError


def dbm_to_mw(dbm):
    """Convert a power from dBm to linear milliwatts (-inf maps to 0)."""
    dbm = float(dbm)
    if dbm == -math.inf:
        return 0.0
    return 10.0 ** (dbm / 10.0)


def _as_point(value, name):
    try:
        x, y = value
        point = (float(x), float(y))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be an (x, y) pair, got {value!r}") from exc
    if not all(math.isfinite(c) for c in point):
        raise ConfigError(f"{name} must be finite, got {value!r}")
    return point


def _as_points(value, name, count=None):
    try:
        items = list(value)
    except TypeError as exc:
        raise ConfigError(f"{name} must be a sequence of (x, y) pairs") from exc
    points = tuple(_as_point(p, f"{name}[{i}]") for i, p in enumerate(items))
    if count is not None and len(points) != count:
        raise ConfigError(f"{name} must have {count} entries, got {len(points)}")
    if not points:
        raise ConfigError(f"{name} must not be empty")
    return points


def _check_count(value, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < 1:
        raise ConfigError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def _check_finite(value, name, minimum=None):
    try:
        value = float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a real number, got {value!r}") from exc
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {value}")
    return value


@dataclass(frozen=True)
class ScenarioConfig:
    """Full system description for one simulated network.

    Defaults reproduce the two-cell evaluation scenario used throughout
    the experiment suite: two 4-antenna base stations 600 m apart, two
    2-antenna users per cell dropped uniformly in 20 m disks, and one
    20-element reflecting surface at the cell edge.
    """

    num_cells: int = 2
    users_per_cell: int = 2
    tx_antennas: int = 4
    rx_antennas: int = 2
    num_streams: int = 2
    ris_elements: int = 20
    tx_power_dbm: object = 30.0
    noise_power_dbm: float = -104.0
    weights: object = 1.0
    bs_positions: tuple = ((0.0, 0.0), (600.0, 0.0))
    ris_positions: tuple = ((300.0, 0.0),)
    surface_elements: tuple = None
    user_disk_centers: tuple = ((280.0, 0.0), (320.0, 0.0))
    user_disk_radius: float = 20.0
    pathloss_ref_db: float = 30.0
    pathloss_exp_direct: float = 3.75
    pathloss_exp_ris: float = 2.2
    rician_factor: float = 3.0
    rng_seed: int = 1

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)
        L = _check_count(self.num_cells, "num_cells")
        K = _check_count(self.users_per_cell, "users_per_cell")
        set_("num_cells", L)
        set_("users_per_cell", K)
        set_("tx_antennas", _check_count(self.tx_antennas, "tx_antennas"))
        set_("rx_antennas", _check_count(self.rx_antennas, "rx_antennas"))
        set_("num_streams", _check_count(self.num_streams, "num_streams"))
        set_("ris_elements", _check_count(self.ris_elements, "ris_elements"))
        if self.num_streams > min(self.tx_antennas, self.rx_antennas):
            raise ConfigError(
                "num_streams must not exceed min(tx_antennas, rx_antennas): "
                f"{self.num_streams} > min({self.tx_antennas}, {self.rx_antennas})"
            )

        # per-BS transmit power: scalar broadcasts to all cells
        p = self.tx_power_dbm
        if isinstance(p, (numbers.Real,)) and not isinstance(p, bool):
            powers = (float(p),) * L
        else:
            try:
                powers = tuple(float(x) for x in p)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"tx_power_dbm must be a number or a sequence, got {p!r}") from exc
        if len(powers) != L:
            raise ConfigError(f"tx_power_dbm needs one value per cell ({L}), got {len(powers)}")
        for x in powers:
            if not math.isfinite(x):
                raise ConfigError(f"tx_power_dbm must be finite, got {x!r}")
        set_("tx_power_dbm", powers)

        noise = self.noise_power_dbm
        try:
            noise = float(noise)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"noise_power_dbm must be a real number, got {noise!r}") from exc
        # -inf (zero noise) is allowed for analytic edge cases; +inf/nan are not
        if math.isnan(noise) or noise == math.inf:
            raise ConfigError(f"noise_power_dbm must be finite or -inf, got {noise!r}")
        set_("noise_power_dbm", noise)

        w = self.weights
        if isinstance(w, numbers.Real) and not isinstance(w, bool):
            weights = ((float(w),) * K,) * L
        else:
            try:
                weights = tuple(tuple(float(x) for x in row) for row in w)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"weights must be a number or nested sequence, got {w!r}") from exc
        if len(weights) != L or any(len(row) != K for row in weights):
            raise ConfigError(f"weights must have shape ({L}, {K})")
        for row in weights:
            for x in row:
                if not math.isfinite(x) or x < 0:
                    raise ConfigError(f"weights must be finite and nonnegative, got {x!r}")
        set_("weights", weights)

        set_("bs_positions", _as_points(self.bs_positions, "bs_positions", L))
        set_("ris_positions", _as_points(self.ris_positions, "ris_positions"))
        set_("user_disk_centers", _as_points(self.user_disk_centers, "user_disk_centers", L))
        set_("user_disk_radius", _check_finite(self.user_disk_radius, "user_disk_radius", minimum=0.0))
        if self.user_disk_radius <= 0:
            raise ConfigError("user_disk_radius must be positive")

        n_surf = len(self.ris_positions)
        if self.surface_elements is None:
            if self.ris_elements % n_surf:
                raise ConfigError(
                    f"ris_elements={self.ris_elements} cannot be split evenly over "
                    f"{n_surf} surfaces; set surface_elements explicitly"
                )
            sizes = (self.ris_elements // n_surf,) * n_surf
        else:
            try:
                sizes = tuple(_check_count(m, "surface_elements entry") for m in self.surface_elements)
            except TypeError as exc:
                raise ConfigError("surface_elements must be a sequence of integers") from exc
            if len(sizes) != n_surf:
                raise ConfigError(
                    f"surface_elements needs one entry per surface ({n_surf}), got {len(sizes)}"
                )
            if sum(sizes) != self.ris_elements:
                raise ConfigError(
                    f"surface_elements must sum to ris_elements={self.ris_elements}, got {sum(sizes)}"
                )
        set_("surface_elements", sizes)

        set_("pathloss_ref_db", _check_finite(self.pathloss_ref_db, "pathloss_ref_db"))
        set_("pathloss_exp_direct", _check_finite(self.pathloss_exp_direct, "pathloss_exp_direct"))
        set_("pathloss_exp_ris", _check_finite(self.pathloss_exp_ris, "pathloss_exp_ris"))
        if self.pathloss_exp_direct <= 0 or self.pathloss_exp_ris <= 0:
            raise ConfigError("path loss exponents must be positive")
        set_("rician_factor", _check_finite(self.rician_factor, "rician_factor", minimum=0.0))

        seed = self.rng_seed
        if isinstance(seed, bool) or not isinstance(seed, numbers.Integral) or seed < 0:
            raise ConfigError(f"rng_seed must be a nonnegative integer, got {seed!r}")
        set_("rng_seed", int(seed))

    @property
    def tx_power_mw(self):
        """Per-BS transmit budgets in linear milliwatts, shape (L,)."""
        return np.array([dbm_to_mw(p) for p in self.tx_power_dbm])

    @property
    def noise_mw(self):
        return dbm_to_mw(self.noise_power_dbm)

    @property
    def weights_array(self):
        """Rate weights as an (L, K) float array."""
        return np.array(self.weights, dtype=float)

    @property
    def surface_sizes(self):
        """Element count per reflecting surface; sums to ris_elements."""
        return self.surface_elements


# section -> allowed keys for the YAML schema
_SCHEMA = {
    "system": ("num_cells", "users_per_cell", "tx_antennas", "rx_antennas",
               "num_streams", "ris_elements"),
    "power": ("tx_power_dbm", "noise_power_dbm"),
    "geometry": ("bs_positions", "ris_positions", "surface_elements",
                 "user_disk_centers", "user_disk_radius"),
    "fading": ("pathloss_ref_db", "pathloss_exp_direct", "pathloss_exp_ris",
               "rician_factor"),
}
_TOP_LEVEL = ("weights", "rng_seed")


def scenario_from_dict(data):
    """Build a ScenarioConfig from a nested mapping (the YAML schema).

    Unknown sections or keys are rejected so that typos fail loudly.
    """
    if not isinstance(data, dict):
        raise ConfigError(f"configuration root must be a mapping, got {type(data).__name__}")
    kwargs = {}
    for section, value in data.items():
        if section in _TOP_LEVEL:
            kwargs[section] = value
            continue
        if section not in _SCHEMA:
            raise ConfigError(f"unknown configuration section {section!r}")
        if not isinstance(value, dict):
            raise ConfigError(f"section {section!r} must be a mapping")
        for key, inner in value.items():
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in section {section!r}")
            kwargs[key] = inner
    return ScenarioConfig(**kwargs)


def load_scenario(path):
    """Load a ScenarioConfig from a YAML file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read configuration file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse configuration file {path}: {exc}") from exc
    if data is None:
        data = {}
    return scenario_from_dict(data)
