"""Circular-orbit propagation for Walker-style constellations.

Satellites and ground stations are expressed in one Earth-fixed frame
(spherical Earth, no perturbations) so that station vectors are constant
and only the satellites move between time slots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EARTH_RADIUS_KM = 6371.0
EARTH_MU = 398600.4418  # km^3/s^2
EARTH_ROTATION_RAD_S = 7.2921159e-5


@dataclass(frozen=True)
class ConstellationConfig:
    num_planes: int = 6
    sats_per_plane: int = 11
    altitude_km: float = 1325.0
    inclination_deg: float = 98.98
    raan_spread_deg: float = 360.0
    # Walker phasing factor F: plane p is shifted by 2*pi*F*p/n in argument of latitude.
    inter_plane_phasing: float = 0.0
    epoch: float = 0.0

    def __post_init__(self):
        if self.num_planes < 1 or self.sats_per_plane < 1:
            raise ValueError("num_planes and sats_per_plane must be >= 1")
        if not self.altitude_km > 0:
            raise ValueError(f"altitude_km must be positive, got {self.altitude_km}")
        if not 0.0 <= self.inclination_deg <= 180.0:
            raise ValueError(f"inclination_deg must lie in [0, 180], got {self.inclination_deg}")

    @property
    def num_satellites(self) -> int:
        return self.num_planes * self.sats_per_plane

    @property
    def radius_km(self) -> float:
        return EARTH_RADIUS_KM + self.altitude_km

    @property
    def mean_motion(self) -> float:
        """Angular rate in rad/s."""
        return math.sqrt(EARTH_MU / self.radius_km**3)

    @property
    def period_s(self) -> float:
        return orbital_period(self.altitude_km)


@dataclass(frozen=True)
class SlotIndex:
    l: int
    slot_duration_s: float = 10.0
    epoch: float = 0.0

    def __post_init__(self):
        if self.l < 0:
            raise ValueError(f"slot index must be >= 0, got {self.l}")
        if not self.slot_duration_s > 0:
            raise ValueError(f"slot_duration_s must be positive, got {self.slot_duration_s}")

    @property
    def wall_time(self) -> float:
        return self.epoch + self.l * self.slot_duration_s


@dataclass(frozen=True)
class SatelliteState:
    sat_id: int
    plane: int
    slot_in_plane: int
    position: np.ndarray  # km, Earth-fixed

    @property
    def latitude_deg(self) -> float:
        x, y, z = self.position
        return math.degrees(math.atan2(z, math.hypot(x, y)))


@dataclass(frozen=True)
class GroundStation:
    gs_id: int
    name: str
    latitude_deg: float
    longitude_deg: float

    def __post_init__(self):
        _check_latlon(self.latitude_deg, self.longitude_deg)

    @property
    def position(self) -> np.ndarray:
        return station_position(self.latitude_deg, self.longitude_deg)


def orbital_period(altitude_km: float) -> float:
    a = EARTH_RADIUS_KM + altitude_km
    return 2.0 * math.pi * math.sqrt(a**3 / EARTH_MU)


def _check_latlon(lat_deg: float, lon_deg: float) -> None:
    if not -90.0 <= lat_deg <= 90.0:
        raise ValueError(f"latitude must lie in [-90, 90], got {lat_deg}")
    if not -180.0 <= lon_deg <= 180.0:
        raise ValueError(f"longitude must lie in [-180, 180], got {lon_deg}")


def station_position(lat_deg: float, lon_deg: float) -> np.ndarray:
    """Earth-fixed position of a sea-level site on the spherical Earth, in km."""
    _check_latlon(lat_deg, lon_deg)
    lat = math.radians(lat_deg)
    lon = math.radians(lon_deg)
    return EARTH_RADIUS_KM * np.array(
        [math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat)]
    )


def inertial_positions(config: ConstellationConfig, t: float) -> np.ndarray:
    """Inertial positions (n x 3, km) at time ``t`` seconds, ordered by sat_id."""
    P, S = config.num_planes, config.sats_per_plane
    r = config.radius_km
    inc = math.radians(config.inclination_deg)

    plane = np.repeat(np.arange(P), S)
    k = np.tile(np.arange(S), P)
    raan = np.radians(plane * config.raan_spread_deg / P)
    phase = 2.0 * math.pi * config.inter_plane_phasing * plane / (P * S)
    u = 2.0 * math.pi * k / S + phase + config.mean_motion * t

    cos_u, sin_u = np.cos(u), np.sin(u)
    cos_o, sin_o = np.cos(raan), np.sin(raan)
    pos = np.empty((P * S, 3))
    pos[:, 0] = r * (cos_o * cos_u - sin_o * sin_u * math.cos(inc))
    pos[:, 1] = r * (sin_o * cos_u + cos_o * sin_u * math.cos(inc))
    pos[:, 2] = r * (sin_u * math.sin(inc))
    return pos


def to_earth_fixed(positions: np.ndarray, t: float) -> np.ndarray:
    theta = EARTH_ROTATION_RAD_S * t
    c, s = math.cos(theta), math.sin(theta)
    rot = np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])
    return positions @ rot.T


def propagate(config: ConstellationConfig, slot: SlotIndex) -> list[SatelliteState]:
    t = slot.wall_time
    pos = to_earth_fixed(inertial_positions(config, t), t)
    S = config.sats_per_plane
    return [
        SatelliteState(sat_id=i, plane=i // S, slot_in_plane=i % S, position=pos[i])
        for i in range(config.num_satellites)
    ]
