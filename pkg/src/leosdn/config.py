"""Scenario files: YAML with a fixed schema, validated with line-anchored errors.

Schema (all sections optional except ``ground_stations``)::

    constellation:
      num_planes: 6               # int >= 1
      sats_per_plane: 11          # int >= 1
      altitude_km: 1325.0         # > 0
      inclination_deg: 98.98      # [0, 180]
      raan_spread_deg: 360.0      # total RAAN span across planes
      inter_plane_phasing: 0      # Walker phasing factor F
      epoch_s: 0.0
    isl:
      inter_plane_enabled: true
      wrap_planes: true           # link last plane back to plane 0
      polar_cutoff_deg: null      # disable inter-plane links above this |latitude|
      min_elevation_deg: 10.0     # ground visibility mask, inclusive
    weights:
      w_delay: 0.75
      max_propagation_delay_ms: 150.0
    horizon_slots: 360
    slot_duration_s: 10.0
    approaches: [ssca, dsca, opt-dsca]
    k_values: [2, 3, 4, 5, 6, 7]
    ground_stations:              # priority order: the first K are DSCA's active set
      - {name: Toronto, lat: 43.6532, lon: -79.3832}
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from .assign import ObjectiveWeights
from .metrics import Approach
from .orbit import ConstellationConfig, GroundStation
from .topology import IslPolicy


class ConfigError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.message = message
        self.line = line
        self.path = path
        super().__init__(str(self))

    def __str__(self) -> str:
        where = self.path or "<scenario>"
        if self.line is not None:
            where += f":{self.line}"
        return f"{where}: {self.message}"


@dataclass(frozen=True)
class ScenarioConfig:
    ground_stations: tuple[GroundStation, ...]
    constellation: ConstellationConfig = ConstellationConfig()
    isl_policy: IslPolicy = IslPolicy()
    weights: ObjectiveWeights = ObjectiveWeights()
    horizon_slots: int = 360
    slot_duration_s: float = 10.0
    approaches: tuple[Approach, ...] = (Approach.SSCA, Approach.DSCA, Approach.OPT_DSCA)
    k_values: tuple[int, ...] = field(default=(2, 3, 4, 5, 6, 7))

    def __post_init__(self):
        if not self.ground_stations:
            raise ValueError("at least one ground station is required")
        if self.horizon_slots < 1:
            raise ValueError("horizon_slots must be >= 1")
        if not self.slot_duration_s > 0:
            raise ValueError("slot_duration_s must be positive")
        for k in self.k_values:
            if not 1 <= k <= len(self.ground_stations):
                raise ValueError(f"k={k} outside 1..{len(self.ground_stations)}")

    @property
    def m(self) -> int:
        return len(self.ground_stations)

    def geometry_digest(self) -> str:
        """Hash of everything that determines the delay matrices."""
        return _digest({k: self.as_dict()[k] for k in
                        ("constellation", "isl", "ground_stations", "horizon_slots", "slot_duration_s")})

    def digest(self) -> str:
        return _digest(self.as_dict())

    def as_dict(self) -> dict[str, Any]:
        return {
            "constellation": dataclasses.asdict(self.constellation),
            "isl": dataclasses.asdict(self.isl_policy),
            "weights": dataclasses.asdict(self.weights),
            "horizon_slots": self.horizon_slots,
            "slot_duration_s": self.slot_duration_s,
            "approaches": [a.value for a in self.approaches],
            "k_values": list(self.k_values),
            "ground_stations": [
                {"name": g.name, "lat": g.latitude_deg, "lon": g.longitude_deg}
                for g in self.ground_stations
            ],
        }


def _digest(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


class _Section:
    """Typed accessor over one YAML mapping node that remembers line numbers."""

    def __init__(self, node: yaml.MappingNode, name: str):
        self.name = name
        self.line = node.start_mark.line + 1
        self.items: dict[str, yaml.Node] = {}
        self.key_lines: dict[str, int] = {}
        for key_node, value_node in node.value:
            key = key_node.value
            if key in self.items:
                raise ConfigError(f"duplicate key '{self._path(key)}'", key_node.start_mark.line + 1)
            self.items[key] = value_node
            self.key_lines[key] = key_node.start_mark.line + 1
        self.used: set[str] = set()

    def _path(self, key: str) -> str:
        return f"{self.name}.{key}" if self.name else key

    def error(self, key: Optional[str], message: str) -> ConfigError:
        line = self.key_lines.get(key, self.line) if key else self.line
        return ConfigError(message, line)

    def get(self, key: str, kind: str, default=None):
        self.used.add(key)
        node = self.items.get(key)
        if node is None:
            return default
        value = _construct(node)
        label = self._path(key)
        if kind == "int":
            if isinstance(value, bool) or not isinstance(value, int):
                raise self.error(key, f"'{label}' must be an integer, got {value!r}")
        elif kind == "float":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise self.error(key, f"'{label}' must be a number, got {value!r}")
            value = float(value)
        elif kind == "optfloat":
            if value is not None:
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise self.error(key, f"'{label}' must be a number or null, got {value!r}")
                value = float(value)
        elif kind == "bool":
            if not isinstance(value, bool):
                raise self.error(key, f"'{label}' must be true or false, got {value!r}")
        return value

    def section(self, key: str) -> Optional["_Section"]:
        self.used.add(key)
        node = self.items.get(key)
        if node is None:
            return None
        if not isinstance(node, yaml.MappingNode):
            raise self.error(key, f"'{self._path(key)}' must be a mapping")
        return _Section(node, self._path(key))

    def reject_unknown(self) -> None:
        for key in self.items:
            if key not in self.used:
                raise self.error(key, f"unknown key '{self._path(key)}'")


def _construct(node: yaml.Node):
    loader = yaml.SafeLoader("")
    try:
        return loader.construct_object(node, deep=True)
    finally:
        loader.dispose()


def _build(section: _Section, key: str, cls, **kwargs):
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise section.error(key, str(exc)) from None


def parse_scenario(text: str, path: Optional[str] = None) -> ScenarioConfig:
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark is not None else None
        raise ConfigError(f"YAML syntax error: {exc.problem or exc.context}", line, path) from None
    if root is None:
        raise ConfigError("scenario file is empty", 1, path)
    if not isinstance(root, yaml.MappingNode):
        raise ConfigError("scenario root must be a mapping", root.start_mark.line + 1, path)
    try:
        return _from_root(_Section(root, ""))
    except ConfigError as exc:
        exc.path = path
        raise


def _from_root(root: _Section) -> ScenarioConfig:
    defaults_c = ConstellationConfig()
    constellation = defaults_c
    sec = root.section("constellation")
    if sec is not None:
        constellation = _build(
            root, "constellation", ConstellationConfig,
            num_planes=sec.get("num_planes", "int", defaults_c.num_planes),
            sats_per_plane=sec.get("sats_per_plane", "int", defaults_c.sats_per_plane),
            altitude_km=sec.get("altitude_km", "float", defaults_c.altitude_km),
            inclination_deg=sec.get("inclination_deg", "float", defaults_c.inclination_deg),
            raan_spread_deg=sec.get("raan_spread_deg", "float", defaults_c.raan_spread_deg),
            inter_plane_phasing=sec.get("inter_plane_phasing", "float", defaults_c.inter_plane_phasing),
            epoch=sec.get("epoch_s", "float", defaults_c.epoch),
        )
        sec.reject_unknown()

    defaults_i = IslPolicy()
    policy = defaults_i
    sec = root.section("isl")
    if sec is not None:
        policy = _build(
            root, "isl", IslPolicy,
            inter_plane_enabled=sec.get("inter_plane_enabled", "bool", defaults_i.inter_plane_enabled),
            polar_cutoff_deg=sec.get("polar_cutoff_deg", "optfloat", defaults_i.polar_cutoff_deg),
            min_elevation_deg=sec.get("min_elevation_deg", "float", defaults_i.min_elevation_deg),
            wrap_planes=sec.get("wrap_planes", "bool", defaults_i.wrap_planes),
        )
        sec.reject_unknown()

    defaults_w = ObjectiveWeights()
    weights = defaults_w
    sec = root.section("weights")
    if sec is not None:
        weights = _build(
            root, "weights", ObjectiveWeights,
            w_delay=sec.get("w_delay", "float", defaults_w.w_delay),
            max_propagation_delay_ms=sec.get(
                "max_propagation_delay_ms", "float", defaults_w.max_propagation_delay_ms
            ),
        )
        sec.reject_unknown()

    stations = _stations(root)

    approaches_raw = root.get("approaches", "any", ["ssca", "dsca", "opt-dsca"])
    try:
        approaches = tuple(Approach(a) for a in approaches_raw)
    except (ValueError, TypeError):
        raise root.error("approaches", f"approaches must be a list drawn from "
                         f"{[a.value for a in Approach]}, got {approaches_raw!r}") from None

    k_raw = root.get("k_values", "any", [2, 3, 4, 5, 6, 7])
    if not isinstance(k_raw, list) or not all(isinstance(k, int) and not isinstance(k, bool) for k in k_raw):
        raise root.error("k_values", f"k_values must be a list of integers, got {k_raw!r}")

    horizon = root.get("horizon_slots", "int", 360)
    duration = root.get("slot_duration_s", "float", 10.0)
    root.reject_unknown()

    for key, ok, msg in (
        ("horizon_slots", horizon >= 1, "horizon_slots must be >= 1"),
        ("slot_duration_s", duration > 0, "slot_duration_s must be positive"),
    ):
        if not ok:
            raise root.error(key, msg)
    for k in k_raw:
        if not 1 <= k <= len(stations):
            raise root.error("k_values", f"k={k} outside 1..{len(stations)} (number of ground stations)")

    return ScenarioConfig(
        ground_stations=stations,
        constellation=constellation,
        isl_policy=policy,
        weights=weights,
        horizon_slots=horizon,
        slot_duration_s=duration,
        approaches=approaches,
        k_values=tuple(k_raw),
    )


def _stations(root: _Section) -> tuple[GroundStation, ...]:
    root.used.add("ground_stations")
    node = root.items.get("ground_stations")
    if node is None:
        raise root.error(None, "missing required key 'ground_stations'")
    if not isinstance(node, yaml.SequenceNode) or not node.value:
        raise root.error("ground_stations", "'ground_stations' must be a non-empty list")
    stations = []
    names = set()
    for j, item in enumerate(node.value):
        if not isinstance(item, yaml.MappingNode):
            raise ConfigError(f"ground_stations[{j}] must be a mapping", item.start_mark.line + 1)
        sec = _Section(item, f"ground_stations[{j}]")
        name = sec.get("name", "any")
        if not isinstance(name, str) or not name:
            raise sec.error("name", f"ground_stations[{j}].name must be a non-empty string")
        if name in names:
            raise sec.error("name", f"duplicate ground station name '{name}'")
        names.add(name)
        lat = sec.get("lat", "float")
        lon = sec.get("lon", "float")
        if lat is None or lon is None:
            raise sec.error(None, f"ground_stations[{j}] needs both 'lat' and 'lon'")
        sec.reject_unknown()
        if not -90.0 <= lat <= 90.0:
            raise sec.error("lat", f"{name}: latitude must lie in [-90, 90], got {lat}")
        if not -180.0 <= lon <= 180.0:
            raise sec.error("lon", f"{name}: longitude must lie in [-180, 180], got {lon}")
        stations.append(GroundStation(j, name, lat, lon))
    return tuple(stations)


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario: {exc.strerror}", None, str(path)) from None
    return parse_scenario(text, str(path))
