"""YAML configuration loading with built-in defaults.

Sections: ``earth``, ``orbit``, ``nodes``, ``arrays``, ``radiation``,
``power``, ``blockage``, ``sweep``. Omitted keys keep their defaults; unknown
keys are errors. Every error names the offending field and, when known, its
line.
"""
from __future__ import annotations

import numbers
from dataclasses import replace
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .arrays import UpaConfig
from .channel import RadiationParams, SystemParams, db_to_linear
from .estimator import METHODS
from .sim import BLOCKAGE_MODES, BlockageModel, NodeSite, SimulationConfig


class ConfigError(ValueError):
    pass


_SCHEMA: dict[str, dict[str, Any]] = {
    "earth": {"radius_km": 6371.0},
    "orbit": {"altitude_km": 740.0, "speed_km_s": 7.5,
              "start": (51.49, -0.5), "end": (51.512, 0.5)},
    "nodes": {
        "irs": {"lat": 51.512, "lon": 0.0, "height_m": 150.0, "heading": "south"},
        "gu": {"lat": 51.509, "lon": -0.009, "height_m": 30.0, "heading": "north"},
        "l_h_m": 333.0, "l_v_m": 623.0,
        "satellite_heading": "east",
        "sat_low": (51.5056, -0.2), "sat_high": (46.30, -15.03),
    },
    "arrays": {
        "sat": {"n_x": 15, "n_y": 15, "d_x": 0.25, "d_y": 0.25},
        "gu": {"n_x": 15, "n_y": 15, "d_x": 0.25, "d_y": 0.25},
        "irs": {"m_x": 20, "m_y": 20, "d_x": 0.25, "d_y": 0.25},
    },
    "radiation": {"k": 2.0, "k_t": 1.0, "k_r": 1.0, "gain_gu_db": 4.0, "gain_sat_db": 4.0,
                  "gain_irs_db": 6.0, "wavelength_m": 2.0},
    "power": {"p_t_dbw": 15.0, "n0_dbw": -120.0},
    "blockage": {"mode": "plane-halfspace", "point": None, "normal": None, "mask_deg": 10.0},
    "sweep": {"time_step_s": 1.0, "duration_s": None,
              "methods": ["proposed", "2d-tilt", "no-tilt", "no-irs"],
              "lv_values_m": None, "lv_satellites": ["low", "high"],
              "m_values": [64, 100, 144, 196, 256, 324, 400],
              "m_methods": ["proposed", "2d-tilt", "no-tilt", "isotropic"],
              "m_satellite": "high"},
}


def _key_lines(node, path=(), out=None) -> dict:
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            p = path + (str(k.value),)
            out[p] = k.start_mark.line + 1
            _key_lines(v, p, out)
    return out


class _Reader:
    def __init__(self, data: dict, lines: dict, source: str):
        self.data, self.lines, self.source = data, lines, source

    def fail(self, path, msg):
        where = self.source
        line = self.lines.get(tuple(path))
        if line is not None:
            where = f"{where}:{line}"
        raise ConfigError(f"{where}: {'.'.join(path)}: {msg}")

    def merge(self, schema: dict, data, path=()) -> dict:
        if data is None:
            data = {}
        if not isinstance(data, dict):
            self.fail(path, "expected a mapping")
        for key in data:
            if key not in schema:
                self.fail(path + (str(key),), "unknown key")
        out = {}
        for key, default in schema.items():
            if isinstance(default, dict):
                out[key] = self.merge(default, data.get(key), path + (key,))
            else:
                out[key] = data.get(key, default)
        return out

    def number(self, path, value, positive=False, nonneg=False, allow_none=False):
        if value is None and allow_none:
            return None
        if isinstance(value, bool) or not isinstance(value, numbers.Real) or not np.isfinite(value):
            self.fail(path, f"expected a finite number, got {value!r}")
        if positive and value <= 0:
            self.fail(path, f"must be positive, got {value!r}")
        if nonneg and value < 0:
            self.fail(path, f"must be non-negative, got {value!r}")
        return float(value)

    def count(self, path, value):
        if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < 1:
            self.fail(path, f"expected a positive integer, got {value!r}")
        return int(value)

    def lat_lon(self, path, value):
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            self.fail(path, f"expected [lat, lon] in degrees, got {value!r}")
        lat = self.number(path, value[0])
        lon = self.number(path, value[1])
        if abs(lat) > 90:
            self.fail(path, f"latitude out of range: {lat}")
        return lat, lon

    def vector(self, path, value):
        if value is None:
            return None
        if not isinstance(value, (list, tuple)) or len(value) != 3:
            self.fail(path, f"expected a 3-vector, got {value!r}")
        return tuple(self.number(path, v) for v in value)

    def choice(self, path, value, options):
        if value not in options:
            self.fail(path, f"must be one of {list(options)}, got {value!r}")
        return value

    def methods(self, path, value):
        if not isinstance(value, (list, tuple)) or not value:
            self.fail(path, "expected a non-empty list of method names")
        for v in value:
            self.choice(path, v, list(METHODS))
        return tuple(value)

    def satellite(self, path, value):
        if isinstance(value, str):
            return self.choice(path, value, ["low", "high"])
        return self.lat_lon(path, value)


_HEADINGS = ["north", "south", "east", "west"]


def _site(r: _Reader, path, d) -> NodeSite:
    lat = r.number(path + ("lat",), d["lat"])
    if abs(lat) >= 90:
        r.fail(path + ("lat",), f"latitude must lie strictly between the poles, got {lat}")
    return NodeSite(lat, r.number(path + ("lon",), d["lon"]),
                    r.number(path + ("height_m",), d["height_m"], nonneg=True),
                    r.choice(path + ("heading",), d["heading"], _HEADINGS))


def _upa(r: _Reader, path, d, nx="n_x", ny="n_y") -> UpaConfig:
    return UpaConfig(r.count(path + (nx,), d[nx]), r.count(path + (ny,), d[ny]),
                     r.number(path + ("d_x",), d["d_x"], positive=True),
                     r.number(path + ("d_y",), d["d_y"], positive=True))


def config_from_dict(data, lines=None, source="<config>") -> SimulationConfig:
    r = _Reader(data, lines or {}, source)
    c = r.merge(_SCHEMA, data)
    radius = r.number(("earth", "radius_km"), c["earth"]["radius_km"], positive=True) * 1e3
    o = c["orbit"]
    n = c["nodes"]
    a = c["arrays"]
    rad = c["radiation"]
    b = c["blockage"]
    s = c["sweep"]

    system = SystemParams(
        sat_array=_upa(r, ("arrays", "sat"), a["sat"]),
        gu_array=_upa(r, ("arrays", "gu"), a["gu"]),
        irs_array=_upa(r, ("arrays", "irs"), a["irs"], "m_x", "m_y"),
        radiation=RadiationParams(
            k=r.number(("radiation", "k"), rad["k"], nonneg=True),
            k_t=r.number(("radiation", "k_t"), rad["k_t"], nonneg=True),
            k_r=r.number(("radiation", "k_r"), rad["k_r"], nonneg=True),
            gain_gu=db_to_linear(r.number(("radiation", "gain_gu_db"), rad["gain_gu_db"])),
            gain_sat=db_to_linear(r.number(("radiation", "gain_sat_db"), rad["gain_sat_db"])),
            gain_irs=db_to_linear(r.number(("radiation", "gain_irs_db"), rad["gain_irs_db"])),
        ),
        wavelength=r.number(("radiation", "wavelength_m"), rad["wavelength_m"], positive=True),
    )

    normal = r.vector(("blockage", "normal"), b["normal"])
    if normal is not None:
        nn = float(np.linalg.norm(normal))
        if nn == 0:
            r.fail(("blockage", "normal"), "normal must be non-zero")
        normal = tuple(v / nn for v in normal)
    blockage = BlockageModel(
        mode=r.choice(("blockage", "mode"), b["mode"], BLOCKAGE_MODES),
        plane_point=r.vector(("blockage", "point"), b["point"]),
        plane_normal=normal,
        mask_angle=np.deg2rad(r.number(("blockage", "mask_deg"), b["mask_deg"])),
    )

    lv = s["lv_values_m"]
    if lv is not None:
        if not isinstance(lv, (list, tuple)) or not lv:
            r.fail(("sweep", "lv_values_m"), "expected a non-empty list")
        lv = tuple(r.number(("sweep", "lv_values_m"), v) for v in lv)
    m_values = s["m_values"]
    if not isinstance(m_values, (list, tuple)) or not m_values:
        r.fail(("sweep", "m_values"), "expected a non-empty list")
    parsed_m = []
    for v in m_values:
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                r.fail(("sweep", "m_values"), f"expected M or [M_x, M_y], got {v!r}")
            parsed_m.append((r.count(("sweep", "m_values"), v[0]), r.count(("sweep", "m_values"), v[1])))
        else:
            m = r.count(("sweep", "m_values"), v)
            if int(np.sqrt(m)) ** 2 != m:
                r.fail(("sweep", "m_values"), f"{m} is not a perfect square; use [M_x, M_y]")
            parsed_m.append(m)
    sats = s["lv_satellites"]
    if not isinstance(sats, (list, tuple)) or not sats:
        r.fail(("sweep", "lv_satellites"), "expected a non-empty list")

    altitude = r.number(("orbit", "altitude_km"), o["altitude_km"], positive=True) * 1e3
    start = r.lat_lon(("orbit", "start"), o["start"])
    end = r.lat_lon(("orbit", "end"), o["end"])
    if start == end:
        r.fail(("orbit", "end"), "orbit end point equals its start point")

    kwargs = dict(
        earth_radius=radius,
        sat_altitude=altitude,
        sat_speed=r.number(("orbit", "speed_km_s"), o["speed_km_s"], positive=True) * 1e3,
        orbit_start=start,
        orbit_end=end,
        irs=_site(r, ("nodes", "irs"), n["irs"]),
        gu=_site(r, ("nodes", "gu"), n["gu"]),
        l_h=r.number(("nodes", "l_h_m"), n["l_h_m"], nonneg=True),
        l_v=r.number(("nodes", "l_v_m"), n["l_v_m"], nonneg=True),
        satellite_heading=r.choice(("nodes", "satellite_heading"), n["satellite_heading"], _HEADINGS),
        sat_low=r.lat_lon(("nodes", "sat_low"), n["sat_low"]),
        sat_high=r.lat_lon(("nodes", "sat_high"), n["sat_high"]),
        system=system,
        power_dbw=r.number(("power", "p_t_dbw"), c["power"]["p_t_dbw"]),
        noise_dbw=r.number(("power", "n0_dbw"), c["power"]["n0_dbw"]),
        blockage=blockage,
        time_step=r.number(("sweep", "time_step_s"), s["time_step_s"], positive=True),
        duration=r.number(("sweep", "duration_s"), s["duration_s"], positive=True, allow_none=True),
        methods=r.methods(("sweep", "methods"), s["methods"]),
        lv_satellites=tuple(r.satellite(("sweep", "lv_satellites"), v) for v in sats),
        m_values=tuple(parsed_m),
        m_methods=r.methods(("sweep", "m_methods"), s["m_methods"]),
        m_satellite=r.satellite(("sweep", "m_satellite"), s["m_satellite"]),
    )
    if lv is not None:
        kwargs["lv_values"] = lv
    return SimulationConfig(**kwargs)


def parse_config(path) -> SimulationConfig:
    """Load a YAML config file; an empty file gives the built-in defaults."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = yaml.safe_load(text)
        node = yaml.compose(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        line = f":{mark.line + 1}" if mark is not None else ""
        raise ConfigError(f"{path}{line}: malformed YAML: {exc.problem}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: malformed YAML: {exc}") from None
    lines = _key_lines(node) if node is not None else {}
    return config_from_dict(data, lines, str(path))


def with_methods(cfg: SimulationConfig, methods) -> SimulationConfig:
    return replace(cfg, methods=tuple(methods))
