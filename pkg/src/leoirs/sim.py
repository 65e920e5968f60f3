"""Scenario classification, SNR evaluation and the coverage-time, l_V and M sweeps."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import geo
from .arrays import UpaConfig, modified_elevation, INCIDENT, DEPARTURE
from .beamform import BeamformingSolution, InfeasibleGeometryError, bilinear_objective
from .channel import LinkGeometry, SystemParams, linear_to_db
from .estimator import METHODS, make_method

log = logging.getLogger(__name__)

PLANE_HALFSPACE = "plane-halfspace"
ELEVATION_MASK = "elevation-mask"
ALWAYS_DIRECT = "always-direct"
NEVER_DIRECT = "never-direct"
BLOCKAGE_MODES = (PLANE_HALFSPACE, ELEVATION_MASK, ALWAYS_DIRECT, NEVER_DIRECT)

DEFAULT_METHODS = ("proposed", "2d-tilt", "no-tilt", "no-irs")
M_SWEEP_METHODS = ("proposed", "2d-tilt", "no-tilt", "isotropic")


@dataclass(frozen=True)
class BlockageModel:
    """Rule deciding whether the satellite-GU line of sight exists.

    For ``plane-halfspace`` a missing ``plane_point``/``plane_normal`` means
    the plane of the IRS with the normal along its boresight.
    """

    mode: str = PLANE_HALFSPACE
    plane_point: Optional[tuple] = None
    plane_normal: Optional[tuple] = None
    mask_angle: float = np.deg2rad(10.0)

    def __post_init__(self):
        if self.mode not in BLOCKAGE_MODES:
            raise ValueError(f"unknown blockage mode {self.mode!r}")
        if self.plane_normal is not None:
            n = np.linalg.norm(self.plane_normal)
            if abs(n - 1.0) > 1e-9:
                raise ValueError("blockage plane normal must be a unit vector")


@dataclass(frozen=True)
class NodeSite:
    latitude_deg: float
    longitude_deg: float
    height: float
    heading: str


@dataclass(frozen=True)
class SimulationConfig:
    """System parameters plus the orbit, node layout and sweep settings."""

    earth_radius: float = geo.EARTH_RADIUS
    sat_altitude: float = 740e3
    sat_speed: float = 7.5e3
    orbit_start: tuple = (51.49, -0.5)
    orbit_end: tuple = (51.512, 0.5)
    irs: NodeSite = NodeSite(51.512, 0.0, 150.0, "south")
    gu: NodeSite = NodeSite(51.509, -0.009, 30.0, "north")
    l_h: float = 333.0
    l_v: float = 623.0
    satellite_heading: str = "east"
    sat_low: tuple = (51.5056, -0.2)
    sat_high: tuple = (46.30, -15.03)
    system: SystemParams = field(default_factory=SystemParams)
    power_dbw: float = 15.0
    noise_dbw: float = -120.0
    blockage: BlockageModel = field(default_factory=BlockageModel)
    time_step: float = 1.0
    duration: Optional[float] = None
    methods: tuple = DEFAULT_METHODS
    lv_values: tuple = tuple(np.arange(-1000.0, 1000.0 + 1e-9, 50.0))
    lv_satellites: tuple = ("low", "high")
    m_values: tuple = (64, 100, 144, 196, 256, 324, 400)
    m_methods: tuple = M_SWEEP_METHODS
    m_satellite: str = "high"

    def __post_init__(self):
        if not self.methods:
            raise ValueError("at least one method is required")
        for m in (*self.methods, *self.m_methods):
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")

    @property
    def orbit_radius(self) -> float:
        return self.earth_radius + self.sat_altitude

    @property
    def orbit(self) -> geo.OrbitModel:
        r = self.orbit_radius
        return geo.OrbitModel(r, self.sat_speed,
                              geo.GeodeticPoint.from_degrees(*self.orbit_start, r),
                              geo.GeodeticPoint.from_degrees(*self.orbit_end, r))

    def site_point(self, site: NodeSite) -> geo.GeodeticPoint:
        return geo.GeodeticPoint.from_degrees(site.latitude_deg, site.longitude_deg,
                                              self.earth_radius + site.height)

    def satellite_point(self, which) -> geo.GeodeticPoint:
        """``"low"``/``"high"`` or an explicit ``(lat, lon)`` pair in degrees."""
        if isinstance(which, str):
            lat_lon = {"low": self.sat_low, "high": self.sat_high}[which]
        else:
            lat_lon = which
        return geo.GeodeticPoint.from_degrees(*lat_lon, self.orbit_radius)


@dataclass
class SweepRecord:
    """One sweep point. Infeasible designs carry ``nan`` and set ``flagged``."""

    x: float
    scenario: str
    snr_db: dict
    eta: float = float("nan")
    phi_tilde_in: float = float("nan")
    phi_tilde_out: float = float("nan")
    flagged: bool = False
    note: str = ""


class Scene:
    """IRS and GU frames of a configuration; satellites are placed per snapshot."""

    def __init__(self, cfg: SimulationConfig):
        self.cfg = cfg
        self.irs_frame = geo.make_local_frame(cfg.site_point(cfg.irs), cfg.irs.heading, "horizon")
        self.gu_frame = geo.make_local_frame(cfg.site_point(cfg.gu), cfg.gu.heading, "horizon")
        offsets = self.layout_offsets()
        if abs(abs(offsets[0]) - cfg.l_v) > 1.0 or abs(abs(offsets[2]) - cfg.l_h) > 1.0:
            log.warning("GU offsets in the IRS frame (l_V=%.1f m, l_H=%.1f m) differ from "
                        "the configured l_V=%.1f m, l_H=%.1f m", abs(offsets[0]),
                        abs(offsets[2]), cfg.l_v, cfg.l_h)

    def layout_offsets(self) -> np.ndarray:
        """GU position in the IRS frame: ``(x, y, z)`` = (l_V side, height, l_H side)."""
        return self.irs_frame.to_local(self.gu_frame.origin)

    def gu_frame_at(self, lv: float) -> geo.LocalFrame:
        """GU frame moved so its signed offset along the IRS x-axis is ``lv``."""
        local = self.layout_offsets()
        local[0] = lv
        return self.gu_frame.translated(self.irs_frame.to_global(local))

    def satellite_frame(self, which) -> geo.LocalFrame:
        return geo.make_local_frame(self.cfg.satellite_point(which), self.cfg.satellite_heading, "sky")

    def geometry(self, sat_frame: geo.LocalFrame, gu_frame: Optional[geo.LocalFrame] = None,
                 scenario: Optional[str] = None) -> LinkGeometry:
        gu_frame = self.gu_frame if gu_frame is None else gu_frame
        if scenario is None:
            scenario = classify_scenario(sat_frame.origin, gu_frame.origin, self.cfg.blockage,
                                         self.irs_frame)
        return LinkGeometry.observe(sat_frame, self.irs_frame, gu_frame, direct=scenario == "II")


def classify_scenario(sat_pos, gu_pos, blockage: BlockageModel,
                      irs_frame: Optional[geo.LocalFrame] = None) -> str:
    """``"II"`` if the direct satellite-GU path is unobstructed, else ``"I"``."""
    if blockage.mode == ALWAYS_DIRECT:
        return "II"
    if blockage.mode == NEVER_DIRECT:
        return "I"
    sat_pos = np.asarray(sat_pos, dtype=float)
    gu_pos = np.asarray(gu_pos, dtype=float)
    if blockage.mode == ELEVATION_MASK:
        up = gu_pos / np.linalg.norm(gu_pos)
        d = sat_pos - gu_pos
        elevation = np.arcsin(np.clip(up @ d / np.linalg.norm(d), -1.0, 1.0))
        return "II" if elevation >= blockage.mask_angle else "I"
    if blockage.plane_point is not None and blockage.plane_normal is not None:
        point, normal = np.asarray(blockage.plane_point), np.asarray(blockage.plane_normal)
    elif irs_frame is not None:
        point, normal = irs_frame.origin, irs_frame.z_axis
    else:
        raise ValueError("plane-halfspace blockage needs a plane or an IRS frame")
    s = normal @ (sat_pos - point)
    g = normal @ (gu_pos - point)
    return "II" if s * g > 0 else "I"


def evaluate_snr(composite, solution: BeamformingSolution, p_t: float, n0: float) -> float:
    """Received SNR in dB; powers in watts."""
    gain = bilinear_objective(composite, solution.w_g, solution.w_s)
    return float(linear_to_db(p_t * gain / n0))


def _solve_point(cfg: SimulationConfig, geometry: LinkGeometry, x: float, methods: Sequence[str],
                 system: Optional[SystemParams] = None) -> SweepRecord:
    system = cfg.system if system is None else system
    rec = SweepRecord(x=float(x), scenario="II" if geometry.direct else "I", snr_db={})
    reference = None
    for name in methods:
        est = make_method(name, system, cfg.power_dbw, cfg.noise_dbw)
        try:
            est.fit(geometry)
        except InfeasibleGeometryError as exc:
            rec.snr_db[name] = float("nan")
            rec.flagged = True
            rec.note = str(exc)
            continue
        rec.snr_db[name] = est.snr_db_
        if est.use_irs and (reference is None or name == "proposed"):
            reference = est
    if reference is not None:
        eta = reference.eta_
        rec.eta = eta
        rec.phi_tilde_in = modified_elevation(geometry.irs_from_sat, eta, INCIDENT)
        rec.phi_tilde_out = modified_elevation(geometry.irs_to_gu, eta, DEPARTURE)
    return rec


def sweep_times(cfg: SimulationConfig) -> np.ndarray:
    duration = cfg.orbit.duration() if cfg.duration is None else cfg.duration
    n = int(math.ceil(duration / cfg.time_step - 1e-9))
    return np.arange(max(n, 1)) * cfg.time_step


def run_time_sweep(cfg: SimulationConfig, methods: Optional[Sequence[str]] = None) -> list[SweepRecord]:
    """SNR of every method along the configured pass, one record per time step."""
    methods = tuple(cfg.methods if methods is None else methods)
    scene = Scene(cfg)
    orbit = cfg.orbit
    records = []
    for t in sweep_times(cfg):
        pos = geo.propagate_orbit(orbit, t)
        sat_frame = geo.frame_from_velocity(pos, geo.orbit_velocity(orbit, t))
        records.append(_solve_point(cfg, scene.geometry(sat_frame), t, methods))
    return records


def run_lv_sweep(cfg: SimulationConfig, sat_position="high", lv_values=None,
                 methods: Optional[Sequence[str]] = None, scenario: Optional[str] = "I"
                 ) -> list[SweepRecord]:
    """SNR versus the GU's signed offset from the IRS y-z plane.

    The satellite is held at ``sat_position``. ``scenario`` pins the
    direct-link state (the experiment is a no-direct-link one); ``None``
    defers to the blockage model.
    """
    methods = tuple(cfg.methods if methods is None else methods)
    methods = tuple(m for m in methods if m != "no-irs" or scenario != "I")
    lv_values = cfg.lv_values if lv_values is None else lv_values
    scene = Scene(cfg)
    sat_frame = scene.satellite_frame(sat_position)
    records = []
    for lv in lv_values:
        gu_frame = scene.gu_frame_at(float(lv))
        try:
            geometry = scene.geometry(sat_frame, gu_frame, scenario)
        except geo.GeometryError as exc:
            records.append(SweepRecord(float(lv), scenario or "I", {m: float("nan") for m in methods},
                                       flagged=True, note=str(exc)))
            continue
        records.append(_solve_point(cfg, geometry, lv, methods))
    return records


def square_panel(m: int) -> tuple[int, int]:
    side = math.isqrt(int(m))
    if side * side != m:
        raise ValueError(f"M={m} is not a perfect square; pass explicit (M_x, M_y) pairs")
    return side, side


def run_m_sweep(cfg: SimulationConfig, m_values=None, sat_position=None,
                methods: Optional[Sequence[str]] = None, scenario: Optional[str] = "I"
                ) -> list[SweepRecord]:
    """SNR versus the number of IRS elements.

    ``m_values`` holds element counts (square panels) or ``(M_x, M_y)`` pairs.
    """
    methods = tuple(cfg.m_methods if methods is None else methods)
    m_values = cfg.m_values if m_values is None else m_values
    sat_position = cfg.m_satellite if sat_position is None else sat_position
    scene = Scene(cfg)
    geometry = scene.geometry(scene.satellite_frame(sat_position), scenario=scenario)
    base = cfg.system.irs_array
    records = []
    for m in m_values:
        mx, my = square_panel(m) if np.ndim(m) == 0 else (int(m[0]), int(m[1]))
        system = replace(cfg.system, irs_array=UpaConfig(mx, my, base.d_x, base.d_y))
        records.append(_solve_point(cfg, geometry, mx * my, methods, system))
    return records


def improvement_stats(records: Sequence[SweepRecord], method: str, baseline: str,
                      scenario: Optional[str] = None) -> dict:
    """Mean and peak dB gain of ``method`` over ``baseline`` on finite records."""
    gaps = [r.snr_db[method] - r.snr_db[baseline] for r in records
            if (scenario is None or r.scenario == scenario)
            and np.isfinite(r.snr_db.get(method, np.nan))
            and np.isfinite(r.snr_db.get(baseline, np.nan))]
    if not gaps:
        return {"mean_db": float("nan"), "peak_db": float("nan"), "count": 0}
    return {"mean_db": float(np.mean(gaps)), "peak_db": float(np.max(gaps)), "count": len(gaps)}
