"""Spherical-Earth geometry: coordinate conversion, circular orbits and
local array frames.

Cartesian positions are plain ``(3,)`` float arrays in an Earth-centred,
Earth-fixed frame. The Earth is a non-rotating sphere over a pass.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

EARTH_RADIUS = 6371e3

_HEADINGS = {"north": 0.0, "east": 0.5 * np.pi, "south": np.pi, "west": 1.5 * np.pi}


class GeometryError(ValueError):
    """Raised for degenerate or ambiguous geometric configurations."""


@dataclass(frozen=True)
class GeodeticPoint:
    """A point on (or above) the spherical Earth.

    Angles are in radians; ``radius`` is measured from the Earth's centre.
    """

    latitude: float
    longitude: float
    radius: float

    def __post_init__(self):
        if not abs(self.latitude) <= 0.5 * np.pi + 1e-15:
            raise ValueError(f"latitude out of range: {self.latitude!r}")
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius!r}")

    @classmethod
    def from_degrees(cls, lat_deg: float, lon_deg: float, radius: float) -> "GeodeticPoint":
        return cls(np.deg2rad(lat_deg), np.deg2rad(lon_deg), float(radius))

    @classmethod
    def above_ground(cls, lat_deg: float, lon_deg: float, height: float) -> "GeodeticPoint":
        """Point ``height`` metres above the spherical surface."""
        return cls.from_degrees(lat_deg, lon_deg, EARTH_RADIUS + height)


class DirectionAngles(NamedTuple):
    """Azimuth/elevation pair of a direction in a local array frame.

    The direction is ``(cos(el) cos(az), cos(el) sin(az), sin(el))`` in the
    frame's ``(x, y, z)`` basis, so ``el`` is measured off the array plane
    and ``az`` within it.
    """

    azimuth: float
    elevation: float

    def unit_vector(self) -> np.ndarray:
        return unit_vector(self.azimuth, self.elevation)

    def degrees(self) -> tuple[float, float]:
        """``(elevation, azimuth)`` in degrees, the order used in reports."""
        return float(np.rad2deg(self.elevation)), float(np.rad2deg(self.azimuth))


def unit_vector(azimuth, elevation) -> np.ndarray:
    ce = np.cos(elevation)
    return np.array([ce * np.cos(azimuth), ce * np.sin(azimuth), np.sin(elevation)])


@dataclass(frozen=True)
class LocalFrame:
    """Right-handed orthonormal array frame anchored at ``origin``.

    ``x_axis`` is the horizontal array axis, ``y_axis`` the vertical array
    axis and ``z_axis`` the boresight (array normal).
    """

    origin: np.ndarray
    x_axis: np.ndarray
    y_axis: np.ndarray
    z_axis: np.ndarray

    @property
    def basis(self) -> np.ndarray:
        """Rows are the frame axes, so ``basis @ v`` gives local components."""
        return np.vstack([self.x_axis, self.y_axis, self.z_axis])

    def to_local(self, point: np.ndarray) -> np.ndarray:
        return self.basis @ (np.asarray(point, dtype=float) - self.origin)

    def to_global(self, local: np.ndarray) -> np.ndarray:
        return self.origin + self.basis.T @ np.asarray(local, dtype=float)

    def translated(self, origin: np.ndarray) -> "LocalFrame":
        return LocalFrame(np.asarray(origin, dtype=float), self.x_axis, self.y_axis, self.z_axis)

    def check_orthonormal(self, atol: float = 1e-12) -> bool:
        B = self.basis
        ortho = np.allclose(B @ B.T, np.eye(3), rtol=0.0, atol=atol)
        handed = np.allclose(np.cross(self.x_axis, self.y_axis), self.z_axis, rtol=0.0, atol=atol)
        return bool(ortho and handed)


@dataclass(frozen=True)
class OrbitModel:
    """Circular orbit along the great circle from ``start_point`` towards ``end_point``."""

    orbit_radius: float
    speed: float
    start_point: GeodeticPoint
    end_point: GeodeticPoint

    def __post_init__(self):
        if not self.orbit_radius > EARTH_RADIUS:
            raise ValueError("orbit radius must exceed the Earth radius")
        if not self.speed > 0:
            raise ValueError("orbital speed must be positive")
        if self.start_point == self.end_point:
            raise ValueError("orbit start and end points coincide")

    @property
    def angular_rate(self) -> float:
        return self.speed / self.orbit_radius

    def arc_angle(self) -> float:
        """Central angle between start and end points (radians)."""
        u0 = _unit(geodetic_to_cartesian(self.start_point))
        u1 = _unit(geodetic_to_cartesian(self.end_point))
        return float(np.arctan2(np.linalg.norm(np.cross(u0, u1)), u0 @ u1))

    def duration(self) -> float:
        """Time to fly from start to end (seconds)."""
        return self.arc_angle() / self.angular_rate


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def geodetic_to_cartesian(p: GeodeticPoint) -> np.ndarray:
    cl = np.cos(p.latitude)
    return p.radius * np.array(
        [cl * np.cos(p.longitude), cl * np.sin(p.longitude), np.sin(p.latitude)]
    )


def cartesian_to_geodetic(v) -> GeodeticPoint:
    x, y, z = np.asarray(v, dtype=float)
    r = float(np.sqrt(x * x + y * y + z * z))
    if r == 0.0:
        raise GeometryError("cannot convert the zero vector to geodetic coordinates")
    rho = np.hypot(x, y)
    lat = float(np.arctan2(z, rho))
    # longitude is undefined at the poles; pin it to 0
    lon = float(np.arctan2(y, x)) if rho > 0.0 else 0.0
    return GeodeticPoint(lat, lon, r)


def enu_basis(p: GeodeticPoint) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Local (east, north, up) unit vectors at ``p``."""
    sl, cl = np.sin(p.latitude), np.cos(p.latitude)
    so, co = np.sin(p.longitude), np.cos(p.longitude)
    east = np.array([-so, co, 0.0])
    north = np.array([-sl * co, -sl * so, cl])
    up = np.array([cl * co, cl * so, sl])
    return east, north, up


def _heading_vector(p: GeodeticPoint, heading: Union[str, float]) -> np.ndarray:
    if isinstance(heading, str):
        try:
            bearing = _HEADINGS[heading.lower()]
        except KeyError:
            raise ValueError(f"unknown heading {heading!r}") from None
    else:
        bearing = float(heading)
    east, north, _ = enu_basis(p)
    return np.cos(bearing) * north + np.sin(bearing) * east


def make_local_frame(
    position: GeodeticPoint, heading: Union[str, float] = "north", face: str = "horizon"
) -> LocalFrame:
    """Array frame of a node at ``position``.

    ``heading`` is a compass name or a bearing in radians clockwise from
    north. A ``"horizon"``-facing array (GU, IRS) stands vertically with its
    boresight along the heading and ``y_axis`` pointing up. A ``"sky"``-facing
    array (satellite) looks at nadir with ``y_axis`` along the heading, which
    for a satellite is its direction of flight.
    """
    if np.cos(position.latitude) < 1e-12:
        raise GeometryError("local frame is undefined at a pole")
    _, _, up = enu_basis(position)
    h = _heading_vector(position, heading)
    if face == "horizon":
        y, z = up, h
    elif face == "sky":
        y, z = h, -up
    else:
        raise ValueError(f"face must be 'horizon' or 'sky', got {face!r}")
    x = np.cross(y, z)
    return LocalFrame(geodetic_to_cartesian(position), x, y, z)


def frame_from_velocity(origin: np.ndarray, velocity: np.ndarray) -> LocalFrame:
    """Nadir-looking frame of a satellite at ``origin`` flying along ``velocity``."""
    origin = np.asarray(origin, dtype=float)
    z = -_unit(origin)
    v = np.asarray(velocity, dtype=float)
    y = v - (v @ z) * z
    if np.linalg.norm(y) < 1e-12 * np.linalg.norm(v) or not np.any(v):
        raise GeometryError("velocity is parallel to the radial direction")
    y = _unit(y)
    return LocalFrame(origin, np.cross(y, z), y, z)


def propagate_orbit(orbit: OrbitModel, t: float) -> np.ndarray:
    """Satellite position after ``t`` seconds of flight."""
    if t < 0:
        raise ValueError("time must be non-negative")
    u0, w = _orbit_plane(orbit)
    a = orbit.angular_rate * t
    return orbit.orbit_radius * (np.cos(a) * u0 + np.sin(a) * w)


def orbit_velocity(orbit: OrbitModel, t: float) -> np.ndarray:
    u0, w = _orbit_plane(orbit)
    a = orbit.angular_rate * t
    return orbit.speed * (-np.sin(a) * u0 + np.cos(a) * w)


def _orbit_plane(orbit: OrbitModel) -> tuple[np.ndarray, np.ndarray]:
    u0 = _unit(geodetic_to_cartesian(orbit.start_point))
    u1 = _unit(geodetic_to_cartesian(orbit.end_point))
    n = np.cross(u0, u1)
    nn = np.linalg.norm(n)
    if nn < 1e-12:
        raise GeometryError("start and end points are antipodal or coincident; arc is ambiguous")
    return u0, np.cross(n / nn, u0)


def direction_angles(frame: LocalFrame, target) -> DirectionAngles:
    """Azimuth/elevation of ``target`` as seen from ``frame``'s origin."""
    d = np.asarray(target, dtype=float) - frame.origin
    n = np.linalg.norm(d)
    if n == 0.0:
        raise GeometryError("target coincides with the frame origin")
    lx, ly, lz = frame.basis @ (d / n)
    el = float(np.arcsin(np.clip(lz, -1.0, 1.0)))
    az = float(np.arctan2(ly, lx))
    if az == -np.pi:
        az = np.pi
    return DirectionAngles(az, el)


def distance(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))
