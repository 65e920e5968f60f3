"""Steering vectors for ULAs/UPAs and the response of a mechanically tilted IRS.

Element index ``m`` along an axis of ``n`` elements runs over
``floor(-n/2 + 1), ..., floor(n/2)``, so the element with index 0 is the phase
reference. UPA responses are Kronecker products ``v_x (x) v_y``; entry
``i_x * n_y + i_y`` belongs to the element ``(m_x[i_x], m_y[i_y])``.

The tilt ``eta`` rotates the panel about its x-axis, mixing the y (vertical)
and z (boresight) axes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geo import DirectionAngles

INCIDENT = "incident"
DEPARTURE = "departure"


@dataclass(frozen=True)
class UpaConfig:
    """Uniform planar array of ``n_x`` by ``n_y`` elements with spacings in metres."""

    n_x: int
    n_y: int
    d_x: float
    d_y: float

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1:
            raise ValueError("element counts must be at least 1")
        if not (self.d_x > 0 and self.d_y > 0):
            raise ValueError("element spacings must be positive")

    @property
    def size(self) -> int:
        return self.n_x * self.n_y

    def element_indices(self) -> tuple[np.ndarray, np.ndarray]:
        """Flattened ``(m_x, m_y)`` index arrays in Kronecker order."""
        mx, my = np.meshgrid(ula_indices(self.n_x), ula_indices(self.n_y), indexing="ij")
        return mx.ravel(), my.ravel()


@dataclass(frozen=True)
class TiltFeasibility:
    """Tilt bounds of the IRS and the helper terms behind the modified elevations."""

    alpha_incident: float
    alpha_departure: float
    b_incident: float
    b_departure: float

    @property
    def interval(self) -> tuple[float, float]:
        return self.alpha_departure, self.alpha_incident

    @property
    def is_empty(self) -> bool:
        return self.alpha_departure > self.alpha_incident


def ula_indices(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("element count must be at least 1")
    return np.arange(int(np.floor(-n / 2 + 1)), n // 2 + 1)


def ula_steering(delta: float, n: int, k_w: float) -> np.ndarray:
    """ULA response for an inter-element path difference ``delta`` (metres)."""
    return np.exp(1j * k_w * ula_indices(n) * delta)


def upa_response(angles: DirectionAngles, cfg: UpaConfig, k_w: float) -> np.ndarray:
    az, el = angles
    ce = np.cos(el)
    return np.kron(
        ula_steering(cfg.d_x * ce * np.cos(az), cfg.n_x, k_w),
        ula_steering(cfg.d_y * ce * np.sin(az), cfg.n_y, k_w),
    )


def rotation_matrix(eta: float) -> np.ndarray:
    c, s = np.cos(eta), np.sin(eta)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def tilted_path_difference(angles: DirectionAngles, eta, m_x, m_y, d_x, d_y):
    """Path difference of element ``(m_x, m_y)`` of a tilted panel relative to its centre.

    Index arguments may be arrays.
    """
    az, el = angles
    return (
        m_x * np.cos(el) * np.cos(az) * d_x
        + m_y * np.cos(el) * np.sin(az) * np.cos(eta) * d_y
        + m_y * np.sin(el) * np.sin(eta) * d_y
    )


def rotate_direction(angles: DirectionAngles, eta: float) -> np.ndarray:
    """Direction of ``angles`` seen from a panel tilted by ``eta``; equals ``R(-eta) r``."""
    az, el = angles
    ce, se = np.cos(el), np.sin(el)
    c, s = np.cos(eta), np.sin(eta)
    return np.array([
        ce * np.cos(az),
        ce * np.sin(az) * c + s * se,
        se * c - ce * np.sin(az) * s,
    ])


def tilt_alpha(angles: DirectionAngles) -> float:
    """Elevation of the direction's projection on the panel's y-z plane.

    Principal-value arctangent: positive for incident (``sin az > 0``) sources
    above the plane, negative for departures with ``sin az < 0``.
    """
    az, el = angles
    return float(np.arctan(np.tan(el) / np.sin(az)))


def tilt_b(angles: DirectionAngles) -> float:
    az, el = angles
    ce, se = np.cos(el), np.sin(el)
    return float((ce * np.cos(az)) ** 2 / ((ce * np.sin(az)) ** 2 + se**2))


def tilt_feasibility(incident: DirectionAngles, departure: DirectionAngles) -> TiltFeasibility:
    """Tilt bounds for a source at ``incident`` and a user at ``departure`` (IRS frame)."""
    return TiltFeasibility(
        tilt_alpha(incident), tilt_alpha(departure), tilt_b(incident), tilt_b(departure)
    )


def _closed_form_applies(angles: DirectionAngles, side: str) -> bool:
    s = np.sin(angles.azimuth)
    if side == INCIDENT:
        return s > 1e-12
    if side == DEPARTURE:
        return s < -1e-12
    raise ValueError(f"side must be {INCIDENT!r} or {DEPARTURE!r}, got {side!r}")


def modified_elevation(angles: DirectionAngles, eta: float, side: str = INCIDENT) -> float:
    """Elevation of ``angles`` relative to the panel tilted by ``eta``.

    Uses the closed form in ``alpha``/``B`` when the azimuth lies in the
    half-plane the side implies (``0 < az < pi`` incident, ``-pi < az < 0``
    departure); otherwise the arcsine of the rotated direction.
    """
    if not _closed_form_applies(angles, side):
        return float(np.arcsin(np.clip(rotate_direction(angles, eta)[2], -1.0, 1.0)))
    alpha = tilt_alpha(angles)
    b = tilt_b(angles)
    x = alpha - eta if side == INCIDENT else eta - alpha
    return float(np.arctan(np.sin(x) / np.sqrt(b + np.cos(x) ** 2)))


def modified_azimuth(angles: DirectionAngles, eta: float) -> float:
    az, el = angles
    if abs(np.cos(az)) < 1e-12 or abs(np.cos(el)) < 1e-12:
        r = rotate_direction(angles, eta)
        return float(np.arctan2(r[1], r[0]))
    t = np.tan(az) * np.cos(eta) + np.tan(el) / np.cos(az) * np.sin(eta)
    theta = float(np.arctan(t))
    if np.cos(az) < 0:
        # arctan only covers the right half-plane; move to the left one
        theta = theta + np.pi if theta <= 0 else theta - np.pi
    return theta


def modified_angles(angles: DirectionAngles, eta: float, side: str = INCIDENT) -> DirectionAngles:
    return DirectionAngles(modified_azimuth(angles, eta), modified_elevation(angles, eta, side))


def tilted_irs_response(
    angles: DirectionAngles,
    eta: float,
    cfg: UpaConfig,
    k_w: float,
    side: str = INCIDENT,
    method: str = "modified-angle",
) -> np.ndarray:
    """Array response of the IRS tilted by ``eta``.

    ``method="modified-angle"`` evaluates the UPA response at the angles seen
    from the tilted panel; ``method="path-difference"`` projects the tilt onto
    the untilted angles. Both give the same vector.
    """
    if method == "modified-angle":
        return upa_response(modified_angles(angles, eta, side), cfg, k_w)
    if method == "path-difference":
        az, el = angles
        ce, se = np.cos(el), np.sin(el)
        return np.kron(
            ula_steering(cfg.d_x * ce * np.cos(az), cfg.n_x, k_w),
            ula_steering(cfg.d_y * (ce * np.sin(az) * np.cos(eta) + se * np.sin(eta)), cfg.n_y, k_w),
        )
    raise ValueError(f"unknown method {method!r}")
