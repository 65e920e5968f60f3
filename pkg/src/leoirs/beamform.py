"""Closed-form IRS tilt, passive phase shifts and transceiver beams.

Objectives follow the bilinear form ``|w_G^T H w_S|^2`` (plain transpose on
both sides), so matched beams are conjugates of the array responses.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .arrays import TiltFeasibility
from .geo import DirectionAngles


class InfeasibleGeometryError(ValueError):
    """No tilt keeps both the satellite and the GU in front of the IRS."""


@dataclass(frozen=True)
class BeamformingSolution:
    """Transmit/receive beams, IRS diagonal, tilt and common phase (radians)."""

    w_s: np.ndarray
    w_g: np.ndarray
    theta: Optional[np.ndarray]
    eta: float
    rho: float

    def check(self, feasibility: Optional[TiltFeasibility] = None, atol: float = 1e-12) -> bool:
        ok = abs(np.linalg.norm(self.w_s) - 1) <= atol and abs(np.linalg.norm(self.w_g) - 1) <= atol
        if self.theta is not None:
            ok = ok and bool(np.all(np.abs(np.abs(self.theta) - 1) <= atol))
        if feasibility is not None:
            lo, hi = feasibility.interval
            ok = ok and lo - atol <= self.eta <= hi + atol
        return bool(ok)


@dataclass(frozen=True)
class ObjectiveBreakdown:
    """Per-side factors of the objective.

    Scenario I: ``beta_eff**2 * h_g * h_s * h_i``. Scenario II uses ``g_g``
    (GU side, common phase folded in) and ``g_s`` (satellite side).
    """

    h_g: float = float("nan")
    h_s: float = float("nan")
    h_i: float = float("nan")
    g_g: float = float("nan")
    g_s: float = float("nan")


def wrap_angle(x: float) -> float:
    """Wrap to ``(-pi, pi]``."""
    y = float(np.angle(np.exp(1j * x)))
    return np.pi if y == -np.pi else y


def optimal_tilt(feas: TiltFeasibility) -> float:
    """Tilt maximising the radiation pattern, clamped into the feasible interval."""
    lo, hi = feas.alpha_departure, feas.alpha_incident
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise ValueError("tilt bounds must be finite")
    if lo > hi:
        raise InfeasibleGeometryError(
            f"empty tilt interval [{np.rad2deg(lo):.3f}, {np.rad2deg(hi):.3f}] deg")
    return float(np.clip(0.5 * (lo + hi), lo, hi))


def tilt_2d_baseline(irs_incident: DirectionAngles, irs_departure: DirectionAngles) -> float:
    """Elevation-only tilt that ignores the azimuths."""
    return 0.5 * (irs_incident.elevation - irs_departure.elevation)


def optimal_phase_shifts(irs_departure_resp, irs_incident_resp, eps_g: complex = 1.0,
                         eps_s: complex = 1.0, rho: float = 0.0) -> np.ndarray:
    """IRS diagonal that co-phases every reflected path to the common phase ``rho``."""
    a_d = np.asarray(irs_departure_resp)
    a_a = np.asarray(irs_incident_resp)
    if a_d.shape != a_a.shape:
        raise ValueError(f"response lengths differ: {a_d.shape} vs {a_a.shape}")
    cascade = eps_g * eps_s * a_d * a_a
    # unit-modulus by construction; normalise away rounding in the responses
    return np.exp(1j * rho) * np.exp(-1j * np.angle(cascade))


def _matched(a) -> np.ndarray:
    a = np.asarray(a)
    n = np.linalg.norm(a)
    if n == 0:
        raise ValueError("cannot match a zero response")
    return np.conj(a) / n


def mrt_mrc(gu_resp, sat_resp) -> tuple[np.ndarray, np.ndarray]:
    """Maximum-ratio combining at the GU and transmission at the satellite.

    Returns ``(w_g, w_s)``.
    """
    return _matched(gu_resp), _matched(sat_resp)


def scenario2_receive_beam(h_g_stack) -> np.ndarray:
    """Unit-norm GU beam matched to the combined direct + reflected receive vector."""
    return _matched(h_g_stack)


def scenario2_common_phase(sat_gu_arrival_resp, irs_gu_arrival_resp, eps_sg: complex) -> float:
    """Common IRS phase that adds the reflected path coherently to the direct one."""
    inner = np.vdot(sat_gu_arrival_resp, irs_gu_arrival_resp)
    if abs(inner) < 1e-300:
        return 0.0
    return wrap_angle(np.angle(eps_sg) - np.angle(inner))


def scenario2_transmit_beam(h_s_stack, weights=None) -> np.ndarray:
    """Dominant right-singular vector of the stacked satellite responses.

    ``h_s_stack`` has one row per path (direct, via IRS). Rows are used
    unweighted unless ``weights`` gives per-row amplitudes.
    """
    h = np.atleast_2d(np.asarray(h_s_stack, dtype=complex))
    if weights is not None:
        h = np.asarray(weights, dtype=float)[:, None] * h
    if not np.any(h):
        raise ValueError("stacked satellite channel is zero")
    try:
        _, _, vh = np.linalg.svd(h)
    except np.linalg.LinAlgError as exc:
        raise ValueError("SVD of the stacked satellite channel failed") from exc
    # right-singular vectors of H are rows of V^H, conjugated
    return np.conj(vh[0])


def beam_misalignment(sat_to_gu_resp, sat_to_irs_resp) -> float:
    """``1 - |cos|`` of the angle between the two satellite responses."""
    a, b = np.asarray(sat_to_gu_resp), np.asarray(sat_to_irs_resp)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("responses must be non-zero")
    return float(np.clip(1.0 - abs(np.vdot(a, b)) / (na * nb), 0.0, 1.0))


def isotropic_beam(n: int) -> np.ndarray:
    """Uniform zero-phase unit-norm beam (no beamforming gain towards any direction)."""
    if n < 1:
        raise ValueError("beam length must be at least 1")
    return np.full(n, 1.0 / np.sqrt(n), dtype=complex)


def bilinear_objective(h, w_g, w_s) -> float:
    """``|w_g^T H w_s|^2``."""
    return float(abs(np.asarray(w_g) @ np.asarray(h) @ np.asarray(w_s)) ** 2)
