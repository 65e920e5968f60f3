"""Line-of-sight hop channels, the cascaded IRS gain and the composite channels."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geo
from .arrays import (
    DEPARTURE,
    INCIDENT,
    UpaConfig,
    modified_elevation,
    tilted_irs_response,
    upa_response,
)
from .geo import DirectionAngles


def db_to_linear(db: float) -> float:
    """Power ratio for a value in dB."""
    return 10.0 ** (db / 10.0)


def linear_to_db(x):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(x)


@dataclass(frozen=True)
class RadiationParams:
    """Directional coefficients and linear antenna gains.

    ``k`` shapes both IRS-side patterns; ``k_t``/``k_r`` the satellite and GU
    patterns on the direct link.
    """

    k: float = 2.0
    k_t: float = 1.0
    k_r: float = 1.0
    gain_gu: float = db_to_linear(4.0)
    gain_sat: float = db_to_linear(4.0)
    gain_irs: float = db_to_linear(6.0)

    def __post_init__(self):
        if min(self.k, self.k_t, self.k_r) < 0:
            raise ValueError("directional coefficients must be non-negative")
        if min(self.gain_gu, self.gain_sat, self.gain_irs) <= 0:
            raise ValueError("antenna gains must be positive")


@dataclass(frozen=True)
class SystemParams:
    """Array geometry, radiation model and carrier wavelength of the link."""

    sat_array: UpaConfig = UpaConfig(15, 15, 0.25, 0.25)
    gu_array: UpaConfig = UpaConfig(15, 15, 0.25, 0.25)
    irs_array: UpaConfig = UpaConfig(20, 20, 0.25, 0.25)
    radiation: RadiationParams = field(default_factory=RadiationParams)
    wavelength: float = 2.0

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")

    @property
    def wavenumber(self) -> float:
        return 2.0 * np.pi / self.wavelength


@dataclass(frozen=True)
class LinkChannel:
    """One LoS hop: ``matrix = amplitude_gain * propagation_phase * a_rx a_tx^T``."""

    matrix: np.ndarray
    amplitude_gain: float
    propagation_phase: complex
    hop_distance: float
    rx_response: np.ndarray
    tx_response: np.ndarray


@dataclass(frozen=True)
class EffectiveGain:
    delta: float
    pattern: float
    beta_eff: float


@dataclass(frozen=True)
class LinkGeometry:
    """Angles and distances of one satellite/IRS/GU snapshot.

    Every angle pair is expressed in the array frame of the node named first:
    ``sat_to_irs`` is the satellite's AoD towards the IRS, ``irs_from_sat``
    the IRS's (untilted) AoA of the satellite, and so on.
    """

    sat_to_irs: DirectionAngles
    irs_from_sat: DirectionAngles
    irs_to_gu: DirectionAngles
    gu_from_irs: DirectionAngles
    sat_to_gu: DirectionAngles
    gu_from_sat: DirectionAngles
    d_si: float
    d_ig: float
    d_sg: float
    direct: bool = False

    @classmethod
    def observe(cls, sat_frame: geo.LocalFrame, irs_frame: geo.LocalFrame,
                gu_frame: geo.LocalFrame, direct: bool = False) -> "LinkGeometry":
        s, i, g = sat_frame.origin, irs_frame.origin, gu_frame.origin
        return cls(
            sat_to_irs=geo.direction_angles(sat_frame, i),
            irs_from_sat=geo.direction_angles(irs_frame, s),
            irs_to_gu=geo.direction_angles(irs_frame, g),
            gu_from_irs=geo.direction_angles(gu_frame, i),
            sat_to_gu=geo.direction_angles(sat_frame, g),
            gu_from_sat=geo.direction_angles(gu_frame, s),
            d_si=geo.distance(s, i),
            d_ig=geo.distance(i, g),
            d_sg=geo.distance(s, g),
            direct=direct,
        )


def _front_sin(elevation: float) -> float:
    # elements do not radiate behind their own plane
    return max(float(np.sin(elevation)), 0.0)


def propagation_phase(distance: float, wavelength: float) -> complex:
    return complex(np.exp(-1j * 2.0 * np.pi / wavelength * distance))


def radiation_pattern(irs_incident: DirectionAngles, irs_departure: DirectionAngles,
                      eta: float, k: float) -> float:
    """Power pattern of the satellite-IRS-GU link for tilt ``eta``."""
    up = _front_sin(modified_elevation(irs_incident, eta, INCIDENT))
    down = _front_sin(modified_elevation(irs_departure, eta, DEPARTURE))
    return float(up**k * down**k)


def effective_gain(irs_incident: DirectionAngles, irs_departure: DirectionAngles, eta: float,
                   d_si: float, d_ig: float, params: RadiationParams, irs_cfg: UpaConfig,
                   wavelength: float) -> EffectiveGain:
    if d_si <= 0 or d_ig <= 0:
        raise ValueError("hop distances must be positive")
    num = params.gain_gu * params.gain_sat * params.gain_irs * irs_cfg.d_x * irs_cfg.d_y * wavelength**2
    delta = float(np.sqrt(num) / np.sqrt(64.0 * np.pi**3 * (d_si * d_ig) ** 2))
    pattern = radiation_pattern(irs_incident, irs_departure, eta, params.k)
    return EffectiveGain(delta, pattern, delta * float(np.sqrt(pattern)))


def _hop(rx, tx, gain, distance, wavelength) -> LinkChannel:
    if distance <= 0:
        raise ValueError("hop distance must be positive")
    eps = propagation_phase(distance, wavelength)
    return LinkChannel(gain * eps * np.outer(rx, tx), float(gain), eps, float(distance), rx, tx)


def sat_irs_channel(sat_aod: DirectionAngles, irs_aoa: DirectionAngles, eta: float,
                    distance: float, sat_cfg: UpaConfig, irs_cfg: UpaConfig,
                    wavelength: float, amplitude_gain: float) -> LinkChannel:
    """Satellite-to-IRS hop (``M x N_S``) with the IRS tilted by ``eta``."""
    k_w = 2.0 * np.pi / wavelength
    rx = tilted_irs_response(irs_aoa, eta, irs_cfg, k_w, INCIDENT)
    tx = upa_response(sat_aod, sat_cfg, k_w)
    return _hop(rx, tx, amplitude_gain, distance, wavelength)


def irs_gu_channel(irs_aod: DirectionAngles, gu_aoa: DirectionAngles, eta: float,
                   distance: float, irs_cfg: UpaConfig, gu_cfg: UpaConfig,
                   wavelength: float, amplitude_gain: float = 1.0) -> LinkChannel:
    """IRS-to-GU hop (``N_G x M``) with the IRS tilted by ``eta``."""
    k_w = 2.0 * np.pi / wavelength
    rx = upa_response(gu_aoa, gu_cfg, k_w)
    tx = tilted_irs_response(irs_aod, eta, irs_cfg, k_w, DEPARTURE)
    return _hop(rx, tx, amplitude_gain, distance, wavelength)


def direct_gain(sat_aod: DirectionAngles, gu_aoa: DirectionAngles, distance: float,
                params: RadiationParams, wavelength: float) -> float:
    amp = np.sqrt(params.gain_gu * params.gain_sat * wavelength**2)
    pattern = _front_sin(sat_aod.elevation) ** (params.k_t / 2) * _front_sin(gu_aoa.elevation) ** (params.k_r / 2)
    return float(amp * pattern / (4.0 * np.pi * distance))


def direct_channel(sat_aod: DirectionAngles, gu_aoa: DirectionAngles, distance: float,
                   sat_cfg: UpaConfig, gu_cfg: UpaConfig, params: RadiationParams,
                   wavelength: float) -> LinkChannel:
    """Direct satellite-to-GU hop (``N_G x N_S``)."""
    if distance <= 0:
        raise ValueError("hop distance must be positive")
    k_w = 2.0 * np.pi / wavelength
    beta = direct_gain(sat_aod, gu_aoa, distance, params, wavelength)
    return _hop(upa_response(gu_aoa, gu_cfg, k_w), upa_response(sat_aod, sat_cfg, k_w),
                beta, distance, wavelength)


def cascade_channels(geometry: LinkGeometry, eta: float, system: SystemParams
                     ) -> tuple[LinkChannel, LinkChannel, EffectiveGain]:
    """Both IRS hops for tilt ``eta``.

    Only the product of the two hop amplitudes is defined, so the whole
    cascaded amplitude is carried by the satellite-IRS hop and the IRS-GU hop
    has unit amplitude.
    """
    g = effective_gain(geometry.irs_from_sat, geometry.irs_to_gu, eta, geometry.d_si,
                       geometry.d_ig, system.radiation, system.irs_array, system.wavelength)
    h_si = sat_irs_channel(geometry.sat_to_irs, geometry.irs_from_sat, eta, geometry.d_si,
                           system.sat_array, system.irs_array, system.wavelength, g.beta_eff)
    h_ig = irs_gu_channel(geometry.irs_to_gu, geometry.gu_from_irs, eta, geometry.d_ig,
                          system.irs_array, system.gu_array, system.wavelength, 1.0)
    return h_si, h_ig, g


def geometry_direct_channel(geometry: LinkGeometry, system: SystemParams) -> LinkChannel:
    return direct_channel(geometry.sat_to_gu, geometry.gu_from_sat, geometry.d_sg,
                          system.sat_array, system.gu_array, system.radiation, system.wavelength)


def _matrix(h) -> np.ndarray:
    return h.matrix if isinstance(h, LinkChannel) else np.asarray(h)


def composite_scenario1(h_ig, theta, h_si) -> np.ndarray:
    """Cascaded channel ``H_IG diag(theta) H_SI``; ``theta`` is the IRS diagonal."""
    a, b = _matrix(h_ig), _matrix(h_si)
    theta = np.asarray(theta)
    if theta.ndim == 2:
        theta = np.diag(theta)
    if a.shape[1] != theta.size or theta.size != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} x diag({theta.size}) x {b.shape}")
    return (a * theta) @ b


def composite_scenario2(h_sg, scenario1) -> np.ndarray:
    """Direct plus cascaded channel."""
    a, b = _matrix(h_sg), np.asarray(scenario1)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a + b
