"""Estimator-style wrapper around the joint tilt / phase / beam design.

``fit`` takes one :class:`~leoirs.channel.LinkGeometry` snapshot and stores the
design; ``transform`` returns the composite channel that design produces on a
snapshot and ``predict`` the received SNR. Baseline designs are the same
estimator with different parameters, so ``sklearn.base.clone`` plus
``set_params`` is all a sweep needs.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import beamform as bf
from .arrays import tilt_feasibility
from .channel import (
    LinkGeometry,
    cascade_channels,
    composite_scenario1,
    composite_scenario2,
    db_to_linear,
    geometry_direct_channel,
    linear_to_db,
)
from .validation import check_geometry, check_option, check_system

TILT_OPTIONS = {"optimal", "2d", "zero"}
BEAM_OPTIONS = {"optimal", "isotropic"}


def snr_db(gain: float, power_dbw: float, noise_dbw: float) -> float:
    """Received SNR for a channel power gain ``|w_g^T H w_s|^2``."""
    return float(power_dbw - noise_dbw + linear_to_db(gain))


class JointTiltBeamformer(BaseEstimator):
    """Joint mechanical tilt, IRS phase shifts and transceiver beams.

    Parameters
    ----------
    system : SystemParams, optional
        Arrays, radiation model and wavelength. Built-in defaults if omitted.
    tilt : {"optimal", "2d", "zero"} or float
        IRS tilt rule. ``"2d"`` is the elevation-only tilt; a number fixes the
        tilt in radians.
    beamforming : {"optimal", "isotropic"}
        Transceiver beams. ``"isotropic"`` uses uniform zero-phase beams at
        both ends.
    use_irs : bool
        If False only the direct link exists (zero channel without one).
    weighted_transmit : bool
        Weight the stacked satellite responses by their path amplitudes before
        taking the dominant singular vector (direct-link snapshots only).
    power_dbw, noise_dbw : float
        Transmit power and noise power.

    Attributes
    ----------
    solution_ : BeamformingSolution
    eta_, rho_ : float
    feasibility_ : TiltFeasibility
    gain_ : EffectiveGain or None
    channel_ : ndarray
        Composite channel of the fitted snapshot.
    objective_ : float
        ``|w_G^T H w_S|^2`` on the fitted snapshot.
    breakdown_ : ObjectiveBreakdown
    scenario_ : {"I", "II"}
    snr_db_ : float
    """

    def __init__(self, system=None, tilt="optimal", beamforming="optimal", use_irs=True,
                 weighted_transmit=False, power_dbw=15.0, noise_dbw=-120.0):
        self.system = system
        self.tilt = tilt
        self.beamforming = beamforming
        self.use_irs = use_irs
        self.weighted_transmit = weighted_transmit
        self.power_dbw = power_dbw
        self.noise_dbw = noise_dbw

    def _choose_tilt(self, X: LinkGeometry, feas) -> float:
        if self.tilt == "optimal":
            return bf.optimal_tilt(feas)
        if self.tilt == "2d":
            return bf.tilt_2d_baseline(X.irs_from_sat, X.irs_to_gu)
        if self.tilt == "zero":
            return 0.0
        return float(self.tilt)

    def fit(self, X, y=None):
        X = check_geometry(X)
        system = check_system(self.system)
        check_option("tilt", self.tilt, TILT_OPTIONS)
        check_option("beamforming", self.beamforming, BEAM_OPTIONS)
        n_s, n_g = system.sat_array.size, system.gu_array.size
        self.feasibility_ = tilt_feasibility(X.irs_from_sat, X.irs_to_gu)
        self.scenario_ = "II" if X.direct else "I"

        if not self.use_irs:
            self._fit_direct_only(X, system)
        else:
            eta = self._choose_tilt(X, self.feasibility_)
            h_si, h_ig, gain = cascade_channels(X, eta, system)
            self.gain_ = gain
            if X.direct:
                h_sg = geometry_direct_channel(X, system)
                rho = bf.scenario2_common_phase(h_sg.rx_response, h_ig.rx_response,
                                                h_sg.propagation_phase)
            else:
                h_sg, rho = None, 0.0
            theta = bf.optimal_phase_shifts(h_ig.tx_response, h_si.rx_response,
                                            h_ig.propagation_phase, h_si.propagation_phase, rho)
            cascade = composite_scenario1(h_ig, theta, h_si)
            m = system.irs_array.size
            h_g = h_s = None
            if h_sg is None:
                self.channel_ = cascade
                w_g, w_s = bf.mrt_mrc(h_ig.rx_response, h_si.tx_response)
            else:
                self.channel_ = composite_scenario2(h_sg, cascade)
                h_g = (h_sg.amplitude_gain * h_sg.propagation_phase * h_sg.rx_response
                       + gain.beta_eff * m * np.exp(1j * rho) * h_ig.rx_response)
                h_s = np.vstack([h_sg.tx_response, h_si.tx_response])
                weights = [h_sg.amplitude_gain, gain.beta_eff * m] if self.weighted_transmit else None
                w_g = (bf.scenario2_receive_beam(h_g) if np.any(h_g)
                       else bf.mrt_mrc(h_ig.rx_response, h_si.tx_response)[0])
                if weights is not None and not np.any(weights):
                    weights = None
                w_s = bf.scenario2_transmit_beam(h_s, weights)
            if self.beamforming == "isotropic":
                w_g, w_s = bf.isotropic_beam(n_g), bf.isotropic_beam(n_s)
            self.solution_ = bf.BeamformingSolution(w_s, w_g, theta, eta, rho)
            self.breakdown_ = self._breakdown(h_si, h_ig, theta, w_g, w_s, h_g, h_s)

        self.eta_ = self.solution_.eta
        self.rho_ = self.solution_.rho
        self.objective_ = bf.bilinear_objective(self.channel_, self.solution_.w_g, self.solution_.w_s)
        self.snr_db_ = snr_db(self.objective_, self.power_dbw, self.noise_dbw)
        return self

    def _fit_direct_only(self, X, system):
        n_s, n_g = system.sat_array.size, system.gu_array.size
        self.gain_ = None
        if X.direct:
            h_sg = geometry_direct_channel(X, system)
            self.channel_ = h_sg.matrix
            w_g, w_s = bf.mrt_mrc(h_sg.rx_response, h_sg.tx_response)
        else:
            self.channel_ = np.zeros((n_g, n_s), dtype=complex)
            w_g, w_s = bf.isotropic_beam(n_g), bf.isotropic_beam(n_s)
        if self.beamforming == "isotropic":
            w_g, w_s = bf.isotropic_beam(n_g), bf.isotropic_beam(n_s)
        self.solution_ = bf.BeamformingSolution(w_s, w_g, None, float("nan"), 0.0)
        self.breakdown_ = bf.ObjectiveBreakdown()

    @staticmethod
    def _breakdown(h_si, h_ig, theta, w_g, w_s, h_g=None, h_s=None) -> bf.ObjectiveBreakdown:
        parts = dict(
            h_g=abs(w_g @ h_ig.rx_response) ** 2,
            h_s=abs(h_si.tx_response @ w_s) ** 2,
            h_i=abs(h_ig.propagation_phase * h_si.propagation_phase
                    * (h_ig.tx_response * theta) @ h_si.rx_response) ** 2,
        )
        if h_g is not None:
            parts.update(g_g=abs(w_g @ h_g) ** 2, g_s=np.linalg.norm(h_s @ w_s) ** 2)
        return bf.ObjectiveBreakdown(**{k: float(v) for k, v in parts.items()})

    def transform(self, X):
        """Composite channel the fitted design sees on snapshot ``X``."""
        check_is_fitted(self, "solution_")
        X = check_geometry(X)
        system = check_system(self.system)
        if not self.use_irs:
            if X.direct:
                return geometry_direct_channel(X, system).matrix
            return np.zeros((system.gu_array.size, system.sat_array.size), dtype=complex)
        h_si, h_ig, _ = cascade_channels(X, self.solution_.eta, system)
        h = composite_scenario1(h_ig, self.solution_.theta, h_si)
        if X.direct:
            h = composite_scenario2(geometry_direct_channel(X, system), h)
        return h

    def predict(self, X):
        """Received SNR (dB) of the fitted design on snapshot ``X``."""
        h = self.transform(X)
        return snr_db(bf.bilinear_objective(h, self.solution_.w_g, self.solution_.w_s),
                      self.power_dbw, self.noise_dbw)

    def fit_predict(self, X, y=None):
        return self.fit(X).snr_db_

    def closed_form_snr_db(self) -> float:
        """Scenario-I SNR implied by the effective gain alone."""
        check_is_fitted(self, "solution_")
        system = check_system(self.system)
        gain = (self.gain_.beta_eff ** 2 * system.irs_array.size ** 2
                * system.gu_array.size * system.sat_array.size)
        return snr_db(gain, self.power_dbw, self.noise_dbw)


METHODS = {
    "proposed": {},
    "2d-tilt": {"tilt": "2d"},
    "no-tilt": {"tilt": "zero"},
    "isotropic": {"beamforming": "isotropic"},
    "no-irs": {"use_irs": False},
}


def make_method(name: str, system=None, power_dbw=15.0, noise_dbw=-120.0) -> JointTiltBeamformer:
    """Estimator configured as one of the named designs in ``METHODS``."""
    try:
        overrides = METHODS[name]
    except KeyError:
        raise ValueError(f"unknown method {name!r}; choose from {list(METHODS)}") from None
    est = JointTiltBeamformer(system=system, power_dbw=power_dbw, noise_dbw=noise_dbw)
    return est.set_params(**overrides)


__all__ = ["JointTiltBeamformer", "METHODS", "make_method", "snr_db", "db_to_linear"]
