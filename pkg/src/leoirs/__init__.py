"""Mechanically tilted IRS for LEO satellite MIMO downlinks.

Channel model, closed-form joint tilt / phase / beam design, and SNR sweeps.
"""
from .arrays import UpaConfig, tilted_irs_response, upa_response
from .beamform import BeamformingSolution, InfeasibleGeometryError
from .channel import LinkGeometry, RadiationParams, SystemParams
from .config import ConfigError, parse_config
from .estimator import METHODS, JointTiltBeamformer, make_method
from .geo import DirectionAngles, GeodeticPoint, LocalFrame, OrbitModel
from .sim import SimulationConfig, run_lv_sweep, run_m_sweep, run_time_sweep

__version__ = "0.1.0"

__all__ = [
    "BeamformingSolution", "ConfigError", "DirectionAngles", "GeodeticPoint",
    "InfeasibleGeometryError", "JointTiltBeamformer", "LinkGeometry", "LocalFrame",
    "METHODS", "OrbitModel", "RadiationParams", "SimulationConfig", "SystemParams",
    "UpaConfig", "make_method", "parse_config", "run_lv_sweep", "run_m_sweep",
    "run_time_sweep", "tilted_irs_response", "upa_response",
]
