"""Input checks shared by the estimator and the config loader."""
from __future__ import annotations

import numbers

import numpy as np

from .channel import LinkGeometry, SystemParams


def check_geometry(X) -> LinkGeometry:
    if not isinstance(X, LinkGeometry):
        raise TypeError(f"expected a LinkGeometry, got {type(X).__name__}")
    for name in ("d_si", "d_ig", "d_sg"):
        d = getattr(X, name)
        if not (np.isfinite(d) and d > 0):
            raise ValueError(f"{name} must be a positive finite distance, got {d!r}")
    return X


def check_system(system) -> SystemParams:
    if system is None:
        return SystemParams()
    if not isinstance(system, SystemParams):
        raise TypeError(f"expected SystemParams, got {type(system).__name__}")
    return system


def check_option(name: str, value, options) -> None:
    if isinstance(value, str):
        if value not in options:
            raise ValueError(f"{name} must be one of {sorted(options)}, got {value!r}")
    elif not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise ValueError(f"{name} must be one of {sorted(options)} or a finite number, got {value!r}")


def check_positive(name: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ValueError(f"{name} must be a number, got {value!r}")
    if not (np.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be positive, got {value!r}")
    return float(value)


def check_unit_norm(w, atol: float = 1e-12) -> np.ndarray:
    w = np.asarray(w)
    if abs(np.linalg.norm(w) - 1.0) > atol:
        raise ValueError("beam is not unit-norm")
    return w


def check_unit_modulus(theta, atol: float = 1e-12) -> np.ndarray:
    theta = np.asarray(theta)
    if np.any(np.abs(np.abs(theta) - 1.0) > atol):
        raise ValueError("IRS phase shifts must have unit modulus")
    return theta
