"""Default numerical tolerances.

All defaults are multiplied by the ``UNCBENCH_TOL_SCALE`` environment variable
(default 1.0). Per-call overrides replace the default before scaling.
"""
import os

from .errors import InputError

TOL_ENV = "UNCBENCH_TOL_SCALE"

DEFAULTS = {
    "hermitian": 1e-10,     # relative Hermiticity defect accepted by make_hermitian
    "norm": 1e-12,          # |norm - 1| accepted for states and spinors
    "clamp": 1e-12,         # negative-variance clamp window
    "saturation": 1e-9,     # |margin| / magnitude for the saturated flag
    "degenerate_f": 1e-12,  # <C^2> below this * scale is treated as zero
    "leakage": 1e-10,       # top-two-level weight allowed for coherent states
    "certificate": 1e-10,   # re-evaluation agreement for violation certificates
}


def tol_scale():
    raw = os.environ.get(TOL_ENV)
    if raw is None or raw.strip() == "":
        return 1.0
    try:
        value = float(raw)
    except ValueError:
        raise InputError(f"{TOL_ENV} must be a float, got {raw!r}") from None
    if not value > 0 or value == float("inf"):
        raise InputError(f"{TOL_ENV} must be positive and finite, got {raw!r}")
    return value


def check_overrides(overrides):
    """Validate a tolerance-override mapping; returns a plain dict."""
    out = {}
    for key, value in (overrides or {}).items():
        if key not in DEFAULTS:
            raise InputError(f"unknown tolerance {key!r}")
        value = float(value)
        if not value >= 0 or value == float("inf"):
            raise InputError(f"tolerance {key!r} must be a non-negative finite number")
        out[key] = value
    return out


def tol(name, overrides=None):
    if overrides and name in overrides:
        base = float(overrides[name])
    else:
        base = DEFAULTS[name]
    return base * tol_scale()
