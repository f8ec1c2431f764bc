"""Auxiliary functions and state kinetics of the Mott memristor model.

The single state variable ``x`` is the volumetric fraction of metallic
phase in the conduction channel, restricted to the open interval (0, 1).
Three auxiliary functions define the model:

    memristance          R(x)  = 1 / (A (1 + B x^2))
    thermal power        P(x)  = -C / ln x          (outflow at temperature
                                                     clamp, in watts)
    enthalpy derivative  H'(x) = D [ (1 - x^2 + 2 x^2 ln x)
                                     / (2 x ln^2 x) + E x ]

and the state kinetics follow from the first law of thermodynamics:

    dx/dt = f(x, i) = (i^2 R(x) - P(x)) / H'(x)

Current-driven and voltage-driven forms are provided; both are evaluated
in a factored form that is stable for x spanning hundreds of decades.
All functions accept scalars or numpy arrays and are pure.
"""

from __future__ import annotations

import numpy as np

from .device import ModelCoefficients, DeviceParams
from .errors import StateDomainError

# Below this distance from x = 1 the rational term of H'(x) is evaluated
# by its series expansion (0/0 form at the endpoint).
SERIES_SWITCH = 1e-6

# Generic evaluation domain.  Grids that must reach deeper (the steady-state
# machinery probes x down to ~1e-280) stay in float64 without underflow; the
# clamp below is the recommended band for dense scans.
X_CLAMP_LO = 1e-12
X_CLAMP_HI = 1.0 - 1e-12


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x <= 0.0) or np.any(x >= 1.0):
        raise StateDomainError(
            "state fraction x must lie in the open interval (0, 1)")
    return x


def _check_finite(value, name):
    if np.any(~np.isfinite(np.asarray(value, dtype=float))):
        raise StateDomainError(f"{name} must be finite")


def _cancellation_core(x, lx):
    """1 - x^2 + 2 x^2 ln x, safe against cancellation near x = 1.

    For x > 0.5 the expression is rearranged around u = 1 - x (exact in
    floating point there) so that the leading 2u^2 behaviour survives;
    the plain form loses all significant digits for u below ~1e-5.
    """
    x = np.asarray(x, dtype=float)
    plain = 1.0 - x * x + 2.0 * x * x * lx
    u = 1.0 - x
    with np.errstate(invalid="ignore", divide="ignore"):
        lu = np.log1p(-u)
        s = u + lu  # -u^2/2 - u^3/3 - ..., computed without cancellation
        near = 2.0 * s - u * u - 4.0 * u * lu + 2.0 * u * u * lu
    return np.where(x > 0.5, near, plain)


def _bracket_poly(x, lx, E):
    """1 - x^2 + 2 x^2 ln x + 2 E (x ln x)^2 (denominator of the kinetics)."""
    xlx = x * lx
    return _cancellation_core(x, lx) + 2.0 * E * xlx * xlx


def memristance(x, c: ModelCoefficients):
    """Channel resistance R(x) = 1/(A (1 + B x^2)) in ohms.

    Strictly decreasing in x for B > 0; constant 1/A when B = 0.
    """
    x = _check_x(x)
    return 1.0 / (c.A * (1.0 + c.B * x * x))


def thermal_power(x, c: ModelCoefficients):
    """Heat outflow -C/ln x in watts; positive and increasing on (0, 1)."""
    x = _check_x(x)
    return -c.C / np.log(x)


def enthalpy_derivative(x, c: ModelCoefficients):
    """Derivative of total enthalpy change with respect to x, in joules.

    Positive on the whole open interval.  Near x = 1 the rational term is
    a 0/0 form with limit 1; it is evaluated there by its series
    1 - (1-x)/3 + O((1-x)^3).
    """
    x = _check_x(x)
    lx = np.log(x)
    u = 1.0 - x
    with np.errstate(divide="ignore", invalid="ignore"):
        rational = _cancellation_core(x, lx) / (2.0 * x * lx * lx)
    series = 1.0 - u / 3.0
    rational = np.where(u < SERIES_SWITCH, series, rational)
    return c.D * (rational + c.E * x)


def kinetic_current(x, i, c: ModelCoefficients):
    """State rate dx/dt (1/s) for a constant drive current ``i`` (A).

    Even in the current (Joule heating enters as i^2).  Negative for all
    x when i = 0: the metallic phase is volatile without power.
    """
    x = _check_x(x)
    _check_finite(i, "current")
    i = np.asarray(i, dtype=float)
    lx = np.log(x)
    num = 2.0 * x * lx * lx * i * i / (c.A * (1.0 + c.B * x * x)) \
        + 2.0 * c.C * x * lx
    return num / (c.D * _bracket_poly(x, lx, c.E))


def kinetic_voltage(x, v, c: ModelCoefficients):
    """State rate dx/dt (1/s) for a constant drive voltage ``v`` (V)."""
    x = _check_x(x)
    _check_finite(v, "voltage")
    v = np.asarray(v, dtype=float)
    lx = np.log(x)
    num = 2.0 * c.A * x * lx * lx * (1.0 + c.B * x * x) * v * v \
        + 2.0 * c.C * x * lx
    return num / (c.D * _bracket_poly(x, lx, c.E))


def temperature_profile(r, x, p: DeviceParams):
    """Radial temperature T(r) across the insulating shell, in kelvin.

    Defined for radii between the metallic core (x * r_ch) and the channel
    wall (r_ch); clamped to [T0, Tc] against rounding at the endpoints.
    """
    x = _check_x(x)
    r = np.asarray(r, dtype=float)
    lo = x * p.r_ch
    if np.any(r < lo * (1.0 - 1e-12)) or np.any(r > p.r_ch * (1.0 + 1e-12)):
        raise StateDomainError(
            "radius must lie within the insulating shell "
            f"[{float(np.min(lo)):.4g}, {p.r_ch:.4g}] m")
    t = p.T0 + p.dT * np.log(r / p.r_ch) / np.log(x)
    return np.clip(t, p.T0, p.T0 + p.dT)
