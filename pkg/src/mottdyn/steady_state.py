"""DC fixed-point loci of the isolated memristor and their bifurcations.

A fixed point at constant current satisfies i^2 R(x) = P(x); solving for
the current gives the closed form

    i_Q(x_Q) = sqrt(-C A (1 + B x_Q^2) / ln x_Q)

which parameterizes the whole steady-state locus by x_Q.  The voltage
locus v_Q(x_Q) has a sharp peak and a rounded trough whose x-coordinates
depend only on B, hence are device-size independent; the corresponding
currents are the two critical currents bounding the NDR region.

Deep locus tail: i_Q -> 0 requires ln x_Q -> -C A / i_Q^2, far below the
smallest positive float for sub-microamp currents.  Fixed points therefore
carry ``log_x`` alongside ``x_q``; ``x_q`` may underflow to exactly 0.0
while ``log_x`` remains exact, and the small-signal layer evaluates from
``log_x`` (all limits of the model are reproduced by x = 0, ln x finite).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import exp, log, sqrt

import numpy as np

from .device import ModelCoefficients
from .errors import ResolutionError, SolverError, StateDomainError
from .model import X_CLAMP_HI, X_CLAMP_LO, _check_x, kinetic_voltage
from .numerics import bisect, golden_max, golden_min, refine_roots, \
    split_log_grid

# Deepest representable state: exp(u) stays a positive subnormal above this.
LOG_X_FLOOR = -740.0


@dataclass(frozen=True)
class FixedPoint1D:
    """One DC operating point of the isolated memristor."""

    x_q: float
    i_q: float
    v_q: float
    r_q: float
    log_x: float

    @property
    def coordinates(self) -> tuple[float, float, float]:
        return (self.x_q, self.i_q, self.v_q)


@dataclass
class DcLocus:
    """Steady-state locus sampled on an increasing x grid."""

    x_q: np.ndarray
    i_q: np.ndarray
    v_q: np.ndarray
    r_q: np.ndarray
    coeffs: ModelCoefficients
    i_c1: float | None = None
    i_c2: float | None = None

    def __len__(self) -> int:
        return len(self.x_q)

    def point(self, k: int) -> FixedPoint1D:
        return FixedPoint1D(float(self.x_q[k]), float(self.i_q[k]),
                            float(self.v_q[k]), float(self.r_q[k]),
                            log(self.x_q[k]))


@dataclass(frozen=True)
class SaddleNodeResult:
    """Tangency of the voltage-driven dynamic route with the x axis."""

    v_star: float
    roots_below: int
    roots_at: int
    roots_above: int
    root_pairs: list[tuple[float, str]] = field(default_factory=list)


def _current_from_logx(u, c: ModelCoefficients):
    """i_Q from ln(x_Q); valid for any finite u < 0 (x may underflow)."""
    x = np.exp(u)
    return np.sqrt(-c.C * c.A * (1.0 + c.B * x * x) / u)


def dc_current_at_state(x_q, c: ModelCoefficients):
    """Steady-state current (A) sustaining the metallic fraction x_q."""
    x_q = _check_x(x_q)
    return _current_from_logx(np.log(x_q), c)


def dc_voltage_at_state(x_q, c: ModelCoefficients):
    """Steady-state voltage (V) across the device at x_q."""
    x_q = _check_x(x_q)
    lx = np.log(x_q)
    return np.sqrt(-c.C / (c.A * (1.0 + c.B * x_q * x_q) * lx))


def fixed_point_at_state(x_q: float, c: ModelCoefficients) -> FixedPoint1D:
    """Construct the full operating point for a given state fraction."""
    x_q = float(_check_x(x_q))
    u = log(x_q)
    i = float(_current_from_logx(u, c))
    r = 1.0 / (c.A * (1.0 + c.B * x_q * x_q))
    return FixedPoint1D(x_q, i, r * i, r, u)


def state_at_current(i_q: float, c: ModelCoefficients) -> FixedPoint1D:
    """Invert the locus: the unique operating point carrying current i_q.

    i_Q(x) is strictly increasing, so the inverse is solved by bisection
    in u = ln x.  Currents whose state underflows float64 fall back to the
    exact deep-tail form ln x = -C A / i^2 (the B x^2 term is then zero to
    machine precision).
    """
    if not (np.isfinite(i_q) and i_q > 0.0):
        raise SolverError("current must be finite and positive")
    u_hi = log(1.0 - 1e-12)
    if i_q >= float(_current_from_logx(LOG_X_FLOOR, c)):
        u = bisect(lambda t: float(_current_from_logx(t, c)) - i_q,
                   LOG_X_FLOOR, u_hi, rtol=1e-15)
    else:
        u = -c.C * c.A / (i_q * i_q)
    x = exp(u)  # may underflow to 0.0 for deep-tail points
    r = 1.0 / (c.A * (1.0 + c.B * x * x))
    return FixedPoint1D(x, i_q, r * i_q, r, u)


def dc_locus(c: ModelCoefficients,
             x_grid: np.ndarray | None = None) -> DcLocus:
    """Sample the steady-state locus on ``x_grid`` (default split log grid,
    4000 points on (1e-6, 1-1e-6))."""
    if x_grid is None:
        x_grid = split_log_grid(1e-6, 1.0 - 1e-6, 4000)
    x = np.asarray(x_grid, dtype=float)
    if len(x) < 100:
        raise ResolutionError("locus grid needs at least 100 points")
    if np.any(np.diff(x) <= 0.0):
        raise StateDomainError("locus grid must be strictly increasing")
    _check_x(x)
    i = dc_current_at_state(x, c)
    r = 1.0 / (c.A * (1.0 + c.B * x * x))
    return DcLocus(x, i, r * i, r, c)


def critical_currents(locus: DcLocus) -> tuple[float, float]:
    """Currents at the local max / min of v_Q along the locus.

    The extrema are refined by golden-section on the closed-form v_Q(x)
    inside their bracketing grid intervals.
    """
    c = locus.coeffs
    v = locus.v_q
    interior = np.arange(1, len(v) - 1)
    is_max = (v[interior] > v[interior - 1]) & (v[interior] > v[interior + 1])
    is_min = (v[interior] < v[interior - 1]) & (v[interior] < v[interior + 1])
    if not (np.any(is_max) and np.any(is_min)):
        raise ResolutionError(
            "locus grid does not bracket both voltage extrema")
    k_max = int(interior[is_max][0])
    k_min = int(interior[is_min][np.argmin(v[interior[is_min]])])

    def v_of(xq: float) -> float:
        return float(dc_voltage_at_state(xq, c))

    x_pk, _ = golden_max(v_of, locus.x_q[k_max - 1], locus.x_q[k_max + 1],
                         rtol=1e-12)
    x_tr, _ = golden_min(v_of, locus.x_q[k_min - 1], locus.x_q[k_min + 1],
                         rtol=1e-12)
    i_c1 = float(dc_current_at_state(x_pk, c))
    i_c2 = float(dc_current_at_state(x_tr, c))
    locus.i_c1, locus.i_c2 = i_c1, i_c2
    return i_c1, i_c2


def voltage_extrema_states(c: ModelCoefficients) -> tuple[float, float]:
    """x-coordinates of the v_Q(x_Q) peak and trough (size independent)."""
    locus = dc_locus(c)
    critical_currents(locus)

    def v_of(xq: float) -> float:
        return float(dc_voltage_at_state(xq, c))

    # Recover the refined x positions from the refined currents.
    x_pk = state_at_current(locus.i_c1, c).x_q
    x_tr = state_at_current(locus.i_c2, c).x_q
    # golden_max already polished v; polish x once more for symmetry
    x_pk, _ = golden_max(v_of, x_pk * 0.999, x_pk * 1.001, rtol=1e-13)
    x_tr, _ = golden_min(v_of, x_tr * 0.999, x_tr * 1.001, rtol=1e-13)
    return x_pk, x_tr


_STABLE, _UNSTABLE, _SEMI = "stable", "unstable", "semi-stable"


def fixed_points_const_voltage(v0: float, c: ModelCoefficients,
                               x_grid: np.ndarray | None = None
                               ) -> list[tuple[float, str]]:
    """All fixed points of the voltage-driven route on the clamped domain.

    Stability follows the slope of the dynamic route at each root
    (negative slope -> stable).  A root at which the route only touches
    the axis (tangency, or a deduplicated near-double root) is semi-stable.
    """
    if v0 < 0.0:
        raise StateDomainError("drive voltage must be non-negative")
    if v0 == 0.0:
        return []
    if x_grid is None:
        x_grid = split_log_grid(X_CLAMP_LO, X_CLAMP_HI, 2000)
    f = kinetic_voltage(x_grid, v0, c)

    def route(x: float) -> float:
        return float(kinetic_voltage(x, v0, c))

    roots = refine_roots(route, x_grid, f, rtol=1e-12, dedup=1e-9)
    out: list[tuple[float, str]] = []
    for r in roots:
        left = route(max(r * (1.0 - 1e-6), X_CLAMP_LO))
        right = route(min(r + max(r * 1e-6, 1e-15), X_CLAMP_HI))
        if left > 0.0 and right < 0.0:
            out.append((r, _STABLE))
        elif left < 0.0 and right > 0.0:
            out.append((r, _UNSTABLE))
        else:
            out.append((r, _SEMI))
    # A route maximum tangent to the axis produces no sign change; detect it
    # by a vanishing route maximum relative to the route's overall scale.
    if not out:
        k = int(np.argmax(f))
        if 0 < k < len(x_grid) - 1:
            x_m, f_m = golden_max(route, x_grid[k - 1], x_grid[k + 1],
                                  rtol=1e-12)
            scale = float(np.max(np.abs(f)))
            if scale > 0.0 and abs(f_m) <= 1e-9 * scale:
                out.append((x_m, _SEMI))
    return out


def saddle_node_voltage(c: ModelCoefficients) -> SaddleNodeResult:
    """Bifurcation voltage of the voltage-driven device.

    Found by bisection on the maximum of the dynamic route over x: below
    v* the route is wholly negative (no fixed point), above it a
    stable/unstable pair exists.
    """
    x_grid = split_log_grid(X_CLAMP_LO, X_CLAMP_HI, 2000)

    def route_max(v0: float) -> float:
        f = kinetic_voltage(x_grid, v0, c)
        k = int(np.argmax(f))
        lo = x_grid[max(k - 1, 0)]
        hi = x_grid[min(k + 1, len(x_grid) - 1)]
        _, fm = golden_max(lambda x: float(kinetic_voltage(x, v0, c)),
                           lo, hi, rtol=1e-12)
        return fm

    # Bracket the sign change of the route maximum on a coarse voltage scan.
    v_scan = np.exp(np.linspace(np.log(1e-3), np.log(2.0), 60))
    vals = np.array([route_max(v) for v in v_scan])
    flips = np.nonzero((vals[:-1] < 0.0) & (vals[1:] >= 0.0))[0]
    if len(flips) == 0:
        raise SolverError("route maximum never changes sign on (1 mV, 2 V)")
    k = int(flips[0])
    v_star = bisect(route_max, float(v_scan[k]), float(v_scan[k + 1]),
                    rtol=1e-12)

    dv = 1e-3
    below = fixed_points_const_voltage(max(v_star - dv, 1e-6), c)
    at = fixed_points_const_voltage(v_star, c)
    above = fixed_points_const_voltage(v_star + dv, c)
    pairs = at if at else [(x, s) for x, s in above]
    return SaddleNodeResult(v_star=v_star, roots_below=len(below),
                            roots_at=len(at), roots_above=len(above),
                            root_pairs=pairs)


def kinetic_residual(locus: DcLocus) -> np.ndarray:
    """Dimensionless defect of the fixed-point condition along the locus.

    Computes (i^2 R - P) / (i^2 R) per point; zero for exact fixed points.
    """
    c = locus.coeffs
    x = locus.x_q
    lx = np.log(x)
    joule = locus.i_q ** 2 * locus.r_q
    return (joule + c.C / lx) / joule
