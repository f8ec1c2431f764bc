"""Small-signal linearization and local-activity analysis about a DC point.

Expanding the port equation and the state kinetics about a fixed point Q
gives four linear-term coefficients (a11, a12, b11, b12); in the Laplace
domain the device reduces to a one-pole, one-zero impedance

    Z(s; Q) = a11 b12 / (s - b11) + a12 = k (s - z) / (s - p)

realized by a virtual circuit of a negative capacitor C1 parallel to a
negative resistor R1, both in series with the positive channel resistance
R2.  The pole is p = b11 < 0 everywhere on the locus, so the device is
either locally passive (zero in the closed left half-plane) or on the
edge of chaos (zero in the open right half-plane); the crossovers coincide
exactly with the critical currents of the DC locus.

Rational-function coefficients are evaluated via the identities
a1 = -1/b11 and b1 = -a12/b11 rather than through R1 C1 products, keeping
the deep locus tail (x underflowed to 0, ln x finite) well defined.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np

from .device import DeviceParams, ModelCoefficients, derive_coefficients
from .errors import DegenerateOperatingPointError, SolverError
from .numerics import golden_max, linear_fit, log_grid
from .steady_state import (FixedPoint1D, dc_current_at_state,
                           state_at_current, voltage_extrema_states)

LP = "LP"
EOC = "EOC"
LA_NOT_EOC = "LA_not_EOC"


@dataclass(frozen=True)
class LinearCoeffs:
    """Linear-term coefficients of the expansion about a fixed point.

    a11 (V), a12 (ohm) come from the port equation; b11 (1/s),
    b12 (1/(s A)) from the kinetics.  b11 < 0 at every fixed point of
    this model; a12 equals the memristance.
    """

    a11: float
    a12: float
    b11: float
    b12: float


@dataclass(frozen=True)
class VirtualElements:
    """s-domain equivalent circuit: (C1 // R1) + R2.

    R1 and C1 are negative at every fixed point with i_Q != 0; the
    negative capacitance is what produces the inductive reactance.
    """

    r1: float
    r2: float
    c1: float


@dataclass(frozen=True)
class PoleZero:
    """Pole, zero, gain and the local-activity class at a fixed point."""

    p: float
    z: float
    k: float
    activity_class: str


@dataclass(frozen=True)
class ImpedanceSample:
    """Impedance on the imaginary axis; fields may be scalars or arrays."""

    omega: np.ndarray
    re: np.ndarray
    im: np.ndarray


def _lin_from_logx(u, i, c: ModelCoefficients):
    """Linear coefficients from ln(x_Q) and i_Q; x may underflow to 0."""
    u = np.asarray(u, dtype=float)
    i = np.asarray(i, dtype=float)
    x = np.exp(u)
    q = 1.0 + c.B * x * x
    xu = x * u
    poly = 1.0 - x * x + 2.0 * x * xu + 2.0 * c.E * xu * xu
    a11 = -2.0 * c.B * i * x / (c.A * q * q)
    a12 = 1.0 / (c.A * q)
    b12 = 4.0 * x * u * u * i / (c.D * c.A * q * poly)
    X = 2.0 * x * u * u / (c.A * q)
    Y = 2.0 * c.C * xu
    Z = c.D * poly
    Xp = 2.0 * u * (2.0 * c.B * x * x - c.B * x * x * u + u + 2.0) \
        / (c.A * q * q)
    Yp = 2.0 * c.C * (u + 1.0)
    Zp = 4.0 * c.D * xu * (1.0 + c.E * (u + 1.0))
    b11 = i * i * (Xp * Z - X * Zp) / (Z * Z) + (Yp * Z - Y * Zp) / (Z * Z)
    return a11, a12, b11, b12


def linearize(q: FixedPoint1D, c: ModelCoefficients) -> LinearCoeffs:
    """Closed-form linear-term coefficients at the fixed point ``q``."""
    a11, a12, b11, b12 = _lin_from_logx(q.log_x, q.i_q, c)
    return LinearCoeffs(float(a11), float(a12), float(b11), float(b12))


def virtual_elements(lc: LinearCoeffs) -> VirtualElements:
    """Map linear coefficients onto the three-element equivalent circuit."""
    prod = lc.a11 * lc.b12
    if prod == 0.0:
        raise DegenerateOperatingPointError(
            "virtual elements are undefined at i_Q = 0 (C1 diverges)")
    return VirtualElements(r1=-prod / lc.b11, r2=lc.a12, c1=1.0 / prod)


def impedance_coeffs(ve: VirtualElements
                     ) -> tuple[float, float, float, float]:
    """(a0, a1, b0, b1) of Z(s) = (b1 s + b0) / (a1 s + a0)."""
    return (1.0, ve.r1 * ve.c1, ve.r1 + ve.r2, ve.r1 * ve.r2 * ve.c1)


def _rational_coeffs(lc: LinearCoeffs) -> tuple[float, float, float, float]:
    # Deep-tail safe equivalents of impedance_coeffs (no C1 product).
    a0 = 1.0
    a1 = -1.0 / lc.b11
    b0 = lc.a12 - lc.a11 * lc.b12 / lc.b11
    b1 = -lc.a12 / lc.b11
    return a0, a1, b0, b1


def pole_zero(q: FixedPoint1D, c: ModelCoefficients) -> PoleZero:
    """Pole, zero and activity class of the impedance at ``q``.

    LP:  pole in open LHP and zero in closed LHP.
    EOC: pole in open LHP and zero in open RHP.
    LA_not_EOC: pole in the closed RHP (unreachable for this model; the
    branch exists for classifier completeness).
    """
    if q.i_q <= 0.0:
        raise DegenerateOperatingPointError(
            "pole-zero analysis requires i_Q > 0")
    lc = linearize(q, c)
    a0, a1, b0, b1 = _rational_coeffs(lc)
    p = lc.b11
    z = -b0 / b1
    k = b1 / a1
    if p >= 0.0:
        cls = LA_NOT_EOC
    elif z > 0.0:
        cls = EOC
    else:
        cls = LP
    return PoleZero(p=p, z=float(z), k=float(k), activity_class=cls)


def impedance(q: FixedPoint1D, omega, c: ModelCoefficients
              ) -> ImpedanceSample:
    """Re/Im of Z(i omega; Q); ``omega`` in rad/s, scalar or array."""
    lc = linearize(q, c)
    a0, a1, b0, b1 = _rational_coeffs(lc)
    w = np.asarray(omega, dtype=float)
    den = a0 * a0 + a1 * a1 * w * w
    re = (a0 * b0 + a1 * b1 * w * w) / den
    im = (a0 * b1 - a1 * b0) * w / den
    return ImpedanceSample(omega=w, re=re, im=im)


def max_active_frequency(q: FixedPoint1D,
                         c: ModelCoefficients) -> float | None:
    """Angular frequency bound of the active band, or None outside EOC.

    Re Z(i omega) < 0 exactly for |omega| below
    sqrt(-a0 b0 / (a1 b1)), which is real only when the zero lies in the
    right half-plane.
    """
    lc = linearize(q, c)
    a0, a1, b0, b1 = _rational_coeffs(lc)
    ratio = (a0 * b0) / (a1 * b1)
    if ratio >= 0.0:
        return None
    return sqrt(-ratio)


def imz_peak_frequency(q: FixedPoint1D, c: ModelCoefficients) -> float:
    """Frequency (Hz) of the reactance peak at ``q``.

    The closed-form candidate is |omega_p| = |b11| = a0/a1; it is verified
    against a numerical maximization of |Im Z| and the refined value is
    returned.
    """
    if q.i_q <= 0.0:
        raise DegenerateOperatingPointError("reactance peak requires i_Q > 0")
    lc = linearize(q, c)
    candidate = abs(lc.b11)

    def neg_im(w: float) -> float:
        return abs(float(impedance(q, w, c).im))

    w_num, _ = golden_max(neg_im, candidate / 10.0, candidate * 10.0,
                          rtol=1e-10)
    if abs(w_num - candidate) > 1e-6 * candidate:
        raise SolverError(
            f"reactance peak mismatch: closed form {candidate:.6e}, "
            f"numeric {w_num:.6e}")
    return w_num / (2.0 * pi)


@dataclass
class ReZMap:
    """Re Z sampled over a (current, frequency) grid with its zero contour.

    ``rez[j, k]`` is Re Z at frequency ``f_grid[j]`` and current
    ``i_grid[k]``.  The contour is a list of polylines in (i, f)
    coordinates extracted at level zero.
    """

    i_grid: np.ndarray
    f_grid: np.ndarray
    rez: np.ndarray
    contour: list[np.ndarray]

    @property
    def apex(self) -> tuple[float, float]:
        """(i, f) of the highest-frequency contour vertex."""
        best = None
        for line in self.contour:
            k = int(np.argmax(line[:, 1]))
            if best is None or line[k, 1] > best[1]:
                best = (float(line[k, 0]), float(line[k, 1]))
        if best is None:
            raise SolverError("Re Z = 0 contour is empty on this grid")
        return best


def _marching_segments(lx: np.ndarray, ly: np.ndarray, z: np.ndarray
                       ) -> list[tuple[tuple[float, float],
                                       tuple[float, float]]]:
    """Zero-level segments of z(y, x) with linear edge interpolation."""

    def cross(va, vb, pa, pb):
        t = va / (va - vb)
        return (pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]))

    segments = []
    for j in range(z.shape[0] - 1):
        for k in range(z.shape[1] - 1):
            corners = ((z[j, k], (lx[k], ly[j])),
                       (z[j, k + 1], (lx[k + 1], ly[j])),
                       (z[j + 1, k + 1], (lx[k + 1], ly[j + 1])),
                       (z[j + 1, k], (lx[k], ly[j + 1])))
            points = []
            for a in range(4):
                va, pa = corners[a]
                vb, pb = corners[(a + 1) % 4]
                if (va < 0.0) != (vb < 0.0):
                    points.append(cross(va, vb, pa, pb))
            if len(points) == 2:
                segments.append((points[0], points[1]))
            elif len(points) == 4:
                segments.append((points[0], points[1]))
                segments.append((points[2], points[3]))
    return segments


def _chain_segments(segments) -> list[list[tuple[float, float]]]:
    """Greedy chaining of unordered segments into polylines."""

    def key(p):
        return (round(p[0], 12), round(p[1], 12))

    remaining = {id(s): s for s in segments}
    by_end: dict[tuple, list] = {}
    for s in segments:
        by_end.setdefault(key(s[0]), []).append(s)
        by_end.setdefault(key(s[1]), []).append(s)
    lines = []
    while remaining:
        s = remaining.pop(next(iter(remaining)))
        line = [s[0], s[1]]
        for grow_head in (False, True):
            while True:
                end = line[0] if grow_head else line[-1]
                nxt = None
                for cand in by_end.get(key(end), ()):
                    if id(cand) in remaining:
                        nxt = cand
                        break
                if nxt is None:
                    break
                remaining.pop(id(nxt))
                other = nxt[1] if key(nxt[0]) == key(end) else nxt[0]
                if grow_head:
                    line.insert(0, other)
                else:
                    line.append(other)
        lines.append(line)
    return lines


def rez_map(i_grid, f_grid, c: ModelCoefficients) -> ReZMap:
    """Re Z over a current/frequency grid plus its zero-level contour.

    Grids must be positive and sorted ascending; the contour is extracted
    by marching squares with linear interpolation on the log-log grid.
    """
    i_grid = np.asarray(i_grid, dtype=float)
    f_grid = np.asarray(f_grid, dtype=float)
    for g, name in ((i_grid, "current"), (f_grid, "frequency")):
        if np.any(g <= 0.0) or np.any(np.diff(g) <= 0.0):
            raise SolverError(f"{name} grid must be positive and increasing")
    w2 = (2.0 * pi * f_grid) ** 2
    rez = np.empty((len(f_grid), len(i_grid)))
    for k, i_q in enumerate(i_grid):
        lc = linearize(state_at_current(float(i_q), c), c)
        a0, a1, b0, b1 = _rational_coeffs(lc)
        rez[:, k] = (a0 * b0 + a1 * b1 * w2) / (a0 * a0 + a1 * a1 * w2)
    segments = _marching_segments(np.log(i_grid), np.log(f_grid), rez)
    contour = [np.exp(np.asarray(line))
               for line in _chain_segments(segments)]
    return ReZMap(i_grid=i_grid, f_grid=f_grid, rez=rez, contour=contour)


def default_current_grid(n: int = 400) -> np.ndarray:
    """Log-spaced current grid, 1 uA to 2 mA."""
    return log_grid(1e-6, 2e-3, n)


def default_frequency_grid(n: int = 400) -> np.ndarray:
    """Log-spaced frequency grid, 1 MHz to 1 THz."""
    return log_grid(1e6, 1e12, n)


@dataclass(frozen=True)
class ScalingRecord:
    """Apex of the active region for one channel radius."""

    r_ch: float
    f_max: float
    i_at_apex: float


@dataclass(frozen=True)
class ScalingStudy:
    """Size scaling of the maximum locally-active frequency."""

    records: list[ScalingRecord]
    slope: float       # of i(f_max apex) against r_ch, in A/m
    intercept: float
    r_squared: float


def apex_frequency(c: ModelCoefficients) -> tuple[float, float]:
    """Highest locally-active frequency over the whole locus and the
    current at which it is reached.

    The active band exists only between the two critical currents, where
    the zero sits in the right half-plane; the apex is refined by
    golden-section over ln x inside that interval.
    """
    x_pk, x_tr = voltage_extrema_states(c)

    def wmax2_of_logx(u: float) -> float:
        x = np.exp(u)
        lc = LinearCoeffs(*(float(v) for v in
                            _lin_from_logx(u, float(
                                dc_current_at_state(x, c)), c)))
        a0, a1, b0, b1 = _rational_coeffs(lc)
        ratio = (a0 * b0) / (a1 * b1)
        return -ratio if ratio < 0.0 else 0.0

    u_lo, u_hi = np.log(x_pk), np.log(x_tr)
    scan = np.linspace(u_lo, u_hi, 200)
    vals = np.array([wmax2_of_logx(u) for u in scan])
    k = int(np.argmax(vals))
    a = scan[max(k - 1, 0)]
    b = scan[min(k + 1, len(scan) - 1)]
    u_best, w2 = golden_max(wmax2_of_logx, a, b, rtol=1e-9)
    i_at = float(dc_current_at_state(np.exp(u_best), c))
    return sqrt(w2) / (2.0 * pi), i_at


def scaling_study(r_ch_list, base: DeviceParams) -> ScalingStudy:
    """Apex frequency and current for each channel radius, with a linear
    regression of apex current against radius."""
    records = []
    for r in r_ch_list:
        if not (r > 0.0):
            raise SolverError("channel radii must be positive")
        c = derive_coefficients(base.with_size(float(r), base.L_ch))
        f_max, i_at = apex_frequency(c)
        records.append(ScalingRecord(float(r), f_max, i_at))
    slope, intercept, r2 = linear_fit([rec.r_ch for rec in records],
                                      [rec.i_at_apex for rec in records])
    return ScalingStudy(records=records, slope=slope, intercept=intercept,
                        r_squared=r2)
