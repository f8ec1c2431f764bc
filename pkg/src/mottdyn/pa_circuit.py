"""Local analysis of the voltage-biased relaxation oscillator.

The circuit couples the memristor M to a parallel capacitor Cp and a
series resistor Rs driven by a DC bias:  {(M // Cp) + Rs}.  Two state
variables (x, v) evolve as

    dx/dt = f(x, v) = f_x(x, v / R(x))
    dv/dt = g(x, v) = ((Vdc - v)/Rs - v/R(x)) / Cp

Fixed points sit at intersections of the x-nullcline (the isolated-device
voltage locus, circuit independent) and the v-nullcline (a resistive
divider, Cp independent).  Stability follows from the 2x2 Jacobian in
closed form; equivalently, a dimension-reduction treats (M // Cp) as one
element whose transfer function has a pole pair identical to the Jacobian
eigenvalues.  The trace-determinant plane classifies each point into the
thirteen standard classes; borderline classes are flagged as unreliable
predictions of the linearization.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from math import exp, log, sqrt

import numpy as np

from .device import ModelCoefficients
from .errors import InvalidParameterError, SolverError
from .numerics import bisect, linear_fit, refine_roots, split_log_grid
from .small_signal import _lin_from_logx, pole_zero
from .steady_state import FixedPoint1D

# ln x search window for circuit fixed points; reaches x ~ 1e-280 so the
# insulating-branch root exists for any bias above ~0.1 V.
_U_LO = -645.0
_U_HI = log(1.0 - 1e-12)

#: Trace-determinant classes, keyed by the identifiers of the standard
#: thirteen-way classification.
CLASS_NAMES: dict[int, str] = {
    1: "saddle point",
    2: "stable line of fixed points",
    3: "non-isolated fixed points (plane or parallel lines)",
    4: "unstable line of fixed points",
    5: "stable node (sink)",
    6: "stable degenerate node",
    7: "stable star (proper node)",
    8: "stable spiral sink",
    9: "center",
    10: "unstable spiral source",
    11: "unstable degenerate node",
    12: "unstable star (proper node)",
    13: "unstable node (source)",
}

#: Classes on region borders: linearization may misclassify the nonlinear
#: system there (tangency points are semi-stable, centers may bifurcate).
BORDERLINE_CLASSES = frozenset({2, 3, 4, 6, 7, 9, 11, 12})


@dataclass(frozen=True)
class CircuitParams:
    """Series resistance (ohm), parallel capacitance (F), DC bias (V)."""

    rs: float
    cp: float
    vdc: float

    def __post_init__(self):
        for name in ("rs", "cp", "vdc"):
            if not (getattr(self, name) > 0.0):
                raise InvalidParameterError(
                    f"circuit parameter {name} must be strictly positive")


@dataclass(frozen=True)
class CircuitOperatingPoint:
    """A circuit fixed point with its full linearization record."""

    x_q: float
    v_q: float
    i_q: float
    jac: np.ndarray            # 2x2 [[xi11, xi12], [xi21, xi22]]
    tr: float
    det: float
    discriminant: float
    eig_plus: complex
    eig_minus: complex
    trdet_class: int
    class_name: str
    omega0: float              # 1/(Rs Cp)
    omega1: float              # 1/(R1 C1) = -b11
    gamma1: float              # R1 / R_ch
    gamma_s: float             # Rs / R_ch
    linearization_reliable: bool

    @property
    def eigs(self) -> tuple[complex, complex]:
        return (self.eig_plus, self.eig_minus)


@dataclass(frozen=True)
class TransferPoles:
    """Pole pair of the dimension-reduced transfer function."""

    p_plus: complex
    p_minus: complex
    discriminant: float
    d0: float
    d1: float
    d2: float
    k_prime: float


@dataclass
class NullclineSet:
    """Nullcline polylines, fixed points and direction-field samples."""

    x_nullcline: np.ndarray    # columns (x, v); circuit independent
    v_nullcline: np.ndarray    # columns (x, v); Cp independent
    fixed_points: list[CircuitOperatingPoint]
    region_signs: np.ndarray   # columns (x, v, sign_dxdt, sign_dvdt)


def classify_trdet(tr: float, det: float,
                   discriminant: float | None = None) -> int:
    """Class identifier (1-13) for a Jacobian with the given trace and
    determinant.

    Exact region logic; callers that want a tolerance band around the
    borderlines must snap their inputs first.  Repeated-eigenvalue cases
    return the degenerate-node ids (6, 11); the star variants (7, 12)
    require eigenvector completeness, which trace and determinant alone
    cannot decide (`jacobian_at` resolves them from the full matrix).
    """
    if not (np.isfinite(tr) and np.isfinite(det)):
        raise SolverError("trace and determinant must be finite")
    if det < 0.0:
        return 1
    if det == 0.0:
        return 2 if tr < 0.0 else (3 if tr == 0.0 else 4)
    if tr == 0.0:
        return 9
    disc = tr * tr - 4.0 * det if discriminant is None else discriminant
    if tr < 0.0:
        return 5 if disc > 0.0 else (6 if disc == 0.0 else 8)
    return 13 if disc > 0.0 else (11 if disc == 0.0 else 10)


def memristance_at(x: float, c: ModelCoefficients) -> float:
    return 1.0 / (c.A * (1.0 + c.B * x * x))


def jacobian_at(x_q: float, v_q: float, circ: CircuitParams,
                c: ModelCoefficients) -> CircuitOperatingPoint:
    """Linearize the two coupled ODEs about the fixed point (x_q, v_q).

    Trace and determinant are evaluated through the cutoff-frequency form
    (omega_1, omega_0 and the two resistance ratios); |tr| below
    1e-6 * omega_0 is snapped to zero so that centers are classifiable in
    floating point.
    """
    u = log(x_q)
    r_ch = memristance_at(x_q, c)
    i_m = v_q / r_ch
    a11, a12, b11, b12 = (float(t) for t in _lin_from_logx(u, i_m, c))
    xi11 = b11 - b12 * a11 / r_ch
    xi12 = b12 / r_ch
    xi21 = a11 / (r_ch * circ.cp)
    xi22 = -(1.0 / (circ.rs * circ.cp) + 1.0 / (r_ch * circ.cp))
    jac = np.array([[xi11, xi12], [xi21, xi22]])

    omega0 = 1.0 / (circ.rs * circ.cp)
    omega1 = -b11
    r1 = -a11 * b12 / b11
    gamma1 = r1 / r_ch
    gamma_s = circ.rs / r_ch
    tr = -(omega1 * (1.0 + gamma1) + omega0 * (1.0 + gamma_s))
    det = omega1 * omega0 * (1.0 + gamma1 + gamma_s)
    disc = tr * tr - 4.0 * det

    if disc >= 0.0:
        root = sqrt(disc)
        eig_p = complex((tr + root) / 2.0, 0.0)
        eig_m = complex((tr - root) / 2.0, 0.0)
    else:
        root = sqrt(-disc)
        eig_p = complex(tr / 2.0, root / 2.0)
        eig_m = complex(tr / 2.0, -root / 2.0)

    tr_snapped = 0.0 if abs(tr) < 1e-6 * omega0 else tr
    cls = classify_trdet(tr_snapped, det,
                         None if tr_snapped != tr else disc)
    if cls in (6, 11) and xi12 == 0.0 and xi21 == 0.0 and xi11 == xi22:
        cls += 1  # complete eigenvalue: proper node (star)
    return CircuitOperatingPoint(
        x_q=x_q, v_q=v_q, i_q=i_m, jac=jac, tr=tr, det=det,
        discriminant=disc, eig_plus=eig_p, eig_minus=eig_m,
        trdet_class=cls, class_name=CLASS_NAMES[cls], omega0=omega0,
        omega1=omega1, gamma1=gamma1, gamma_s=gamma_s,
        linearization_reliable=cls not in BORDERLINE_CLASSES)


def transfer_poles(q: FixedPoint1D, circ: CircuitParams,
                   c: ModelCoefficients) -> TransferPoles:
    """Pole pair of the dimension-reduced system about the fixed point.

    The composite element (M // Cp) in series with Rs has a quadratic
    pole polynomial with d2 = 1,

        d1 = (1 + Rs/R_ch) omega_0 - z,
        d0 = -(Rs/R_ch) omega_0 p - omega_0 z,

    built from the isolated device's pole p and zero z (the memristor
    gain k is its channel resistance).
    """
    pz = pole_zero(q, c)
    r_ch = pz.k
    omega0 = 1.0 / (circ.rs * circ.cp)
    gamma_s = circ.rs / r_ch
    d1 = (1.0 + gamma_s) * omega0 - pz.z
    d0 = -gamma_s * omega0 * pz.p - omega0 * pz.z
    disc = d1 * d1 - 4.0 * d0
    if disc >= 0.0:
        root = sqrt(disc)
        p_plus = complex((-d1 + root) / 2.0, 0.0)
        p_minus = complex((-d1 - root) / 2.0, 0.0)
    else:
        root = sqrt(-disc)
        p_plus = complex(-d1 / 2.0, root / 2.0)
        p_minus = complex(-d1 / 2.0, -root / 2.0)
    return TransferPoles(p_plus=p_plus, p_minus=p_minus, discriminant=disc,
                         d0=d0, d1=d1, d2=1.0, k_prime=omega0)


def x_nullcline_voltage(x, c: ModelCoefficients):
    """Voltage on the x-nullcline (identical to the isolated DC locus)."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(-c.C / (c.A * (1.0 + c.B * x * x) * np.log(x)))


def v_nullcline_voltage(x, circ: CircuitParams, c: ModelCoefficients):
    """Voltage on the v-nullcline: the Rs / R_ch(x) divider output."""
    x = np.asarray(x, dtype=float)
    return circ.vdc / (1.0 + circ.rs * c.A * (1.0 + c.B * x * x))


def _nullcline_gap(u: float, circ: CircuitParams,
                   c: ModelCoefficients) -> float:
    x = exp(u)
    q = 1.0 + c.B * x * x
    v0 = sqrt(-c.C / (c.A * q * u))
    v1 = circ.vdc / (1.0 + circ.rs * c.A * q)
    return v0 - v1


def pa_fixed_points(circ: CircuitParams, c: ModelCoefficients,
                    n_scan: int = 6000) -> list[CircuitOperatingPoint]:
    """All circuit fixed points, ordered by increasing x.

    Roots of the nullcline gap are bracketed on a dense ln(x) grid down
    to x ~ 1e-280, so the insulating-branch point is found for any bias
    in the studied range.
    """
    us = np.linspace(_U_LO, _U_HI, n_scan)
    gap = np.array([_nullcline_gap(u, circ, c) for u in us])
    roots = refine_roots(lambda u: _nullcline_gap(u, circ, c), us, gap,
                         rtol=1e-13, dedup=1e-12)
    points = []
    for u in roots:
        x = exp(u)
        v = float(v_nullcline_voltage(x, circ, c))
        points.append(jacobian_at(x, v, circ, c))
    return points


def nullclines(circ: CircuitParams, c: ModelCoefficients,
               x_grid: np.ndarray | None = None,
               probe: int = 12) -> NullclineSet:
    """Nullcline polylines, fixed points and a direction-field sample.

    ``region_signs`` holds one row (x, v, sign dx/dt, sign dv/dt) per
    probe-grid node, enough to read off the four (or six) open regions the
    nullclines cut the phase plane into.
    """
    from .model import kinetic_voltage  # local import avoids cycle at init

    if x_grid is None:
        x_grid = split_log_grid(1e-6, 1.0 - 1e-6, 1200)
    vx = x_nullcline_voltage(x_grid, c)
    vv = v_nullcline_voltage(x_grid, circ, c)
    fps = pa_fixed_points(circ, c)

    xs = np.linspace(0.04, 0.96, probe)
    vs = np.linspace(circ.vdc / probe, circ.vdc * (1.0 - 1.0 / probe), probe)
    rows = []
    for x in xs:
        f_x = kinetic_voltage(x, vs, c)
        g_x = ((circ.vdc - vs) / circ.rs
               - vs / memristance_at(float(x), c)) / circ.cp
        for v, fv, gv in zip(vs, f_x, g_x):
            rows.append((x, v, np.sign(fv), np.sign(gv)))
    return NullclineSet(
        x_nullcline=np.column_stack([x_grid, vx]),
        v_nullcline=np.column_stack([x_grid, vv]),
        fixed_points=fps,
        region_signs=np.array(rows))


def _tracked_trace(circ: CircuitParams, c: ModelCoefficients) -> float:
    """Trace at the oscillator branch (largest-x fixed point)."""
    points = pa_fixed_points(circ, c)
    if not points:
        raise SolverError(
            f"no fixed point at rs={circ.rs}, vdc={circ.vdc}")
    return points[-1].tr


_DEFAULT_BRACKETS = {
    "rs": (3e2, 2e4, "log"),
    "cp": (1e-14, 1e-10, "log"),
    "vdc": (0.7, 3.0, "lin"),
}


def critical_parameter(which: str, circ: CircuitParams,
                       c: ModelCoefficients,
                       bracket: tuple[float, float] | None = None,
                       rtol: float = 1e-6) -> float:
    """Parameter value at which the tracked fixed point is a center.

    Bisection on tr(parameter) = 0 with the other two circuit parameters
    held at their values in ``circ``.  Raises SolverError when no sign
    change exists in the bracket.
    """
    which = which.lower()
    if which not in _DEFAULT_BRACKETS:
        raise SolverError(f"unknown parameter {which!r}; "
                          "expected rs, cp or vdc")

    def trace_of(value: float) -> float:
        kwargs = {"rs": circ.rs, "cp": circ.cp, "vdc": circ.vdc}
        kwargs[which] = value
        return _tracked_trace(CircuitParams(**kwargs), c)

    lo, hi, scale = _DEFAULT_BRACKETS[which]
    if bracket is not None:
        lo, hi = bracket
    if scale == "log":
        scan = np.exp(np.linspace(log(lo), log(hi), 41))
    else:
        scan = np.linspace(lo, hi, 41)
    vals = np.array([trace_of(v) for v in scan])
    flips = np.nonzero(vals[:-1] * vals[1:] < 0.0)[0]
    if len(flips) == 0:
        raise SolverError(
            f"trace does not change sign for {which} in [{lo:g}, {hi:g}]")
    k = int(flips[0])
    return bisect(trace_of, float(scan[k]), float(scan[k + 1]), rtol=rtol)


@dataclass(frozen=True)
class PowerLawFit:
    """cp_star = a * rs**b fit over a set of series resistances."""

    a: float
    b: float
    r_squared: float
    rs_values: np.ndarray
    cp_values: np.ndarray


def cp_star_power_law(rs_list, vdc: float,
                      c: ModelCoefficients) -> PowerLawFit:
    """Critical capacitance against series resistance, log-log fitted."""
    rs_values = np.asarray(rs_list, dtype=float)
    if len(rs_values) < 3:
        raise SolverError("power-law fit needs at least 3 resistances")
    cp_values = []
    for rs in rs_values:
        circ = CircuitParams(rs=float(rs), cp=1e-12, vdc=vdc)
        cp_values.append(critical_parameter("cp", circ, c))
    cp_values = np.asarray(cp_values)
    b, log_a, r2 = linear_fit(np.log(rs_values), np.log(cp_values))
    return PowerLawFit(a=exp(log_a), b=b, r_squared=r2,
                       rs_values=rs_values, cp_values=cp_values)


@dataclass(frozen=True)
class HopfReport:
    """Local Hopf-theorem conditions at a candidate critical parameter."""

    nonhyperbolic: bool
    beta: float                # |Im lambda| at the critical value (rad/s)
    d: float                   # d Re(lambda) / d parameter
    eig_plus: complex
    eig_minus: complex


def hopf_conditions(which: str, value: float, circ: CircuitParams,
                    c: ModelCoefficients) -> HopfReport:
    """Check non-hyperbolicity and transversality at ``which = value``.

    The genericity condition (normal-form cubic coefficient) is out of
    scope; only the eigenvalue crossing is verified, with the crossing
    speed estimated by a central difference over +/-0.1 % of the value.
    """
    which = which.lower()

    def point_at(v: float) -> CircuitOperatingPoint:
        kwargs = {"rs": circ.rs, "cp": circ.cp, "vdc": circ.vdc}
        kwargs[which] = v
        pts = pa_fixed_points(CircuitParams(**kwargs), c)
        if not pts:
            raise SolverError("fixed point lost during Hopf check")
        return pts[-1]

    op = point_at(value)
    re_l = op.eig_plus.real
    im_l = op.eig_plus.imag
    nonhyp = abs(re_l) <= 1e-6 * op.omega0 and im_l != 0.0
    delta = 1e-3 * value
    d = (point_at(value + delta).eig_plus.real
         - point_at(value - delta).eig_plus.real) / (2.0 * delta)
    return HopfReport(nonhyperbolic=nonhyp, beta=abs(im_l), d=d,
                      eig_plus=op.eig_plus, eig_minus=op.eig_minus)


@dataclass
class SweepBranch:
    """One tracked fixed-point branch of a parameter sweep."""

    branch_id: int
    values: list[float]
    points: list[CircuitOperatingPoint]


def trdet_sweep(which: str, values, circ: CircuitParams,
                c: ModelCoefficients) -> list[SweepBranch]:
    """Fixed points along a parameter sweep, grouped into branches.

    Continuation by nearest-x matching between consecutive steps; a point
    farther than 0.05 in x from every live branch head opens a new branch.
    """
    which = which.lower()
    if which not in ("rs", "cp", "vdc"):
        raise SolverError(f"unknown sweep parameter {which!r}")
    branches: list[SweepBranch] = []
    for value in values:
        kwargs = {"rs": circ.rs, "cp": circ.cp, "vdc": circ.vdc}
        kwargs[which] = float(value)
        pts = pa_fixed_points(CircuitParams(**kwargs), c)
        taken = set()
        for op in pts:
            best = None
            best_dist = 0.05
            for bi, br in enumerate(branches):
                if bi in taken:
                    continue
                dist = abs(br.points[-1].x_q - op.x_q)
                if dist < best_dist:
                    best, best_dist = bi, dist
            if best is None:
                branches.append(SweepBranch(len(branches),
                                            [float(value)], [op]))
                taken.add(len(branches) - 1)
            else:
                branches[best].values.append(float(value))
                branches[best].points.append(op)
                taken.add(best)
    return branches


def eigenvalues_match_poles(op: CircuitOperatingPoint,
                            poles: TransferPoles,
                            rtol: float = 1e-9) -> bool:
    """True when the Jacobian eigenvalues equal the transfer poles."""
    scale = max(abs(op.eig_plus), abs(op.eig_minus), 1e-30)
    return (cmath.isclose(op.eig_plus, poles.p_plus,
                          rel_tol=rtol, abs_tol=rtol * scale)
            and cmath.isclose(op.eig_minus, poles.p_minus,
                              rel_tol=rtol, abs_tol=rtol * scale))
