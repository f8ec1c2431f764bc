"""Dormand-Prince 5(4) kernels for the oscillator ODEs, numba-compiled.

The vector field is smooth but fast (state rates reach 1e13 1/s during
relaxation jumps), so the integrator runs millions of small steps; the
hot loop is kept free of Python objects and compiled with nogil so
portrait grids and parameter sweeps can run on threads.

Boundary policy: the state fraction lives in the open interval
(x_lo, x_hi).  Stage evaluations are clamped into the interval (the
logarithm in the kinetics must stay defined); a completed step that lands
outside is rejected and retried at half size a few times, then projected
onto the boundary with its x error ignored (the flow presses against the
boundary; time spent saturated is accumulated and reported).

Status codes: 0 horizon reached, 1 step-size underflow (stiffness),
2 sample buffer full.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# Dormand-Prince 5(4) tableau (FSAL).
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                          64448.0 / 6561.0, -212.0 / 729.0)
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0,
                                46732.0 / 5247.0, 49.0 / 176.0,
                                -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0,
                                71.0 / 1920.0, -17253.0 / 339200.0,
                                22.0 / 525.0, -1.0 / 40.0)

_MAX_BOUNDARY_HALVINGS = 8


@njit(cache=True, nogil=True)
def rhs(x, v, A, B, C, D, E, rs, cp, vdc):
    """Right-hand side (dx/dt, dv/dt) of the oscillator equations."""
    lx = np.log(x)
    xlx = x * lx
    den = D * (1.0 - x * x + 2.0 * x * xlx + 2.0 * E * xlx * xlx)
    q = 1.0 + B * x * x
    f = (2.0 * A * x * lx * lx * q * v * v + 2.0 * C * xlx) / den
    g = ((vdc - v) / rs - v * A * q) / cp
    return f, g


@njit(cache=True, nogil=True)
def _clamp(x, lo, hi):
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


@njit(cache=True, nogil=True)
def integrate_adaptive(x0, v0, A, B, C, D, E, rs, cp, vdc, horizon,
                       rtol, atol_x, atol_v, x_lo, x_hi, h_min, h0,
                       max_samples, store_every):
    """Adaptive DOPRI5(4) run; returns stored samples and run counters."""
    ts = np.empty(max_samples)
    xs = np.empty(max_samples)
    vs = np.empty(max_samples)
    ts[0] = 0.0
    xs[0] = x0
    vs[0] = v0
    n = 1
    t = 0.0
    x = x0
    v = v0
    h = h0
    n_accept = 0
    n_reject = 0
    t_sat = 0.0
    status = 0
    since_store = 0
    f1, g1 = rhs(x, v, A, B, C, D, E, rs, cp, vdc)
    while t < horizon:
        if n >= max_samples:
            status = 2
            break
        if h > horizon - t:
            h = horizon - t
        boundary_halvings = 0
        accepted = False
        while True:
            x2 = _clamp(x + h * _A21 * f1, x_lo, x_hi)
            v2 = v + h * _A21 * g1
            f2, g2 = rhs(x2, v2, A, B, C, D, E, rs, cp, vdc)
            x3 = _clamp(x + h * (_A31 * f1 + _A32 * f2), x_lo, x_hi)
            v3 = v + h * (_A31 * g1 + _A32 * g2)
            f3, g3 = rhs(x3, v3, A, B, C, D, E, rs, cp, vdc)
            x4 = _clamp(x + h * (_A41 * f1 + _A42 * f2 + _A43 * f3),
                        x_lo, x_hi)
            v4 = v + h * (_A41 * g1 + _A42 * g2 + _A43 * g3)
            f4, g4 = rhs(x4, v4, A, B, C, D, E, rs, cp, vdc)
            x5 = _clamp(x + h * (_A51 * f1 + _A52 * f2 + _A53 * f3
                                 + _A54 * f4), x_lo, x_hi)
            v5 = v + h * (_A51 * g1 + _A52 * g2 + _A53 * g3 + _A54 * g4)
            f5, g5 = rhs(x5, v5, A, B, C, D, E, rs, cp, vdc)
            x6 = _clamp(x + h * (_A61 * f1 + _A62 * f2 + _A63 * f3
                                 + _A64 * f4 + _A65 * f5), x_lo, x_hi)
            v6 = v + h * (_A61 * g1 + _A62 * g2 + _A63 * g3 + _A64 * g4
                          + _A65 * g5)
            f6, g6 = rhs(x6, v6, A, B, C, D, E, rs, cp, vdc)
            xn = x + h * (_B1 * f1 + _B3 * f3 + _B4 * f4 + _B5 * f5
                          + _B6 * f6)
            vn = v + h * (_B1 * g1 + _B3 * g3 + _B4 * g4 + _B5 * g5
                          + _B6 * g6)

            saturated = 0.0
            if xn <= x_lo or xn >= x_hi:
                if boundary_halvings < _MAX_BOUNDARY_HALVINGS \
                        and h > 2.0 * h_min:
                    h *= 0.5
                    boundary_halvings += 1
                    n_reject += 1
                    continue
                xn = _clamp(xn, x_lo, x_hi)
                saturated = h

            f7, g7 = rhs(xn, vn, A, B, C, D, E, rs, cp, vdc)
            err_x = h * (_E1 * f1 + _E3 * f3 + _E4 * f4 + _E5 * f5
                         + _E6 * f6 + _E7 * f7)
            err_v = h * (_E1 * g1 + _E3 * g3 + _E4 * g4 + _E5 * g5
                         + _E6 * g6 + _E7 * g7)
            if saturated > 0.0:
                err_x = 0.0
            scale_x = atol_x + rtol * max(abs(x), abs(xn))
            scale_v = atol_v + rtol * max(abs(v), abs(vn))
            err = np.sqrt(0.5 * ((err_x / scale_x) ** 2
                                 + (err_v / scale_v) ** 2))
            if err <= 1.0:
                t += h
                x = xn
                v = vn
                f1 = f7
                g1 = g7
                n_accept += 1
                t_sat += saturated
                since_store += 1
                if since_store >= store_every or t >= horizon:
                    ts[n] = t
                    xs[n] = x
                    vs[n] = v
                    n += 1
                    since_store = 0
                if err == 0.0:
                    h *= 5.0
                else:
                    fac = 0.9 * err ** -0.2
                    if fac > 5.0:
                        fac = 5.0
                    elif fac < 0.2:
                        fac = 0.2
                    h *= fac
                accepted = True
                break
            fac = 0.9 * err ** -0.2
            if fac > 0.9:
                fac = 0.9
            elif fac < 0.1:
                fac = 0.1
            h *= fac
            n_reject += 1
            if h < h_min:
                break
        if not accepted:
            status = 1
            break
    return ts[:n], xs[:n], vs[:n], n_accept, n_reject, t_sat, status


@njit(cache=True, nogil=True)
def integrate_fixed(x0, v0, A, B, C, D, E, rs, cp, vdc, h, n_steps,
                    x_lo, x_hi):
    """Fixed-step DOPRI5 propagation (order verification; no controller)."""
    ts = np.empty(n_steps + 1)
    xs = np.empty(n_steps + 1)
    vs = np.empty(n_steps + 1)
    ts[0] = 0.0
    xs[0] = x0
    vs[0] = v0
    x = x0
    v = v0
    t = 0.0
    f1, g1 = rhs(x, v, A, B, C, D, E, rs, cp, vdc)
    for k in range(n_steps):
        x2 = _clamp(x + h * _A21 * f1, x_lo, x_hi)
        v2 = v + h * _A21 * g1
        f2, g2 = rhs(x2, v2, A, B, C, D, E, rs, cp, vdc)
        x3 = _clamp(x + h * (_A31 * f1 + _A32 * f2), x_lo, x_hi)
        v3 = v + h * (_A31 * g1 + _A32 * g2)
        f3, g3 = rhs(x3, v3, A, B, C, D, E, rs, cp, vdc)
        x4 = _clamp(x + h * (_A41 * f1 + _A42 * f2 + _A43 * f3), x_lo, x_hi)
        v4 = v + h * (_A41 * g1 + _A42 * g2 + _A43 * g3)
        f4, g4 = rhs(x4, v4, A, B, C, D, E, rs, cp, vdc)
        x5 = _clamp(x + h * (_A51 * f1 + _A52 * f2 + _A53 * f3 + _A54 * f4),
                    x_lo, x_hi)
        v5 = v + h * (_A51 * g1 + _A52 * g2 + _A53 * g3 + _A54 * g4)
        f5, g5 = rhs(x5, v5, A, B, C, D, E, rs, cp, vdc)
        x6 = _clamp(x + h * (_A61 * f1 + _A62 * f2 + _A63 * f3 + _A64 * f4
                             + _A65 * f5), x_lo, x_hi)
        v6 = v + h * (_A61 * g1 + _A62 * g2 + _A63 * g3 + _A64 * g4
                      + _A65 * g5)
        f6, g6 = rhs(x6, v6, A, B, C, D, E, rs, cp, vdc)
        x = _clamp(x + h * (_B1 * f1 + _B3 * f3 + _B4 * f4 + _B5 * f5
                            + _B6 * f6), x_lo, x_hi)
        v = v + h * (_B1 * g1 + _B3 * g3 + _B4 * g4 + _B5 * g5 + _B6 * g6)
        t += h
        f1, g1 = rhs(x, v, A, B, C, D, E, rs, cp, vdc)
        ts[k + 1] = t
        xs[k + 1] = x
        vs[k + 1] = v
    return ts, xs, vs
