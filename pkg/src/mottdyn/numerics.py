"""Bracketed scalar searches shared by the analysis modules.

All searches are derivative-free: the model functions are smooth but span
many decades in x, so sign-change bracketing on prepared grids followed by
bisection (roots) or golden-section (extrema) is the robust choice.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import SolverError

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def bisect(f: Callable[[float], float], a: float, b: float, *,
           rtol: float = 1e-12, maxiter: int = 200) -> float:
    """Root of f on [a, b] by bisection; f(a) and f(b) must differ in sign.

    ``rtol`` is relative to the interval midpoint (absolute near zero).
    """
    fa = f(a)
    fb = f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if np.sign(fa) == np.sign(fb):
        raise SolverError(f"no sign change on [{a!r}, {b!r}]")
    for _ in range(maxiter):
        m = 0.5 * (a + b)
        if abs(b - a) <= rtol * max(abs(m), rtol):
            return m
        fm = f(m)
        if fm == 0.0:
            return m
        if np.sign(fm) == np.sign(fa):
            a, fa = m, fm
        else:
            b, fb = m, fm
    return 0.5 * (a + b)


def sign_change_brackets(grid: np.ndarray,
                         values: np.ndarray) -> list[tuple[float, float]]:
    """Consecutive grid intervals over which ``values`` changes sign.

    Exact zeros are treated as degenerate brackets (a, a).
    """
    brackets: list[tuple[float, float]] = []
    v = np.asarray(values, dtype=float)
    g = np.asarray(grid, dtype=float)
    for k in range(len(g) - 1):
        if v[k] == 0.0:
            brackets.append((g[k], g[k]))
        elif v[k] * v[k + 1] < 0.0:
            brackets.append((g[k], g[k + 1]))
    if len(v) and v[-1] == 0.0:
        brackets.append((g[-1], g[-1]))
    return brackets


def refine_roots(f: Callable[[float], float], grid: np.ndarray,
                 values: np.ndarray, *, rtol: float = 1e-12,
                 dedup: float = 1e-9) -> list[float]:
    """All roots of f bracketed by sign changes on the grid, deduplicated.

    ``dedup`` is the absolute spacing below which near-coincident roots
    (tangency artifacts) collapse into one.
    """
    roots = []
    for a, b in sign_change_brackets(grid, values):
        roots.append(a if a == b else bisect(f, a, b, rtol=rtol))
    roots.sort()
    merged: list[float] = []
    for r in roots:
        if merged and abs(r - merged[-1]) <= dedup:
            merged[-1] = 0.5 * (merged[-1] + r)
        else:
            merged.append(r)
    return merged


def golden_max(f: Callable[[float], float], a: float, b: float, *,
               rtol: float = 1e-10, maxiter: int = 300) -> tuple[float, float]:
    """Location and value of a maximum of unimodal f on [a, b]."""
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc = f(c)
    fd = f(d)
    for _ in range(maxiter):
        if abs(b - a) <= rtol * max(abs(a), abs(b), rtol):
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    xm = 0.5 * (a + b)
    return xm, f(xm)


def golden_min(f: Callable[[float], float], a: float, b: float, *,
               rtol: float = 1e-10) -> tuple[float, float]:
    """Location and value of a minimum of unimodal f on [a, b]."""
    xm, fm = golden_max(lambda t: -f(t), a, b, rtol=rtol)
    return xm, -fm


def log_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """n points log-spaced on [lo, hi], endpoints included."""
    return np.exp(np.linspace(np.log(lo), np.log(hi), n))


def split_log_grid(lo: float = 1e-6, hi: float = 1.0 - 1e-6,
                   n: int = 4000) -> np.ndarray:
    """Default state grid: log-spaced in x up to 0.5, then log-spaced in
    (1 - x) from 0.5 to ``hi``.

    Resolves both the sharp low-x structure (peak near x ~ 0.006) and the
    approach to the x = 1 singularity.
    """
    half = n // 2
    left = log_grid(lo, 0.5, half)
    right = 1.0 - np.exp(np.linspace(np.log(0.5), np.log(1.0 - hi),
                                     n - half))
    return np.concatenate([left, right[1:]])


def linear_fit(x: Sequence[float], y: Sequence[float]
               ) -> tuple[float, float, float]:
    """Least-squares slope, intercept and R^2 of y against x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2
