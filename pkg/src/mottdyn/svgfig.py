"""Hand-rolled deterministic SVG rendering for the analysis figures.

No plotting library is used: identical inputs must produce byte-identical
files, so the canvas size, fonts, tick synthesis, color mapping and
element ordering are all fixed here.  Supported figure kinds mirror the
analyses: line plots (power-off plot, dynamic routes, loci, Nyquist,
bifurcation branches), color maps with a zero contour, the
trace-determinant plane, nullclines with a direction field, and phase
portraits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import RenderError
from .tables import Table

_W, _H = 720, 540
_ML, _MR, _MT, _MB = 78, 24, 40, 58
_FONT = "font-family=\"DejaVu Sans, sans-serif\""

PALETTE = ("#1f6fb4", "#c23b22", "#2e8b57", "#8a2be2", "#b8860b",
           "#d45087", "#2f4b7c", "#665191")


def _f(v: float) -> str:
    return f"{v:.2f}"


def _nice_ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 0.5 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _log_ticks(lo: float, hi: float) -> list[float]:
    lo_e = math.ceil(math.log10(lo) - 1e-12)
    hi_e = math.floor(math.log10(hi) + 1e-12)
    return [10.0 ** e for e in range(lo_e, hi_e + 1)]


def _tick_label(v: float) -> str:
    if v == 0.0:
        return "0"
    a = abs(v)
    if 1e-3 <= a < 1e4:
        s = f"{v:.6g}"
    else:
        s = f"{v:.2e}"
    return s


@dataclass
class Figure:
    """Fixed-canvas figure; elements render in insertion order."""

    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    xscale: str = "linear"
    yscale: str = "linear"
    _elements: list[str] = field(default_factory=list)
    _xdata: list[float] = field(default_factory=list)
    _ydata: list[float] = field(default_factory=list)
    _xlim: tuple[float, float] | None = None
    _ylim: tuple[float, float] | None = None

    def set_xlim(self, lo: float, hi: float) -> None:
        self._xlim = (lo, hi)

    def set_ylim(self, lo: float, hi: float) -> None:
        self._ylim = (lo, hi)

    def _track(self, xs, ys) -> None:
        for x in xs:
            if math.isfinite(x) and (self.xscale != "log" or x > 0):
                self._xdata.append(float(x))
        for y in ys:
            if math.isfinite(y) and (self.yscale != "log" or y > 0):
                self._ydata.append(float(y))

    def _limits(self):
        def expand(data, lim, scale):
            if lim is not None:
                return lim
            if not data:
                raise RenderError("no finite data to autoscale")
            lo, hi = min(data), max(data)
            if scale == "log":
                pad = (hi / lo) ** 0.05 if hi > lo else 2.0
                return lo / pad, hi * pad
            pad = 0.05 * (hi - lo) if hi > lo else max(abs(hi), 1.0) * 0.1
            return lo - pad, hi + pad

        return (expand(self._xdata, self._xlim, self.xscale),
                expand(self._ydata, self._ylim, self.yscale))

    def _mapper(self):
        (x0, x1), (y0, y1) = self._limits()

        def tx(v: float) -> float:
            if self.xscale == "log":
                v, a, b = math.log10(max(v, 1e-300)), math.log10(x0), \
                    math.log10(x1)
            else:
                a, b = x0, x1
            return _ML + (_W - _ML - _MR) * (v - a) / (b - a)

        def ty(v: float) -> float:
            if self.yscale == "log":
                v, a, b = math.log10(max(v, 1e-300)), math.log10(y0), \
                    math.log10(y1)
            else:
                a, b = y0, y1
            return _H - _MB - (_H - _MT - _MB) * (v - a) / (b - a)

        return tx, ty, (x0, x1), (y0, y1)

    def polyline(self, xs, ys, color: str = PALETTE[0],
                 width: float = 1.5, dashed: bool = False) -> None:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if len(xs) != len(ys) or len(xs) == 0:
            raise RenderError("polyline needs equal, non-empty coordinates")
        self._track(xs, ys)
        dash = " stroke-dasharray=\"6 4\"" if dashed else ""
        self._elements.append(("polyline", xs, ys, color, width, dash))

    def scatter(self, xs, ys, color: str = PALETTE[1], radius: float = 3.0,
                open_marker: bool = False) -> None:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        self._track(xs, ys)
        self._elements.append(("scatter", xs, ys, color, radius,
                               open_marker))

    def arrows(self, xs, ys, us, vs, color: str = "#666666",
               length: float = 9.0) -> None:
        """Fixed-length direction glyphs at (xs, ys) pointing along
        (us, vs) in data space (direction only; magnitude is discarded)."""
        self._elements.append(("arrows", np.asarray(xs, float),
                               np.asarray(ys, float),
                               np.asarray(us, float),
                               np.asarray(vs, float), color, length))
        self._track(xs, ys)

    def heatmap(self, xs, ys, z: np.ndarray) -> None:
        """Diverging color cells (blue negative, red positive) for
        z[j, k] at (xs[k], ys[j])."""
        xs = np.asarray(xs, float)
        ys = np.asarray(ys, float)
        z = np.asarray(z, float)
        if z.shape != (len(ys), len(xs)):
            raise RenderError("heatmap shape mismatch")
        self._track(xs, ys)
        self._elements.append(("heatmap", xs, ys, z))

    @staticmethod
    def _diverging_color(t: float) -> str:
        # t in [-1, 1]: blue -> white -> red
        t = max(-1.0, min(1.0, t))
        if t < 0:
            f = 1.0 + t
            r, g, b = int(31 + (255 - 31) * f), int(111 + (255 - 111) * f), \
                int(180 + (255 - 180) * f)
        else:
            f = 1.0 - t
            r, g, b = int(194 + (255 - 194) * f), int(59 + (255 - 59) * f), \
                int(34 + (255 - 34) * f)
        return f"#{r:02x}{g:02x}{b:02x}"

    def _render_element(self, el, tx, ty) -> list[str]:
        kind = el[0]
        out = []
        if kind == "polyline":
            _, xs, ys, color, width, dash = el
            pts = " ".join(f"{_f(tx(x))},{_f(ty(y))}"
                           for x, y in zip(xs, ys)
                           if math.isfinite(x) and math.isfinite(y))
            out.append(f"<polyline points=\"{pts}\" fill=\"none\" "
                       f"stroke=\"{color}\" stroke-width=\"{width}\""
                       f"{dash}/>")
        elif kind == "scatter":
            _, xs, ys, color, radius, open_marker = el
            fill = "none" if open_marker else color
            stroke = f" stroke=\"{color}\"" if open_marker else ""
            for x, y in zip(xs, ys):
                out.append(f"<circle cx=\"{_f(tx(x))}\" cy=\"{_f(ty(y))}\" "
                           f"r=\"{radius}\" fill=\"{fill}\"{stroke}/>")
        elif kind == "arrows":
            _, xs, ys, us, vs, color, length = el
            for x, y, u, v in zip(xs, ys, us, vs):
                cx, cy = tx(x), ty(y)
                # direction in pixel space (y flips sign)
                norm = math.hypot(u, -v)
                if norm == 0.0:
                    continue
                dx, dy = length * u / norm, length * (-v) / norm
                x1, y1 = cx - dx / 2, cy - dy / 2
                x2, y2 = cx + dx / 2, cy + dy / 2
                hx, hy = x2 - 0.35 * (dx - dy * 0.6), \
                    y2 - 0.35 * (dy + dx * 0.6)
                kx, ky = x2 - 0.35 * (dx + dy * 0.6), \
                    y2 - 0.35 * (dy - dx * 0.6)
                out.append(f"<line x1=\"{_f(x1)}\" y1=\"{_f(y1)}\" "
                           f"x2=\"{_f(x2)}\" y2=\"{_f(y2)}\" "
                           f"stroke=\"{color}\" stroke-width=\"1\"/>")
                out.append(f"<polyline points=\"{_f(hx)},{_f(hy)} "
                           f"{_f(x2)},{_f(y2)} {_f(kx)},{_f(ky)}\" "
                           f"fill=\"none\" stroke=\"{color}\" "
                           f"stroke-width=\"1\"/>")
        elif kind == "heatmap":
            _, xs, ys, z = el
            scale = float(np.max(np.abs(z))) or 1.0

            def edges(vals):
                mids = 0.5 * (vals[1:] + vals[:-1])
                first = vals[0] - (mids[0] - vals[0])
                last = vals[-1] + (vals[-1] - mids[-1])
                return np.concatenate([[first], mids, [last]])

            ex, ey = edges(xs), edges(ys)
            for j in range(len(ys)):
                for k in range(len(xs)):
                    x1, x2 = tx(ex[k]), tx(ex[k + 1])
                    y1, y2 = ty(ey[j + 1]), ty(ey[j])
                    color = self._diverging_color(z[j, k] / scale)
                    out.append(
                        f"<rect x=\"{_f(x1)}\" y=\"{_f(y1)}\" "
                        f"width=\"{_f(x2 - x1)}\" "
                        f"height=\"{_f(y2 - y1)}\" fill=\"{color}\"/>")
        return out

    def to_bytes(self) -> bytes:
        tx, ty, (x0, x1), (y0, y1) = self._mapper()
        parts = [
            f"<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{_W}\" "
            f"height=\"{_H}\" viewBox=\"0 0 {_W} {_H}\">",
            f"<rect width=\"{_W}\" height=\"{_H}\" fill=\"#ffffff\"/>",
        ]
        # clip plot area content
        parts.append(f"<clipPath id=\"plot\"><rect x=\"{_ML}\" y=\"{_MT}\" "
                     f"width=\"{_W - _ML - _MR}\" "
                     f"height=\"{_H - _MT - _MB}\"/></clipPath>")
        parts.append("<g clip-path=\"url(#plot)\">")
        for el in self._elements:
            parts.extend(self._render_element(el, tx, ty))
        parts.append("</g>")
        # frame
        parts.append(f"<rect x=\"{_ML}\" y=\"{_MT}\" "
                     f"width=\"{_W - _ML - _MR}\" "
                     f"height=\"{_H - _MT - _MB}\" fill=\"none\" "
                     f"stroke=\"#000000\"/>")
        xticks = _log_ticks(x0, x1) if self.xscale == "log" \
            else _nice_ticks(x0, x1)
        yticks = _log_ticks(y0, y1) if self.yscale == "log" \
            else _nice_ticks(y0, y1)
        for v in xticks:
            px = tx(v)
            if px < _ML - 0.5 or px > _W - _MR + 0.5:
                continue
            parts.append(f"<line x1=\"{_f(px)}\" y1=\"{_H - _MB}\" "
                         f"x2=\"{_f(px)}\" y2=\"{_H - _MB + 5}\" "
                         f"stroke=\"#000000\"/>")
            parts.append(f"<text x=\"{_f(px)}\" y=\"{_H - _MB + 18}\" "
                         f"{_FONT} font-size=\"11\" text-anchor=\"middle\">"
                         f"{_tick_label(v)}</text>")
        for v in yticks:
            py = ty(v)
            if py < _MT - 0.5 or py > _H - _MB + 0.5:
                continue
            parts.append(f"<line x1=\"{_ML - 5}\" y1=\"{_f(py)}\" "
                         f"x2=\"{_ML}\" y2=\"{_f(py)}\" "
                         f"stroke=\"#000000\"/>")
            parts.append(f"<text x=\"{_ML - 8}\" y=\"{_f(py + 4)}\" "
                         f"{_FONT} font-size=\"11\" text-anchor=\"end\">"
                         f"{_tick_label(v)}</text>")
        if self.title:
            parts.append(f"<text x=\"{_W // 2}\" y=\"24\" {_FONT} "
                         f"font-size=\"14\" text-anchor=\"middle\">"
                         f"{self.title}</text>")
        if self.xlabel:
            parts.append(f"<text x=\"{_W // 2}\" y=\"{_H - 16}\" {_FONT} "
                         f"font-size=\"12\" text-anchor=\"middle\">"
                         f"{self.xlabel}</text>")
        if self.ylabel:
            parts.append(f"<text x=\"18\" y=\"{_H // 2}\" {_FONT} "
                         f"font-size=\"12\" text-anchor=\"middle\" "
                         f"transform=\"rotate(-90 18 {_H // 2})\">"
                         f"{self.ylabel}</text>")
        parts.append("</svg>")
        return "\n".join(parts).encode("utf-8")


def _require_columns(table: Table, *names: str) -> None:
    for name in names:
        if name not in table.columns:
            raise RenderError(
                f"table {table.name!r} lacks column {name!r} "
                f"(has {table.columns})")
    if not table.rows:
        raise RenderError(f"table {table.name!r} is empty")


def _series(table: Table, name: str) -> np.ndarray:
    return np.asarray(table.column(name), dtype=float)


def render_figure(kind: str, tables: dict[str, Table]) -> bytes:
    """Render one of the known figure kinds from its table schema."""
    if kind in ("pop", "dynamic-route"):
        table = tables.get("route")
        if table is None:
            raise RenderError("route figure needs a 'route' table")
        _require_columns(table, "x", "level", "rate_per_s")
        fig = Figure(title="dynamic route" if kind != "pop"
                     else "power-off plot",
                     xlabel="x", ylabel="dx/dt (1/s)", xscale="log")
        levels = sorted(set(table.column("level")))
        for idx, lev in enumerate(levels):
            rows = [(x, f) for x, l, f in table.rows if l == lev]
            fig.polyline([r[0] for r in rows], [r[1] for r in rows],
                         color=PALETTE[idx % len(PALETTE)])
        fig.polyline([min(table.column("x")), max(table.column("x"))],
                     [0.0, 0.0], color="#888888", width=1.0, dashed=True)
        return fig.to_bytes()

    if kind == "dc-locus":
        table = tables.get("locus")
        if table is None:
            raise RenderError("dc-locus figure needs a 'locus' table")
        _require_columns(table, "i_q_A", "v_q_V")
        fig = Figure(title="steady-state locus", xlabel="i_Q (A)",
                     ylabel="v_Q (V)", xscale="log")
        fig.polyline(_series(table, "i_q_A"), _series(table, "v_q_V"))
        return fig.to_bytes()

    if kind == "nyquist":
        table = tables.get("impedance")
        if table is None:
            raise RenderError("nyquist figure needs an 'impedance' table")
        _require_columns(table, "re_z_ohm", "im_z_ohm")
        fig = Figure(title="impedance locus", xlabel="Re Z (ohm)",
                     ylabel="Im Z (ohm)")
        fig.polyline(_series(table, "re_z_ohm"), _series(table, "im_z_ohm"))
        fig.polyline([0.0, 0.0], [min(_series(table, "im_z_ohm")),
                                  max(_series(table, "im_z_ohm"))],
                     color="#888888", width=1.0, dashed=True)
        return fig.to_bytes()

    if kind == "rez-map":
        table = tables.get("map")
        if table is None:
            raise RenderError("rez-map figure needs a 'map' table")
        _require_columns(table, "i_q_A", "f_Hz", "re_z_ohm")
        i_vals = np.array(sorted(set(table.column("i_q_A"))))
        f_vals = np.array(sorted(set(table.column("f_Hz"))))
        z = np.empty((len(f_vals), len(i_vals)))
        i_index = {v: k for k, v in enumerate(i_vals)}
        f_index = {v: k for k, v in enumerate(f_vals)}
        for i_q, f_hz, re_z in table.rows:
            z[f_index[f_hz], i_index[i_q]] = re_z
        fig = Figure(title="Re Z map", xlabel="i_Q (A)", ylabel="f (Hz)",
                     xscale="log", yscale="log")
        fig.heatmap(i_vals, f_vals, z)
        contour = tables.get("contour")
        if contour is not None and contour.rows:
            _require_columns(contour, "segment", "i_q_A", "f_Hz")
            for seg in sorted(set(contour.column("segment"))):
                rows = [(i, f) for s, i, f in contour.rows if s == seg]
                fig.polyline([r[0] for r in rows], [r[1] for r in rows],
                             color="#000000", width=1.2)
        return fig.to_bytes()

    if kind == "trdet":
        table = tables.get("trdet")
        if table is None:
            raise RenderError("trdet figure needs a 'trdet' table")
        _require_columns(table, "tr_per_s", "det_per_s2")
        tr = _series(table, "tr_per_s")
        det = _series(table, "det_per_s2")
        fig = Figure(title="trace-determinant plane", xlabel="tr (1/s)",
                     ylabel="det (1/s^2)")
        span = np.linspace(float(tr.min()) * 1.1 - 1.0,
                           float(tr.max()) * 1.1 + 1.0, 200)
        fig.polyline(span, span ** 2 / 4.0, color="#888888", width=1.0,
                     dashed=True)
        fig.polyline([0.0, 0.0], [min(0.0, float(det.min())),
                                  float(det.max()) * 1.1 + 1.0],
                     color="#888888", width=1.0)
        fig.polyline([span[0], span[-1]], [0.0, 0.0], color="#888888",
                     width=1.0)
        fig.scatter(tr, det)
        return fig.to_bytes()

    if kind == "nullclines":
        xt = tables.get("x_nullcline")
        vt = tables.get("v_nullcline")
        if xt is None or vt is None:
            raise RenderError("nullclines figure needs x/v nullcline tables")
        _require_columns(xt, "x", "v_V")
        _require_columns(vt, "x", "v_V")
        fig = Figure(title="nullclines", xlabel="x", ylabel="v (V)")
        fig.polyline(_series(xt, "x"), _series(xt, "v_V"),
                     color=PALETTE[3])
        fig.polyline(_series(vt, "x"), _series(vt, "v_V"),
                     color=PALETTE[4])
        arrows = tables.get("direction_field")
        if arrows is not None and arrows.rows:
            _require_columns(arrows, "x", "v_V", "sign_dxdt", "sign_dvdt")
            fig.arrows(_series(arrows, "x"), _series(arrows, "v_V"),
                       _series(arrows, "sign_dxdt"),
                       _series(arrows, "sign_dvdt"))
        fps = tables.get("fixed_points")
        if fps is not None and fps.rows:
            _require_columns(fps, "x_q", "v_q_V")
            fig.scatter(_series(fps, "x_q"), _series(fps, "v_q_V"),
                        color="#000000", radius=4.0)
        return fig.to_bytes()

    if kind == "portrait":
        table = tables.get("cycle")
        if table is None:
            raise RenderError("portrait figure needs a 'cycle' table")
        _require_columns(table, "x", "v_V")
        fig = Figure(title="phase portrait", xlabel="x", ylabel="v (V)")
        fig.polyline(_series(table, "x"), _series(table, "v_V"),
                     color=PALETTE[0], width=2.0)
        ends = tables.get("orbits")
        if ends is not None and ends.rows:
            _require_columns(ends, "x0", "v0_V")
            fig.scatter(_series(ends, "x0"), _series(ends, "v0_V"),
                        color="#aaaaaa", radius=2.0)
        return fig.to_bytes()

    if kind == "bifurcation":
        table = tables.get("sweep")
        if table is None:
            raise RenderError("bifurcation figure needs a 'sweep' table")
        _require_columns(table, "value", "v_min_V", "v_max_V")
        fig = Figure(title="bifurcation diagram", xlabel="parameter",
                     ylabel="v branches (V)")
        fig.scatter(_series(table, "value"), _series(table, "v_min_V"),
                    color=PALETTE[0], radius=2.0)
        fig.scatter(_series(table, "value"), _series(table, "v_max_V"),
                    color=PALETTE[1], radius=2.0)
        return fig.to_bytes()

    if kind == "pole-zero":
        table = tables.get("pole_zero")
        if table is None:
            raise RenderError("pole-zero figure needs a 'pole_zero' table")
        _require_columns(table, "i_q_A", "p_per_s", "z_per_s")
        fig = Figure(title="pole and zero against current",
                     xlabel="i_Q (A)", ylabel="s (1/s)", xscale="log")
        fig.polyline(_series(table, "i_q_A"), _series(table, "p_per_s"),
                     color=PALETTE[0])
        fig.polyline(_series(table, "i_q_A"), _series(table, "z_per_s"),
                     color=PALETTE[1])
        return fig.to_bytes()

    if kind == "scaling":
        table = tables.get("scaling")
        if table is None:
            raise RenderError("scaling figure needs a 'scaling' table")
        _require_columns(table, "r_ch_m", "f_max_Hz")
        fig = Figure(title="active-band apex against channel radius",
                     xlabel="r_ch (m)", ylabel="f_max (Hz)", yscale="log")
        fig.polyline(_series(table, "r_ch_m"), _series(table, "f_max_Hz"))
        fig.scatter(_series(table, "r_ch_m"), _series(table, "f_max_Hz"))
        return fig.to_bytes()

    raise RenderError(f"unknown figure kind {kind!r}")
