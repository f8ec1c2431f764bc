"""Command-line front end.

Every analysis is exposed as a subcommand that computes a ResultBundle
(tables, a JSON document, optional SVG figures) and writes the selected
formats to the output directory.  Identical inputs produce byte-identical
artifacts.  Exit codes: 0 success, 1 computation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import dynamics, pa_circuit, small_signal, steady_state
from .config import RunConfig, parse_config
from .device import DEVICE_PRESETS, derive_coefficients
from .errors import MottDynError
from .model import kinetic_current, kinetic_voltage
from .numerics import log_grid, split_log_grid
from .svgfig import render_figure
from .tables import Table, json_ready

_COMMANDS = {}


def _command(name):
    def wrap(fn):
        _COMMANDS[name] = fn
        return fn
    return wrap


@dataclass
class ResultBundle:
    """Everything a subcommand produced, before any file is written."""

    command: str
    inputs: dict
    tables: list[Table] = field(default_factory=list)
    json_doc: dict | None = None
    figures: dict[str, bytes] = field(default_factory=dict)


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--device", default="default",
                        choices=sorted(DEVICE_PRESETS),
                        help="built-in device size preset")
    common.add_argument("--config", default=None, metavar="PATH",
                        help="key=value configuration file")
    common.add_argument("--out-dir", default=None, metavar="DIR",
                        help="output directory (default from config)")
    common.add_argument("--out", default=None, metavar="FILE",
                        help="write the primary artifact to this one file")
    common.add_argument("--format", default=None, metavar="LIST",
                        help="comma list from csv,json,svg")
    common.add_argument("--jobs", type=int, default=None, metavar="N",
                        help="max concurrent sweep workers")
    common.add_argument("--rs", type=float, default=None,
                        help="series resistance (ohm)")
    common.add_argument("--cp", type=float, default=None,
                        help="parallel capacitance (F)")
    common.add_argument("--vdc", type=float, default=None,
                        help="DC bias voltage (V)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="mottdyn",
        description="VO2 Mott memristor model and dynamics analyses "
                    "(strict SI units throughout)")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("pop", parents=[common],
                   help="power-off plot: state rate at zero current")

    p = sub.add_parser("dynamic-route", parents=[common],
                       help="state rate against x at constant drive levels")
    p.add_argument("--mode", choices=("current", "voltage"),
                   default="current")
    p.add_argument("--levels", required=True,
                   help="comma list of drive levels (A or V)")

    sub.add_parser("dc-locus", parents=[common],
                   help="steady-state locus and critical currents")
    sub.add_parser("saddle-node", parents=[common],
                   help="voltage-driven saddle-node bifurcation point")

    p = sub.add_parser("linearize", parents=[common],
                       help="linear-term coefficients at a bias current")
    p.add_argument("--iq", type=float, required=True,
                   help="steady-state current (A)")

    p = sub.add_parser("pole-zero", parents=[common],
                       help="impedance pole/zero and activity class")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--iq", type=float, help="single current (A)")
    group.add_argument("--sweep", action="store_true",
                       help="sweep the configured current grid")

    p = sub.add_parser("nyquist", parents=[common],
                       help="impedance frequency response at one current")
    p.add_argument("--iq", type=float, required=True)

    sub.add_parser("rez-map", parents=[common],
                   help="Re Z over the current/frequency grid")

    p = sub.add_parser("scaling", parents=[common],
                       help="active-band apex against channel radius")
    p.add_argument("--radii", default=None,
                   help="comma list of channel radii (m); default 5-60 nm")

    sub.add_parser("pa-fixed-points", parents=[common],
                   help="oscillator fixed points and their classes")

    p = sub.add_parser("pa-trdet-sweep", parents=[common],
                       help="trace-determinant locus along a parameter")
    p.add_argument("--vary", choices=("rs", "cp", "vdc"), required=True)
    p.add_argument("--from", dest="lo", type=float, required=True)
    p.add_argument("--to", dest="hi", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--log", action="store_true",
                   help="log-spaced parameter values")

    p = sub.add_parser("pa-critical", parents=[common],
                       help="critical parameter value (center condition)")
    p.add_argument("--vary", choices=("rs", "cp", "vdc"), required=True)

    sub.add_parser("nullclines", parents=[common],
                   help="nullclines, fixed points, direction field")

    p = sub.add_parser("simulate", parents=[common],
                       help="integrate one orbit of the oscillator")
    p.add_argument("--x0", type=float, default=0.1)
    p.add_argument("--v0", type=float, default=0.39)
    p.add_argument("--horizon", type=float, default=None,
                   help="integration time (s); default 200 Rs Cp")

    p = sub.add_parser("portrait", parents=[common],
                       help="classify orbits from an initial-condition grid")
    p.add_argument("--grid", default="18x18", metavar="NxM")
    p.add_argument("--horizon", type=float, default=None)

    p = sub.add_parser("bif-sweep", parents=[common],
                       help="numerical bifurcation diagram over a parameter")
    p.add_argument("--vary", choices=("rs", "cp", "vdc"), required=True)
    p.add_argument("--from", dest="lo", type=float, required=True)
    p.add_argument("--to", dest="hi", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--log", action="store_true")
    p.add_argument("--horizon", type=float, default=None)
    p.add_argument("--no-refine", action="store_true",
                   help="skip onset bisection refinement")
    return parser


def _load_config(args) -> RunConfig:
    overrides = {}
    for key in ("rs", "cp", "vdc"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[f"circuit.{key}"] = value
    if args.out_dir is not None:
        overrides["output.out_dir"] = args.out_dir
    if args.format is not None:
        overrides["output.formats"] = args.format
    return parse_config(args.config, device=args.device,
                        overrides=overrides)


def _echo(args, cfg: RunConfig) -> dict:
    return {
        "device": {"r_ch_m": cfg.device.r_ch, "L_ch_m": cfg.device.L_ch},
        "circuit": {"rs_ohm": cfg.circuit.rs, "cp_F": cfg.circuit.cp,
                    "vdc_V": cfg.circuit.vdc},
    }


def _parse_levels(raw: str) -> list[float]:
    try:
        return [float(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise MottDynError(f"cannot parse level list {raw!r}") from None


@_command("pop")
def _cmd_pop(args, cfg: RunConfig) -> ResultBundle:
    c = derive_coefficients(cfg.device)
    g = cfg.grids
    xs = split_log_grid(g.x_min, g.x_max, min(g.x_points, 2000))
    rates = kinetic_current(xs, 0.0, c)
    table = Table("route", ["x", "level", "rate_per_s"])
    for x, r in zip(xs, rates):
        table.add(float(x), 0.0, float(r))
    return ResultBundle("pop", _echo(args, cfg), tables=[table],
                        json_doc={"max_rate_per_s": float(np.max(rates))},
                        figures={"figure": render_figure(
                            "pop", {"route": table})})


@_command("dynamic-route")
def _cmd_dynamic_route(args, cfg: RunConfig) -> ResultBundle:
    c = derive_coefficients(cfg.device)
    g = cfg.grids
    xs = split_log_grid(g.x_min, g.x_max, min(g.x_points, 2000))
    table = Table("route", ["x", "level", "rate_per_s"])
    for level in _parse_levels(args.levels):
        if args.mode == "current":
            rates = kinetic_current(xs, level, c)
        else:
            rates = kinetic_voltage(xs, level, c)
        for x, r in zip(xs, rates):
            table.add(float(x), float(level), float(r))
    return ResultBundle("dynamic-route", _echo(args, cfg), tables=[table],
                        json_doc={"mode": args.mode,
                                  "levels": _parse_levels(args.levels)},
                        figures={"figure": render_figure(
                            "dynamic-route", {"route": table})})


@_command("dc-locus")
def _cmd_dc_locus(args, cfg: RunConfig) -> ResultBundle:
    c = derive_coefficients(cfg.device)
    g = cfg.grids
    locus = steady_state.dc_locus(c, split_log_grid(g.x_min, g.x_max,
                                                    g.x_points))
    i_c1, i_c2 = steady_state.critical_currents(locus)
    table = Table("locus", ["x_q", "i_q_A", "v_q_V", "r_ch_ohm"])
    for k in range(len(locus)):
        table.add(float(locus.x_q[k]), float(locus.i_q[k]),
                  float(locus.v_q[k]), float(locus.r_q[k]))
    return ResultBundle("dc-locus", _echo(args, cfg), tables=[table],
                        json_doc={"i_c1_A": i_c1, "i_c2_A": i_c2},
                        figures={"figure": render_figure(
                            "dc-locus", {"locus": table})})


@_command("saddle-node")
def _cmd_saddle_node(args, cfg: RunConfig) -> ResultBundle:
    c = derive_coefficients(cfg.device)
    res = steady_state.saddle_node_voltage(c)
    doc = {"v_star_V": res.v_star,
           "roots": [{"x": x, "stability": s} for x, s in res.root_pairs],
           "root_count": {"below": res.roots_below, "at": res.roots_at,
                          "above": res.roots_above}}
    return ResultBundle("saddle-node", _echo(args, cfg), json_doc=doc)


@_command("linearize")
def _cmd_linearize(args, cfg: RunConfig) -> ResultBundle:
    c = derive_coefficients(cfg.device)
    q = steady_state.state_at_current(args.iq, c)
    lc = small_signal.linearize(q, c)
    ve = small_signal.virtual_elements(lc)
    doc = {"x_q": q.x_q, "i_q_A": q.i_q, "v_q_V": q.v_q,
           "a11_V": lc.a11, "a12_ohm": lc.a12, "b11_per_s": lc.b11,
           "b12_per_s_per_A": lc.b12, "r1_ohm": ve.r1, "r2_ohm": ve.r2,
           "c1_F": ve.c1}
    return ResultBundle("linearize", _echo(args, cfg), json_doc=doc)


@_command("pole-zero")
def _cmd_pole_zero(args, cfg: RunConfig) -> ResultBundle:
    c = derive_coefficients(cfg.device)
    if args.iq is not None:
        q = steady_state.state_at_current(args.iq, c)
        pz = small_signal.pole_zero(q, c)
        doc = {"x_q": q.x_q, "i_q_A": q.i_q, "p_per_s": pz.p,
               "z_per_s": pz.z, "k_ohm": pz.k,
               "activity_class": pz.activity_class}
        return ResultBundle("pole-zero", _echo(args, cfg), json_doc=doc)
    g = cfg.grids
    table = Table("pole_zero", ["i_q_A", "x_q", "p_per_s", "z_per_s",
                                "k_ohm", "activity_class"])
    transitions = []
    previous = None
    for i_q in log_grid(g.i_min, g.i_max, g.i_points):
        q = steady_state.state_at_current(float(i_q), c)
        pz = small_signal.pole_zero(q, c)
        table.add(q.i_q, q.x_q, pz.p, pz.z, pz.k, pz.activity_class)
        if previous and previous != pz.activity_class:
            transitions.append({"i_q_A": q.i_q, "from": previous,
                                "to": pz.activity_class})
        previous = pz.activity_class
    return ResultBundle("pole-zero", _echo(args, cfg), tables=[table],
                        json_doc={"transitions": transitions},
                        figures={"figure": render_figure(
                            "pole-zero", {"pole_zero": table})})


@_command("nyquist")
def _cmd_nyquist(args, cfg: RunConfig) -> ResultBundle:
    c = derive_coefficients(cfg.device)
    g = cfg.grids
    q = steady_state.state_at_current(args.iq, c)
    freqs = log_grid(g.f_min, g.f_max, g.f_points)
    sample = small_signal.impedance(q, 2.0 * np.pi * freqs, c)
    table = Table("impedance", ["f_Hz", "re_z_ohm", "im_z_ohm"])
    for f, re, im in zip(freqs, sample.re, sample.im):
        table.add(float(f), float(re), float(im))
    zero_f = small_signal.impedance(q, 0.0, c)
    lc = small_signal.linearize(q, c)
    w_max = small_signal.max_active_frequency(q, c)
    doc = {"i_q_A": q.i_q, "x_q": q.x_q,
           "re_z_zero_f_ohm": float(zero_f.re),
           "re_z_high_f_ohm": lc.a12,
           "f_max_Hz": (w_max / (2.0 * np.pi)) if w_max else None,
           "f_peak_Hz": small_signal.imz_peak_frequency(q, c)}
    return ResultBundle("nyquist", _echo(args, cfg), tables=[table],
                        json_doc=doc,
                        figures={"figure": render_figure(
                            "nyquist", {"impedance": table})})


@_command("rez-map")
def _cmd_rez_map(args, cfg: RunConfig) -> ResultBundle:
    c = derive_coefficients(cfg.device)
    g = cfg.grids
    result = small_signal.rez_map(log_grid(g.i_min, g.i_max, g.i_points),
                                  log_grid(g.f_min, g.f_max, g.f_points),
                                  c)
    table = Table("map", ["i_q_A", "f_Hz", "re_z_ohm"])
    for j, f in enumerate(result.f_grid):
        for k, i_q in enumerate(result.i_grid):
            table.add(float(i_q), float(f), float(result.rez[j, k]))
    contour = Table("contour", ["segment", "i_q_A", "f_Hz"])
    for seg, line in enumerate(result.contour):
        for i_q, f in line:
            contour.add(seg, float(i_q), float(f))
    apex_i, apex_f = result.apex
    return ResultBundle("rez-map", _echo(args, cfg),
                        tables=[table, contour],
                        json_doc={"apex_i_A": apex_i, "apex_f_Hz": apex_f},
                        figures={"figure": render_figure(
                            "rez-map", {"map": table, "contour": contour})})


@_command("scaling")
def _cmd_scaling(args, cfg: RunConfig) -> ResultBundle:
    if args.radii:
        radii = _parse_levels(args.radii)
    else:
        radii = [r * 1e-9 for r in (5, 10, 15, 20, 25, 30, 36, 40, 45,
                                    50, 55, 60)]
    study = small_signal.scaling_study(radii, cfg.device)
    table = Table("scaling", ["r_ch_m", "f_max_Hz", "i_at_apex_A"])
    for rec in study.records:
        table.add(rec.r_ch, rec.f_max, rec.i_at_apex)
    doc = {"slope_A_per_m": study.slope, "intercept_A": study.intercept,
           "r_squared": study.r_squared}
    return ResultBundle("scaling", _echo(args, cfg), tables=[table],
                        json_doc=doc,
                        figures={"figure": render_figure(
                            "scaling", {"scaling": table})})


def _op_row(op) -> dict:
    return {"x_q": op.x_q, "v_q": op.v_q, "class_id": op.trdet_class,
            "class_name": op.class_name, "tr": op.tr, "det": op.det,
            "eig_re": op.eig_plus.real, "eig_im": op.eig_plus.imag}


@_command("pa-fixed-points")
def _cmd_pa_fixed_points(args, cfg: RunConfig) -> ResultBundle:
    c = derive_coefficients(cfg.device)
    points = pa_circuit.pa_fixed_points(cfg.circuit, c)
    table = Table("fixed_points",
                  ["x_q", "v_q_V", "i_q_A", "class_id", "class_name",
                   "tr_per_s", "det_per_s2", "eig_re_per_s",
                   "eig_im_per_s", "linearization_reliable"])
    for op in points:
        table.add(op.x_q, op.v_q, op.i_q, op.trdet_class, op.class_name,
                  op.tr, op.det, op.eig_plus.real, op.eig_plus.imag,
                  op.linearization_reliable)
    return ResultBundle("pa-fixed-points", _echo(args, cfg),
                        tables=[table],
                        json_doc={"fixed_points":
                                  [_op_row(op) for op in points]})


@_command("pa-trdet-sweep")
def _cmd_pa_trdet_sweep(args, cfg: RunConfig) -> ResultBundle:
    c = derive_coefficients(cfg.device)
    values = (log_grid(args.lo, args.hi, args.steps) if args.log
              else np.linspace(args.lo, args.hi, args.steps))
    branches = pa_circuit.trdet_sweep(args.vary, values, cfg.circuit, c)
    table = Table("trdet", ["branch", "value", "x_q", "v_q_V", "tr_per_s",
                            "det_per_s2", "class_id", "class_name"])
    for br in branches:
        for value, op in zip(br.values, br.points):
            table.add(br.branch_id, value, op.x_q, op.v_q, op.tr, op.det,
                      op.trdet_class, op.class_name)
    return ResultBundle("pa-trdet-sweep", _echo(args, cfg), tables=[table],
                        json_doc={"parameter": args.vary,
                                  "n_branches": len(branches)},
                        figures={"figure": render_figure(
                            "trdet", {"trdet": table})})


@_command("pa-critical")
def _cmd_pa_critical(args, cfg: RunConfig) -> ResultBundle:
    c = derive_coefficients(cfg.device)
    value = pa_circuit.critical_parameter(args.vary, cfg.circuit, c)
    hopf = pa_circuit.hopf_conditions(args.vary, value, cfg.circuit, c)
    doc = {"parameter": args.vary, "critical_value": value,
           "hopf": {"nonhyperbolic": hopf.nonhyperbolic,
                    "beta_rad_per_s": hopf.beta,
                    "d_re_eig": hopf.d}}
    return ResultBundle("pa-critical", _echo(args, cfg), json_doc=doc)


@_command("nullclines")
def _cmd_nullclines(args, cfg: RunConfig) -> ResultBundle:
    c = derive_coefficients(cfg.device)
    ns = pa_circuit.nullclines(cfg.circuit, c)
    tx = Table("x_nullcline", ["x", "v_V"])
    for x, v in ns.x_nullcline:
        tx.add(float(x), float(v))
    tv = Table("v_nullcline", ["x", "v_V"])
    for x, v in ns.v_nullcline:
        tv.add(float(x), float(v))
    tf = Table("fixed_points", ["x_q", "v_q_V", "class_id", "class_name"])
    for op in ns.fixed_points:
        tf.add(op.x_q, op.v_q, op.trdet_class, op.class_name)
    td = Table("direction_field", ["x", "v_V", "sign_dxdt", "sign_dvdt"])
    for x, v, sx, sv in ns.region_signs:
        td.add(float(x), float(v), float(sx), float(sv))
    figure = render_figure("nullclines",
                           {"x_nullcline": tx, "v_nullcline": tv,
                            "fixed_points": tf, "direction_field": td})
    return ResultBundle("nullclines", _echo(args, cfg),
                        tables=[tx, tv, tf, td],
                        json_doc={"fixed_points":
                                  [_op_row(op) for op in ns.fixed_points]},
                        figures={"figure": figure})


@_command("simulate")
def _cmd_simulate(args, cfg: RunConfig) -> ResultBundle:
    c = derive_coefficients(cfg.device)
    circ = cfg.circuit
    horizon = args.horizon or max(200.0 * circ.rs * circ.cp, 1e-6)
    traj = dynamics.integrate((args.x0, args.v0), circ, c, horizon)
    verdict = dynamics.detect_limit_cycle(traj)
    table = Table("trajectory", ["t_s", "x", "v_V"])
    for t, x, v in zip(traj.t, traj.x, traj.v):
        table.add(float(t), float(x), float(v))
    doc = {"status": traj.status, "accepted_steps": traj.accepted,
           "rejected_steps": traj.rejected,
           "saturated_time_s": traj.saturated_time,
           "final_x": traj.final_state[0],
           "final_v_V": traj.final_state[1]}
    if isinstance(verdict, dynamics.LimitCycle):
        doc.update({"kind": "limit_cycle", "period_s": verdict.period,
                    "period_rel_std": verdict.period_rel_std})
    elif isinstance(verdict, dynamics.FixedPointVerdict):
        doc.update({"kind": "fixed_point", "x_q": verdict.x,
                    "v_q_V": verdict.v})
    else:
        doc.update({"kind": "inconclusive", "reason": verdict.reason})
    orbit = Table("cycle", ["x", "v_V"])
    stride = max(1, len(traj.t) // 4000)
    for x, v in zip(traj.x[::stride], traj.v[::stride]):
        orbit.add(float(x), float(v))
    return ResultBundle("simulate", _echo(args, cfg), tables=[table],
                        json_doc=doc,
                        figures={"orbit": render_figure(
                            "portrait", {"cycle": orbit})})


@_command("portrait")
def _cmd_portrait(args, cfg: RunConfig) -> ResultBundle:
    c = derive_coefficients(cfg.device)
    circ = cfg.circuit
    try:
        nx, nv = (int(part) for part in args.grid.lower().split("x"))
    except ValueError:
        raise MottDynError(f"bad grid spec {args.grid!r}; want NxM") \
            from None
    ics = dynamics.portrait_grid(nx, nv, circ.vdc)
    result = dynamics.phase_portrait(ics, circ, c, horizon=args.horizon,
                                     jobs=args.jobs)
    table = Table("orbits", ["x0", "v0_V", "kind", "period_s", "x_min",
                             "x_max", "v_min_V", "v_max_V"])
    for o in result.orbits:
        table.add(o.x0, o.v0, o.kind,
                  o.period if o.period is not None else float("nan"),
                  o.x_min, o.x_max, o.v_min, o.v_max)
    doc = {"n_orbits": len(result.orbits),
           "n_limit_cycle": sum(1 for o in result.orbits
                                if o.kind == "limit_cycle"),
           "period_mean_s": result.period_mean,
           "period_spread_rel": result.period_spread_rel}
    figures = {}
    if result.example_cycle is not None:
        cyc = Table("cycle", ["x", "v_V"])
        for x, v in result.example_cycle:
            cyc.add(float(x), float(v))
        figures["figure"] = render_figure("portrait",
                                          {"cycle": cyc, "orbits": table})
    return ResultBundle("portrait", _echo(args, cfg), tables=[table],
                        json_doc=doc, figures=figures)


@_command("bif-sweep")
def _cmd_bif_sweep(args, cfg: RunConfig) -> ResultBundle:
    c = derive_coefficients(cfg.device)
    values = (log_grid(args.lo, args.hi, args.steps) if args.log
              else np.linspace(args.lo, args.hi, args.steps))
    diagram = dynamics.bifurcation_sweep(
        args.vary, values, cfg.circuit, c, horizon=args.horizon,
        refine=not args.no_refine, jobs=args.jobs)
    table = Table("sweep", ["value", "kind", "x_min", "x_max", "v_min_V",
                            "v_max_V", "t_lc_s"])
    for pt in diagram.points:
        table.add(pt.value, pt.kind, pt.x_min, pt.x_max, pt.v_min,
                  pt.v_max,
                  pt.t_lc if pt.t_lc is not None else float("nan"))
    doc = {"parameter": diagram.parameter,
           "onsets": [{"lower": o.lower, "upper": o.upper,
                       "value": o.value, "rising": o.rising,
                       "verified": o.verified} for o in diagram.onsets]}
    return ResultBundle("bif-sweep", _echo(args, cfg), tables=[table],
                        json_doc=doc,
                        figures={"figure": render_figure(
                            "bifurcation", {"sweep": table})})


def run_command(argv: list[str]) -> ResultBundle:
    """Parse argv, execute the subcommand and return its bundle.

    Raises SystemExit(2) on usage errors and MottDynError on
    computation failures; writes nothing to disk.
    """
    args = build_parser().parse_args(argv)
    cfg = _load_config(args)
    return _COMMANDS[args.command](args, cfg)


def write_bundle(bundle: ResultBundle, cfg: RunConfig,
                 out_file: str | None = None) -> list[str]:
    """Write the selected formats; returns the paths written."""
    out_dir = cfg.output.out_dir
    os.makedirs(out_dir, exist_ok=True)
    written = []

    def emit(path: str, payload: bytes) -> None:
        with open(path, "wb") as fh:
            fh.write(payload)
        written.append(path)

    if out_file is not None:
        if bundle.tables:
            emit(out_file, bundle.tables[0].to_csv().encode())
        elif bundle.json_doc is not None:
            doc = json_ready({"command": bundle.command,
                              "inputs": bundle.inputs,
                              **bundle.json_doc})
            emit(out_file, (json.dumps(doc, indent=2, sort_keys=True)
                            + "\n").encode())
        return written

    formats = cfg.output.formats
    if "csv" in formats:
        for table in bundle.tables:
            emit(os.path.join(out_dir,
                              f"{bundle.command}_{table.name}.csv"),
                 table.to_csv().encode())
    if "json" in formats and bundle.json_doc is not None:
        doc = json_ready({"command": bundle.command,
                          "inputs": bundle.inputs, **bundle.json_doc})
        emit(os.path.join(out_dir, f"{bundle.command}.json"),
             (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode())
    if "svg" in formats:
        for name, payload in bundle.figures.items():
            emit(os.path.join(out_dir, f"{bundle.command}_{name}.svg"),
                 payload)
    return written


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        cfg = _load_config(args)
        bundle = _COMMANDS[args.command](args, cfg)
        paths = write_bundle(bundle, cfg, args.out)
        for path in paths:
            print(path)
        return 0
    except MottDynError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
