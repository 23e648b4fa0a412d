"""Command-line front end.

Every subcommand accepts ``--config FILE`` (YAML); flags given on the command
line override the file. Exit codes: 0 success, 2 configuration error,
3 solver error, 4 invariant or validation failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import yaml
from scipy.integrate import simpson

from nanopore1d import __version__, dissipative, inviscid, validation
from nanopore1d import fdsolver as fd
from nanopore1d.core import (
    ChargeState, CompatibilityError, Dirichlet, Grid, Neumann, ScaledSystem,
    SpeciesParams, field_energy, total_charge)
from nanopore1d.spectral import SeriesConvergenceError

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_INVALID = 0, 2, 3, 4

SOLVER_ERRORS = (fd.SolverError, SeriesConvergenceError, dissipative.PositivityError,
                 inviscid.ShockFormationError, CompatibilityError)


class ConfigError(ValueError):
    pass


# {{{ configuration

def _floats(text):
    if isinstance(text, (list, tuple)):
        return [float(t) for t in text]
    if isinstance(text, (int, float)):
        return [float(text)]
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"times: cannot parse {text!r} as a comma-separated list") from exc


COMMON_KEYS = {"out", "format", "seed", "points", "times"}
SOLVER_KEYS = {
    "exact-neumann": {"beta", "alpha", "gamma", "terms", "linear"},
    "exact-dirichlet": {"beta", "alpha", "gamma", "terms", "linear"},
    "infinite-line": {"alpha", "gamma", "beta", "xmax"},
    "inviscid": {"scenario", "alpha", "bc"},
    "fd": {"beta", "alpha", "gamma", "grid", "bc", "species", "ic", "cfl", "backend",
           "steady_tol"},
    "compare": {"exact", "beta", "alpha", "gamma", "grid", "extrapolate", "cfl"},
    "validate": {"only"},
}


def load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(f"{path}: invalid YAML{where}: "
                          f"{getattr(exc, 'problem', exc)}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping of keys to values")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def merge_config(command, args) -> dict:
    cfg = load_config(args.config) if args.config else {}
    solver = cfg.pop("solver", command)
    if solver != command:
        raise ConfigError(f"config is for solver {solver!r} but {command!r} was invoked")
    allowed = {k.replace("-", "_") for k in COMMON_KEYS | SOLVER_KEYS[command]}
    unknown = sorted(set(cfg) - allowed)
    if unknown:
        raise ConfigError(f"unknown config field(s) for {command}: {', '.join(unknown)}")
    for k, v in vars(args).items():
        if k in ("config", "command", "func"):
            continue
        if v is not None:
            cfg[k] = v
    return cfg


def resolve_beta(cfg, need_gamma=True):
    """``(beta, gamma, alpha)`` with ``beta = alpha / (4 gamma)``; inconsistent triples are rejected."""
    beta, alpha, gamma = cfg.get("beta"), cfg.get("alpha"), cfg.get("gamma")
    if gamma is None:
        gamma = 0.25 if need_gamma else None
    gamma = float(gamma) if gamma is not None else None
    if gamma is not None and gamma <= 0:
        raise ConfigError(f"gamma must be positive, got {gamma}")
    if beta is not None and alpha is not None:
        b = float(alpha) / (4 * gamma)
        if abs(b - float(beta)) > 1e-12 * max(1.0, abs(b)):
            raise ConfigError(f"beta={beta} inconsistent with alpha/(4 gamma)={b}")
    if beta is None and alpha is None:
        raise ConfigError("one of beta or alpha is required")
    beta = float(beta) if beta is not None else float(alpha) / (4 * gamma)
    if not beta > 0:
        raise ConfigError(f"beta must be positive for the point-charge series, got {beta}")
    return beta, gamma, 4 * beta * gamma


def _times(cfg, default):
    ts = _floats(cfg.get("times", default))
    if not ts:
        raise ConfigError("times: at least one time is required")
    if any(t < 0 for t in ts):
        raise ConfigError("times must be non-negative")
    return ts

# }}}


# {{{ output

def _fmt(v) -> str:
    return "%.17g" % float(v)


def write_table(path_or_none, header: dict, columns: list[str], rows) -> str:
    lines = [f"# nanopore1d {__version__}"]
    lines += [f"# {k}: {v}" for k, v in header.items()]
    lines.append("\t".join(columns))
    for row in rows:
        lines.append("\t".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path_or_none is not None:
        Path(path_or_none).write_text(text)
    return text


def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, Fraction):
        return float(o)
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return [_jsonable(v) for v in o.tolist()]
    if isinstance(o, float) and not math.isfinite(o):
        return repr(o)
    return o


def _item_text(x) -> str:
    if isinstance(x, dict):
        return "(" + " ".join(f"{k}={_item_text(v)}" for k, v in x.items()) + ")"
    if isinstance(x, (float, Fraction, np.floating)) and not isinstance(x, bool):
        return _fmt(x)
    return str(x)


def _summary_text(summary: dict, indent=0) -> str:
    out = []
    pad = "  " * indent
    for k, v in summary.items():
        if isinstance(v, dict):
            out.append(f"{pad}{k}:")
            out.append(_summary_text(v, indent + 1))
        elif isinstance(v, (list, tuple)):
            out.append(f"{pad}{k}: " + ", ".join(_item_text(x) for x in v))
        elif isinstance(v, (float, Fraction, np.floating)):
            out.append(f"{pad}{k}: {_fmt(v)}")
        else:
            out.append(f"{pad}{k}: {v}")
    return "\n".join(out)


def emit(cfg, name, header, columns, rows, summary):
    fmt = cfg.get("format", "both")
    if fmt not in ("table", "summary", "both"):
        raise ConfigError(f"format must be table, summary or both, got {fmt!r}")
    out = cfg.get("out")
    summary = {"solver": name, "version": __version__, **summary}
    if out is not None:
        outdir = Path(out)
        outdir.mkdir(parents=True, exist_ok=True)
    if fmt in ("table", "both") and columns:
        path = outdir / f"{name}_profile.tsv" if out is not None else None
        text = write_table(path, header, columns, rows)
        if out is None:
            sys.stdout.write(text)
    if fmt in ("summary", "both"):
        text = _summary_text(summary) + "\n"
        if out is not None:
            (outdir / f"{name}_summary.json").write_text(
                json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n")
            (outdir / f"{name}_summary.txt").write_text(text)
        else:
            sys.stdout.write(text)


def _label(prefix, t):
    return f"{prefix}@T={float(t):g}"

# }}}


# {{{ subcommands

def cmd_exact(cfg, kind):
    beta, gamma, alpha = resolve_beta(cfg)
    times = _times(cfg, "0.1,0.5,1")
    if min(times) <= 0:
        raise ConfigError("series solutions need T > 0")
    terms = cfg.get("terms")
    T_min = min(times)
    if kind == "neumann":
        sol = dissipative.neumann_solution(beta, gamma, terms, T_min=T_min)
    else:
        sol = dissipative.dirichlet_solution(beta, gamma, terms, T_min=T_min)
    lin = dissipative.linear_solution(kind, N=max(200, sol.N)) if cfg.get("linear") else None

    x = np.linspace(-1.0, 1.0, int(cfg.get("points", 201)))
    cols = ["x"]
    data = [x]
    charges, ends = [], []
    xg, wg = np.polynomial.legendre.leggauss(400)
    for T in times:
        cols += [_label("e", T), _label("v", T)]
        data += [sol.field(x, T), sol.density(x, T)]
        if lin is not None:
            cols.append(_label("vL", T))
            data.append(0.5 * alpha * lin.density_scaled(x, T))
        charges.append(float(sol.density(xg, T) @ wg))
        ends.append(float(sol.field(1.0, T)))

    summary = {"parameters": {"beta": beta, "gamma": gamma, "alpha": alpha,
                              "terms": sol.N, "time_variable": "T = gamma tau"},
               "times": times, "pore_charge": charges, "e_right": ends}
    status = EXIT_OK
    if kind == "neumann":
        summary["eigenvalues"] = list(sol.freqs[:min(10, sol.N)])
        drift = max(abs(c - alpha) for c in charges)
        summary["charge_ledger"] = {"max_deviation": drift, "tolerance": 1e-6}
        if drift > 1e-6:
            status = EXIT_INVALID
    else:
        summary["g"] = [sol.g(T) for T in times]
        summary["phi_ends"] = [float(max(abs(sol.potential(-1.0, T)),
                                         abs(sol.potential(1.0, T)))) for T in times]
    header = {"solver": f"exact-{kind}", "beta": _fmt(beta), "gamma": _fmt(gamma),
              "time": "T = gamma tau"}
    emit(cfg, f"exact-{kind}", header, cols, np.column_stack(data), summary)
    return status


def cmd_infinite_line(cfg):
    alpha = cfg.get("alpha")
    if alpha is None:
        if cfg.get("beta") is None:
            raise ConfigError("one of alpha or beta is required")
    beta, gamma, alpha = resolve_beta(cfg)
    times = _times(cfg, "0.5,1,2")
    if min(times) <= 0:
        raise ConfigError("infinite-line solution needs tau > 0")
    xmax = float(cfg.get("xmax", 5.0))
    x = np.linspace(-xmax, xmax, int(cfg.get("points", 201)))
    cols, data, charge = ["x"], [x], []
    xq = np.linspace(-max(20.0, xmax), max(20.0, xmax), 40001)
    for t in times:
        e, v = dissipative.infinite_line_field_density(x, t, alpha, gamma)
        cols += [_label("e", t), _label("v", t)]
        data += [e, v]
        charge.append(float(simpson(dissipative.infinite_line_field_density(xq, t, alpha, gamma)[1], x=xq)))
    summary = {"parameters": {"alpha": alpha, "gamma": gamma, "beta": beta,
                              "time_variable": "tau"},
               "times": times, "charge": charge}
    header = {"solver": "infinite-line", "beta": _fmt(beta), "gamma": _fmt(gamma),
              "time": "tau"}
    emit(cfg, "infinite-line", header, cols, np.column_stack(data), summary)
    return EXIT_OK


def _exact_number(v):
    try:
        return Fraction(str(v)).limit_denominator(10**9)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a number: {v!r}") from exc


def cmd_inviscid(cfg):
    scenario = cfg.get("scenario") or "riemann"
    bc = cfg.get("bc", "neumann")
    if bc not in ("neumann", "dirichlet"):
        raise ConfigError(f"bc must be neumann or dirichlet, got {bc!r}")
    alpha = _exact_number(cfg.get("alpha", 1))
    times = [_exact_number(t) for t in _times(cfg, "0.5,1,2")]

    if scenario == "riemann":
        if alpha <= 0:
            raise ConfigError("alpha (point charge) must be positive")
        e0 = inviscid.riemann_field(-alpha / 2, alpha / 2)
    elif scenario == "square-pulse":
        if not 0 < alpha <= 2:
            raise ConfigError(f"pulse width alpha must lie in (0, 2], got {alpha}")
        e0 = inviscid.square_pulse_field(alpha)
    elif scenario == "uniform":
        e0 = inviscid.uniform_field()
    else:
        raise ConfigError(f"unknown inviscid scenario {scenario!r}")

    if bc == "neumann":
        def history(t):
            return inviscid.characteristics_evolve(e0, _exact_number(t))
    else:
        def history(t):
            return inviscid.dirichlet_image_evolution(e0, _exact_number(t))

    x = np.linspace(-1.0, 1.0, int(cfg.get("points", 201)))
    cols, data = ["x"], [x]
    per_time = []
    for t in times:
        f = history(t)
        cols += [_label("e", t), _label("v", t)]
        data += [f(x), f.density(x)]
        per_time.append({"tau": t, "lambda_left": f.lambda_left,
                         "lambda_right": f.lambda_right,
                         "interior_charge": f.interior_charge(),
                         "leaked": list(f.leaked),
                         "total_plus_leaked": f.total_charge() + sum(f.leaked),
                         "energy": f.energy()})

    summary = {"parameters": {"scenario": scenario, "alpha": alpha, "bc": bc,
                              "time_variable": "tau"},
               "critical_time": inviscid.critical_time(e0),
               "snapshots": {f"tau={float(p['tau']):g}": p for p in per_time}}
    status = EXIT_OK
    initial_charge = e0.total_charge()
    if any(p["total_plus_leaked"] != initial_charge for p in per_time):
        status = EXIT_INVALID
    if len(times) >= 2 and times[0] > 0:
        # the end flux has a kink when the first characteristic reaches an end
        rep = inviscid.admissibility_check(history, [float(t) for t in times],
                                           breakpoints=[float(inviscid.critical_time(e0))])
        summary["admissibility"] = {"verdict": rep.verdict,
                                    "residuals": [l.residual for l in rep.ledgers]}
        if rep.verdict == "FAIL":
            status = EXIT_INVALID
    header = {"solver": f"inviscid {scenario}", "alpha": str(alpha), "bc": bc,
              "time": "tau"}
    emit(cfg, "inviscid", header, cols, np.column_stack(data), summary)
    return status


def _species(cfg, gamma_default):
    spec = cfg.get("species")
    if spec is None:
        return None
    if not isinstance(spec, list) or not spec:
        raise ConfigError("species must be a non-empty list of {q, gamma, lambda} tables")
    out = []
    for i, s in enumerate(spec):
        if not isinstance(s, dict) or "q" not in s:
            raise ConfigError(f"species[{i}]: needs at least a q entry")
        try:
            out.append(SpeciesParams(q=int(s["q"]), gamma=float(s.get("gamma", gamma_default)),
                                     lam=float(s.get("lambda", s.get("lam", 0.0)))))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"species[{i}]: {exc}") from exc
    return tuple(out)


def build_fd_scenario(cfg):
    n = int(cfg.get("grid", 401))
    if n < 3:
        raise ConfigError("grid must have at least 3 points")
    times = sorted(_times(cfg, "0.4,2"))
    bc = cfg.get("bc", "neumann")
    if bc not in ("neumann", "dirichlet"):
        raise ConfigError(f"bc must be neumann or dirichlet, got {bc!r}")
    cfl = float(cfg.get("cfl", 0.9))
    species = _species(cfg, cfg.get("gamma", 0.25))
    grid = Grid(n)

    if species is None:
        beta, gamma, alpha = resolve_beta(cfg)
        ic = cfg.get("ic", "delta")
        if ic == "delta":
            init = fd.point_charge_state(grid, alpha)
        elif ic == "uniform":
            init = ChargeState(grid=grid, v=np.full((1, n), alpha / 2))
        else:
            raise ConfigError(f"ic must be delta or uniform, got {ic!r}")
        species = (SpeciesParams(q=1, gamma=gamma, lam=0.0),)
        params = {"beta": beta, "gamma": gamma, "alpha": alpha, "ic": ic}
    else:
        ic = cfg.get("ic", "delta")
        # every species starts from the same profile with unit particle count
        if ic == "delta":
            prof = fd.point_charge_state(grid, 1.0).v[0]
        elif ic == "uniform":
            prof = np.full(n, 0.5)
        else:
            raise ConfigError(f"ic must be delta or uniform, got {ic!r}")
        init = ChargeState(grid=grid, v=np.tile(prof, (len(species), 1)))
        params = {"species": [{"q": s.q, "gamma": s.gamma, "lambda": s.lam} for s in species],
                  "ic": ic}

    q = np.array([s.q for s in species], dtype=float)
    Q0 = total_charge(init, q)
    b = Neumann(-Q0 / 2, Q0 / 2) if bc == "neumann" else Dirichlet()
    sys_ = ScaledSystem(species=species, bc=b)
    try:
        sc = fd.Scenario(sys=sys_, grid=grid, initial=init, t_end=times[-1],
                         output_times=tuple(times), cfl_safety=cfl)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return sc, {**params, "grid": n, "bc": bc, "cfl": cfl, "time_variable": "tau"}


def cmd_fd(cfg):
    sc, params = build_fd_scenario(cfg)
    backend = cfg.get("backend")
    if backend not in (None, "numba", "numpy"):
        raise ConfigError(f"backend must be numba or numpy, got {backend!r}")
    tr = fd.solve(sc, backend=backend)
    x = sc.grid.x
    q = sc.sys.q
    cols, data = ["x"], [x]
    ledger = []
    Q_init = total_charge(sc.initial, q)
    for t, s, f in tr.snapshots:
        cols += [_label("e", t), _label("v", t)]
        data += [f.e, q @ s.v]
        leaked = float(q @ s.leaked.sum(axis=1))
        left, right = fd.endpoint_charge(s)
        ledger.append({"tau": t, "remaining": total_charge(s, q), "leaked": leaked,
                       "error": total_charge(s, q) + leaked - Q_init,
                       "field_energy": field_energy(f),
                       "endpoint_cells": [float(q @ left), float(q @ right)],
                       "balance_residual": list(fd.balance_residual(s, sc.sys))})
    worst = max(abs(l["error"]) for l in ledger)
    conv, tau_star = fd.steady_state_detect(tr, float(cfg.get("steady_tol", 1e-6)),
                                            bc=sc.sys.bc)
    summary = {"parameters": params, "steps": tr.steps, "backend": tr.backend,
               "charge_ledger": {"max_error": worst, "tolerance": 1e-8},
               "steady_state": {"converged": conv, "tau": tau_star},
               "snapshots": {f"tau={l['tau']:g}": l for l in ledger}}
    header = {"solver": "fd", "bc": params["bc"], "grid": params["grid"], "time": "tau"}
    if "beta" in params:
        header.update(beta=_fmt(params["beta"]), gamma=_fmt(params["gamma"]))
    emit(cfg, "fd", header, cols, np.column_stack(data), summary)
    return EXIT_OK if worst <= 1e-8 else EXIT_INVALID


def cmd_compare(cfg):
    kind = cfg.get("exact", "neumann")
    if kind not in ("neumann", "dirichlet"):
        raise ConfigError(f"exact must be neumann or dirichlet, got {kind!r}")
    beta, gamma, alpha = resolve_beta(cfg)
    times = sorted(_times(cfg, "0.1,0.5"))
    if min(times) <= 0:
        raise ConfigError("comparison times must be positive")
    n = int(cfg.get("grid", 401))
    cfl = float(cfg.get("cfl", 0.9))
    sol = (dissipative.neumann_solution(beta, gamma, T_min=min(times)) if kind == "neumann"
           else dissipative.dirichlet_solution(beta, gamma, T_min=min(times)))
    taus = [T / gamma for T in times]
    grids = [n, 2 * n - 1] if cfg.get("extrapolate") else [n]
    runs = [fd.solve(fd.point_charge_scenario(beta, gamma, m, kind, taus, cfl)) for m in grids]

    rows, per_time = [], {}
    for i, T in enumerate(times):
        _, s, f = runs[0].snapshots[i]
        x = s.grid.x
        dv = float(np.abs(s.v[0] - sol.density(x, T)).max())
        de = float(np.abs(f.e - sol.field(x, T)).max())
        row = [T, dv, de]
        entry = {"max_abs_diff_v": dv, "max_abs_diff_e": de}
        if len(runs) == 2:
            sf = runs[1].snapshots[i][1]
            ext = float(np.abs(2 * sf.v[0][::2] - s.v[0] - sol.density(x, T)).max())
            row.append(ext)
            entry["extrapolated_diff_v"] = ext
        rows.append(row)
        per_time[f"T={T:g}"] = entry
    cols = ["T", "max_abs_diff_v", "max_abs_diff_e"] + (
        ["extrapolated_diff_v"] if len(runs) == 2 else [])
    header = {"solver": f"compare exact-{kind} vs fd", "beta": _fmt(beta),
              "gamma": _fmt(gamma), "grid": n, "time": "T = gamma tau"}
    summary = {"parameters": {"exact": kind, "beta": beta, "gamma": gamma, "alpha": alpha,
                              "grid": n, "time_variable": "T = gamma tau"},
               "differences": per_time}
    emit(cfg, "compare", header, cols, rows, summary)
    return EXIT_OK


def cmd_validate(cfg):
    only = cfg.get("only")
    numbers = None
    if only:
        try:
            numbers = [int(v) for v in str(only).split(",")]
        except ValueError as exc:
            raise ConfigError(f"only: expected comma-separated criterion numbers, got {only!r}") from exc
        bad = [k for k in numbers if k not in validation.CRITERIA]
        if bad:
            raise ConfigError(f"only: unknown criteria {bad}")
    results = validation.run_all(numbers)
    print(validation.format_report(results))
    summary = {"criteria": {str(r.number): {"title": r.title, "passed": r.passed,
                                            "measured": r.measured,
                                            "tolerance": r.tolerance} for r in results}}
    if cfg.get("out") is not None:
        emit({**cfg, "format": "summary"}, "validate", {}, [], [], summary)
    return EXIT_OK if all(r.passed for r in results) else EXIT_INVALID

# }}}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nanopore1d",
                                description="Exact and numerical charge transport in 1-D nanopores.")
    p.add_argument("--version", action="version", version=f"nanopore1d {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="YAML file with the same keys as the long options")
        sp.add_argument("--out", help="output directory (default: print to stdout)")
        sp.add_argument("--format", choices=("table", "summary", "both"))
        sp.add_argument("--seed", type=int, help="reserved; all solvers are deterministic")
        sp.add_argument("--times", help="comma-separated output times")
        sp.add_argument("--points", type=int, help="number of output sample points")
        return sp

    def phys(sp):
        sp.add_argument("--beta", type=float)
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--gamma", type=float)
        return sp

    for kind in ("neumann", "dirichlet"):
        sp = phys(common(sub.add_parser(f"exact-{kind}",
                                        help=f"Hopf-Cole series, {kind} ends (times in T = gamma tau)")))
        sp.add_argument("--terms", type=int, help="series truncation (default: sized for the times)")
        sp.add_argument("--linear", action="store_true", default=None,
                        help="add linear-diffusion columns vL@T")
        sp.set_defaults(func=lambda cfg, k=kind: cmd_exact(cfg, k))

    sp = phys(common(sub.add_parser("infinite-line", help="point charge on the whole line (times in tau)")))
    sp.add_argument("--xmax", type=float)
    sp.set_defaults(func=cmd_infinite_line)

    sp = common(sub.add_parser("inviscid", help="exact zero-diffusivity dynamics (times in tau)"))
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--riemann", dest="scenario", action="store_const", const="riemann")
    g.add_argument("--square-pulse", dest="scenario", action="store_const", const="square-pulse")
    g.add_argument("--uniform", dest="scenario", action="store_const", const="uniform")
    sp.add_argument("--alpha", help="point charge (riemann) or pulse width (square-pulse)")
    sp.add_argument("--bc", choices=("neumann", "dirichlet"))
    sp.set_defaults(func=cmd_inviscid)

    sp = phys(common(sub.add_parser("fd", help="finite-volume solver (times in tau)")))
    sp.add_argument("--grid", type=int)
    sp.add_argument("--bc", choices=("neumann", "dirichlet"))
    sp.add_argument("--ic", choices=("delta", "uniform"))
    sp.add_argument("--cfl", type=float)
    sp.add_argument("--backend", choices=("numba", "numpy"))
    sp.add_argument("--steady-tol", dest="steady_tol", type=float)
    sp.set_defaults(func=cmd_fd)

    sp = phys(common(sub.add_parser("compare", help="series solution vs finite volumes (times in T)")))
    sp.add_argument("--exact", choices=("neumann", "dirichlet"))
    sp.add_argument("--fd", action="store_true", help="compare against the finite-volume solver")
    sp.add_argument("--grid", type=int)
    sp.add_argument("--cfl", type=float)
    sp.add_argument("--extrapolate", action="store_true", default=None,
                    help="also run the 2x refined grid and report the extrapolated gap")
    sp.set_defaults(func=cmd_compare)

    sp = common(sub.add_parser("validate", help="run the acceptance suite"))
    sp.add_argument("--only", help="comma-separated criterion numbers")
    sp.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func = args.func
    args_d = vars(args).copy()
    args_d.pop("fd", None)
    ns = argparse.Namespace(**args_d)
    try:
        cfg = merge_config(args.command, ns)
        return func(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SOLVER_ERRORS as exc:
        print(f"solver error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
