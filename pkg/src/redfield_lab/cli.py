"""Command line front end: JSON config in, CSV/JSON reports out.

One JSON document per run is the whole experiment record; the only
flags are --config and --output. Configs are parsed strictly (unknown
keys are errors, naming the key and the section). An optional top-level
"figure" key gives a path to render a matplotlib summary of the same
data next to the delimited output.

Exit codes: 0 success, 2 config or constraint error, 3 internal
invariant breach. No environment variables are consulted.
"""
import argparse
import io
import json
import sys

import numpy as np

from .bath import BathParameters
from .concurrence import concurrence_xstate_entries
from .matrices import hermitian_eigenvalues
from .pair import (ConstraintViolation, NotZeroTemperature, RegimeError,
                   apply_extended, bell_state, family_state,
                   xstate_spectrum_entries, xstate_trajectory_entries)
from .qubit import (QubitState, det_derivative_at_zero, equilibrium_state,
                    is_admissible_single, propagate_entries, witness_state,
                    witness_det_slope_closed_form)
from .records import InternalInvariantError, TrajectoryRecord, write_csv, \
    write_json, write_jsonl
from .scanner import scan_family, scan_single_bloch

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTERNAL = 3

SUBCOMMANDS = ("evolve-single", "concurrence-trace", "witness", "scan", "choi")


class ConfigError(ValueError):
    """Config failed strict validation; the message names the field."""


# ---------------------------------------------------------------- config

def _type_name(checker) -> str:
    return {_as_float: "a number", _as_int: "an integer",
            _as_str: "a string"}.get(checker, "a value")


def _as_float(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"'{path}' must be a number, got {v!r}")
    return float(v)


def _as_int(v, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"'{path}' must be an integer, got {v!r}")
    return int(v)


def _as_str(v, path: str) -> str:
    if not isinstance(v, str):
        raise ConfigError(f"'{path}' must be a string, got {v!r}")
    return v


def _section(obj, path: str, required: dict, optional: dict = {}) -> dict:
    """Strict object parse: every key typed, unknown keys rejected."""
    if not isinstance(obj, dict):
        raise ConfigError(f"'{path}' must be an object, got {obj!r}")
    for key in obj:
        if key not in required and key not in optional:
            raise ConfigError(f"unknown key '{key}' in '{path}'")
    out = {}
    for key, checker in required.items():
        if key not in obj:
            raise ConfigError(f"missing key '{key}' in '{path}'")
        out[key] = checker(obj[key], f"{path}.{key}")
    for key, checker in optional.items():
        if key in obj:
            out[key] = checker(obj[key], f"{path}.{key}")
    return out


def _parse_bath(cfg: dict) -> BathParameters:
    if "bath" not in cfg:
        raise ConfigError("missing key 'bath' in 'config'")
    fields = _section(cfg["bath"], "bath", {k: _as_float
                                            for k in ("omega", "a", "b", "d")})
    try:
        return BathParameters(**fields)
    except ValueError as exc:
        raise ConfigError(f"bath: {exc}") from exc


def _parse_time_grid(cfg: dict, path: str = "config"):
    t_max = _as_float(cfg["t_max"], f"{path}.t_max")
    n_steps = _as_int(cfg["n_steps"], f"{path}.n_steps")
    if not t_max > 0.0:
        raise ConfigError(f"'t_max' must be positive, got {t_max}")
    if n_steps < 2:
        raise ConfigError(f"'n_steps' must be >= 2, got {n_steps}")
    return t_max, np.linspace(0.0, t_max, n_steps + 1), n_steps


def _parse_initial(value, params: BathParameters) -> QubitState:
    if isinstance(value, str):
        if value == "witness":
            return witness_state(params)
        if value == "equilibrium":
            return equilibrium_state(params)
        raise ConfigError(f"'initial' must be 'witness', 'equilibrium' or an "
                          f"object, got {value!r}")
    entries = _section(value, "initial", {k: _as_float for k in
                                         ("rho1", "re_rho3", "im_rho3")})
    state = QubitState(entries["rho1"],
                       complex(entries["re_rho3"], entries["im_rho3"]))
    if not state.is_positive(1e-10):
        raise ConfigError(f"'initial' is not a state, min eigenvalue "
                          f"{state.min_eigenvalue():.3e}")
    return state


# -------------------------------------------------------------- commands

def cmd_evolve_single(cfg: dict):
    _section(cfg, "config", {"bath": lambda v, p: v, "initial": lambda v, p: v,
                             "t_max": lambda v, p: v, "n_steps": lambda v, p: v},
             {"figure": _as_str})
    params = _parse_bath(cfg)
    t_max, times, n_steps = _parse_time_grid(cfg)
    state = _parse_initial(cfg["initial"], params)
    r1, r3 = propagate_entries(state.rho1, state.rho3, times, params)
    r1 = np.real(r1)
    record = TrajectoryRecord(times, {
        "rho1": r1,
        "re_rho3": np.real(r3),
        "im_rho3": np.imag(r3),
        "min_eig": 0.5 - np.sqrt((r1 - 0.5) ** 2 + np.abs(r3) ** 2),
        "det": r1 * (1.0 - r1) - np.abs(r3) ** 2,
    })
    figure = cfg.get("figure")
    return record, write_csv, (("render_evolve", record, figure)
                               if figure else None)


def cmd_concurrence_trace(cfg: dict):
    _section(cfg, "config", {k: (lambda v, p: v) for k in
                             ("bath", "mu", "nu", "t_max", "n_steps")},
             {"figure": _as_str})
    params = _parse_bath(cfg)
    t_max, times, n_steps = _parse_time_grid(cfg)
    mu = _as_float(cfg["mu"], "config.mu")
    nu = _as_float(cfg["nu"], "config.nu")
    x0 = family_state(mu, nu, params)
    entries = xstate_trajectory_entries(x0, times, params)
    pops = [np.real(e) for e in entries[:4]]
    r14, r23 = entries[4], entries[5]
    conc, branch = concurrence_xstate_entries(*pops, r14, r23)
    _, low14, _, low23 = xstate_spectrum_entries(*pops, r14, r23)
    record = TrajectoryRecord(times, {
        "concurrence": np.asarray(conc, dtype=float),
        "branch": branch,
        "D1": pops[0] * pops[3] - np.abs(r14) ** 2,
        "D2": pops[1] * pops[2] - np.abs(r23) ** 2,
        "min_eig": np.minimum(low14, low23),
    })
    figure = cfg.get("figure")
    return record, write_csv, (("render_concurrence", record, figure)
                               if figure else None)


def cmd_witness(cfg: dict):
    _section(cfg, "config", {k: (lambda v, p: v) for k in
                             ("bath", "t_max", "n_steps")},
             {"figure": _as_str, "tol": _as_float, "fd_step": _as_float})
    params = _parse_bath(cfg)
    t_max, times, n_steps = _parse_time_grid(cfg)
    tol = cfg.get("tol", 1e-12)
    h = cfg.get("fd_step", 1e-5)
    w = witness_state(params)
    r1, r3 = propagate_entries(w.rho1, w.rho3, np.array([h, -h]), params)
    det = np.real(r1) * (1.0 - np.real(r1)) - np.abs(r3) ** 2
    admissible, first_t = is_admissible_single(w, params, t_max, n_steps, tol)
    report = {
        "witness_state": {"rho1": w.rho1, "re_rho3": w.rho3.real,
                          "im_rho3": w.rho3.imag},
        "det_slope_closed_form": witness_det_slope_closed_form(params),
        "det_slope_generator": det_derivative_at_zero(w, params),
        "det_slope_finite_difference": float((det[0] - det[1]) / (2.0 * h)),
        "fd_step": h,
        "admissible": admissible,
        "first_violation_time": first_t,
        "t_max": t_max, "n_steps": n_steps, "tol": tol,
    }
    figure = cfg.get("figure")
    aux = None
    if figure:
        g1, g3 = propagate_entries(w.rho1, w.rho3, times, params)
        g1 = np.real(g1)
        trace = TrajectoryRecord(times, {
            "det": g1 * (1.0 - g1) - np.abs(g3) ** 2,
            "min_eig": 0.5 - np.sqrt((g1 - 0.5) ** 2 + np.abs(g3) ** 2),
        })
        aux = ("render_witness", trace, figure)
    return report, write_json, aux


def cmd_choi(cfg: dict):
    _section(cfg, "config", {k: (lambda v, p: v) for k in
                             ("bath", "t_max", "n_steps")},
             {"figure": _as_str})
    params = _parse_bath(cfg)
    t_max, times, n_steps = _parse_time_grid(cfg)
    bell = bell_state()
    eigs = np.empty((times.size, 4))
    for k, t in enumerate(times):
        eigs[k] = hermitian_eigenvalues(apply_extended(bell, float(t),
                                                       params)).values
    record = TrajectoryRecord(times, {
        "eig1": eigs[:, 0], "eig2": eigs[:, 1],
        "eig3": eigs[:, 2], "eig4": eigs[:, 3],
    })
    figure = cfg.get("figure")
    return record, write_csv, (("render_choi", record, figure)
                               if figure else None)


def cmd_scan(cfg: dict):
    mode = cfg.get("mode")
    if mode not in ("family", "bloch"):
        raise ConfigError(f"'mode' must be 'family' or 'bloch', got {mode!r}")
    if mode == "family":
        _section(cfg, "config", {k: (lambda v, p: v) for k in
                                 ("bath", "mode", "t_max", "n_steps",
                                  "mu", "nu")},
                 {"figure": _as_str, "tol": _as_float,
                  "increase_tol": _as_float, "workers": _as_int})
        params = _parse_bath(cfg)
        t_max, _, n_steps = _parse_time_grid(cfg)
        grids = []
        for name in ("mu", "nu"):
            g = _section(cfg[name], name, {"min": _as_float, "max": _as_float,
                                           "points": _as_int})
            if g["points"] < 1:
                raise ConfigError(f"'{name}.points' must be >= 1")
            grids.append(np.linspace(g["min"], g["max"], g["points"]))
        results, skipped, summary = scan_family(
            grids[0], grids[1], params, t_max, n_steps,
            tol=cfg.get("tol", 1e-12),
            increase_tol=cfg.get("increase_tol", 1e-10),
            workers=cfg.get("workers"))
        rows = [r.as_row() for r in results] + skipped + [{"summary": summary}]
        figure = cfg.get("figure")
        return rows, write_jsonl, (("render_scan_family", rows[:-1], figure)
                                   if figure else None)

    _section(cfg, "config", {k: (lambda v, p: v) for k in
                             ("bath", "mode", "t_max", "n_steps",
                              "resolution")},
             {"figure": _as_str, "tol": _as_float})
    params = _parse_bath(cfg)
    t_max, _, n_steps = _parse_time_grid(cfg)
    resolution = _as_int(cfg["resolution"], "config.resolution")
    if resolution < 2:
        raise ConfigError(f"'resolution' must be >= 2, got {resolution}")
    summary = scan_single_bloch(resolution, params, t_max, n_steps,
                                cfg.get("tol", 1e-12))
    rows = [{"boundary_sample": s} for s in summary["boundary_samples"]]
    rows.append({"summary": {k: v for k, v in summary.items()
                             if k != "boundary_samples"}})
    figure = cfg.get("figure")
    return rows, write_jsonl, (("render_scan_bloch", summary, figure)
                               if figure else None)


_COMMANDS = {
    "evolve-single": cmd_evolve_single,
    "concurrence-trace": cmd_concurrence_trace,
    "witness": cmd_witness,
    "scan": cmd_scan,
    "choi": cmd_choi,
}


# ------------------------------------------------------------ dispatch

def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _render_figure(aux) -> None:
    from . import figures
    name, payload, path = aux
    getattr(figures, name)(payload, path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="redfield-lab",
        description="Reduced qubit dynamics laboratory: trajectories, "
                    "positivity witnesses, concurrence traces and scans.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True,
                       help="path to the JSON run config")
        p.add_argument("--output", default=None,
                       help="output file (default: stdout)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        payload, writer, aux = _COMMANDS[args.command](cfg)
        buf = io.StringIO()
        writer(payload, buf)
        if aux is not None:
            _render_figure(aux)
    except (ConfigError, ConstraintViolation, RegimeError,
            NotZeroTemperature) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InternalInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.output is None:
        sys.stdout.write(buf.getvalue())
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    return EXIT_OK


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
