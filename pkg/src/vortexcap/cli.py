"""Command-line interface.

Commands: spectrum | region-scan | branch | evolve | verify.  Parameters come
from an optional JSON config file with flag overrides (flags win); every CSV
output embeds a hash of the resolved configuration.  Exit codes: 0 ok,
1 verify failure, 2 config error, 3 degenerate state or spectral collision,
4 continuation stall (partial output kept).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import continuation as cont
from . import evolution as evo
from .csvio import read_csv, write_csv
from .functional import ContourFourier
from .geometry import DomainError
from .spectral import (
    admissible_region_scan,
    band_speeds,
    burbea_shifted_speed,
    find_threshold_n,
)
from .states import BandState, DegenerateStateError, FlatCapState, solve_gauss_one, solve_gauss_two
from .verify import SUITES, run_suites

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3
EXIT_STALL = 4


class ConfigError(ValueError):
    pass


def _power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def _load_config(path):
    if path is None:
        return {}
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _merge(config: dict, args: argparse.Namespace, keys: dict) -> dict:
    """Overlay CLI flags (when given) onto the JSON config; flags win."""
    out = {k: v for k, v in config.items()}
    for section, names in keys.items():
        sec = dict(out.get(section, {}))
        for name in names:
            val = getattr(args, name.replace("-", "_"), None)
            if val is not None:
                sec[name] = val
        out[section] = sec
    return out


def _build_state(cfg: dict):
    """state/band section -> FlatCapState or BandState."""
    if "band" in cfg and cfg["band"]:
        b = cfg["band"]
        for key in ("theta1", "theta2", "omega_n", "omega_s", "gamma"):
            if key not in b:
                raise ConfigError(f"band config missing {key}")
        if not (0.0 < b["theta1"] < math.pi and 0.0 < b["theta2"] < math.pi):
            raise ConfigError("band angles must lie in (0, pi)")
        return solve_gauss_two(
            b["theta1"], b["theta2"], b["omega_n"], b["omega_s"], b["gamma"]
        )
    if "state" in cfg and cfg["state"]:
        s = cfg["state"]
        for key in ("theta0", "omega_s", "gamma"):
            if key not in s:
                raise ConfigError(f"state config missing {key}")
        if not 0.0 < s["theta0"] < math.pi:
            raise ConfigError("theta0 must lie in (0, pi)")
        return solve_gauss_one(s["theta0"], s["omega_s"], s["gamma"])
    raise ConfigError("no state or band configuration given")


def _state_section(args, config):
    cfg = dict(config)
    if getattr(args, "band", False):
        sec = dict(cfg.get("band", {}))
        for flag, key in (
            ("theta1", "theta1"),
            ("theta2", "theta2"),
            ("omega_n", "omega_n"),
            ("omega_s", "omega_s"),
            ("gamma", "gamma"),
        ):
            val = getattr(args, flag, None)
            if val is not None:
                sec[key] = val
        sec.setdefault("gamma", 0.0)
        cfg["band"] = sec
        cfg.pop("state", None)
    elif getattr(args, "one", False) or "state" in cfg:
        sec = dict(cfg.get("state", {}))
        for flag, key in (("theta0", "theta0"), ("omega_s", "omega_s"), ("gamma", "gamma")):
            val = getattr(args, flag, None)
            if val is not None:
                sec[key] = val
        sec.setdefault("gamma", 0.0)
        cfg["state"] = sec
        cfg.pop("band", None)
    return cfg


def cmd_spectrum(args) -> int:
    config = _state_section(args, _load_config(args.config))
    config = _merge(config, args, {"output": ["path"]})
    state = _build_state(config)
    out_path = config["output"].get("path") or args.path
    if out_path is None:
        raise ConfigError("no output path")
    if isinstance(state, FlatCapState):
        m_max = args.m_max or config.get("numerics", {}).get("m_max")
        if not m_max or m_max < 1:
            raise ConfigError("spectrum --one requires --m-max >= 1")
        config.setdefault("numerics", {})["m_max"] = m_max
        rows = [
            (m, burbea_shifted_speed(m, state.gamma, state.omega_n, state.omega_s))
            for m in range(1, m_max + 1)
        ]
        write_csv(out_path, ["m", "c"], rows, config)
    else:
        n_max = args.n_max or config.get("numerics", {}).get("n_max")
        if not n_max or n_max < 1:
            raise ConfigError("spectrum --band requires --n-max >= 1")
        config.setdefault("numerics", {})["n_max"] = n_max
        threshold = find_threshold_n(state, max(n_max, 64))
        rows = []
        for n in range(1, n_max + 1):
            e = band_speeds(n, state)
            rows.append(
                (n, e.c_minus, e.c_plus, e.discriminant, e.valid, threshold or -1)
            )
        write_csv(
            out_path,
            ["n", "c_minus", "c_plus", "discriminant", "valid", "threshold_n"],
            rows,
            config,
        )
    return EXIT_OK


def cmd_region_scan(args) -> int:
    config = _load_config(args.config)
    resolution = args.resolution or config.get("numerics", {}).get("resolution")
    if resolution is None or resolution < 16:
        raise ConfigError("region scan needs --resolution >= 16")
    out_path = (config.get("output", {}) or {}).get("path") or args.path
    if out_path is None:
        raise ConfigError("no output path")
    config = {"numerics": {"resolution": resolution, "case": args.case}}
    points = admissible_region_scan(resolution, args.case)
    rows = [(p.theta1, p.theta2, p.fig1a, p.fig1b) for p in points]
    write_csv(out_path, ["theta1", "theta2", "fig1a", "fig1b"], rows, config)
    return EXIT_OK


def _branch_rows(branch: cont.Branch):
    rows = []
    for p in branch.sorted_points():
        row = [p.epsilon, p.c, p.residual_norm]
        row.extend(p.f1.coeffs)
        if p.f2 is not None:
            row.extend(p.f2.coeffs)
        rows.append(row)
    return rows


def _branch_header(modes: int, band: bool):
    head = ["epsilon", "c", "residual"]
    if band:
        head += [f"f1_{i}" for i in range(1, modes + 1)]
        head += [f"f2_{i}" for i in range(1, modes + 1)]
    else:
        head += [f"f_{i}" for i in range(1, modes + 1)]
    return head


def cmd_branch(args) -> int:
    config = _state_section(args, _load_config(args.config))
    config = _merge(config, args, {"output": ["path"]})
    state = _build_state(config)
    numerics = dict(config.get("numerics", {}))
    modes = args.modes or numerics.get("modes") or (12 if isinstance(state, BandState) else 16)
    n_coll = args.collocation or numerics.get("collocation")
    if n_coll is not None and not _power_of_two(n_coll):
        raise ConfigError("collocation must be a power of two")
    tol = args.newton_tol or numerics.get("newton_tol") or cont.NEWTON_TOL
    if args.m is None or args.eps_max is None or args.n_steps is None:
        raise ConfigError("branch requires --m, --eps-max and --n-steps")
    numerics.update(
        {"modes": modes, "m": args.m, "eps_max": args.eps_max,
         "n_steps": args.n_steps, "newton_tol": tol}
    )
    if n_coll:
        numerics["collocation"] = n_coll
    config["numerics"] = numerics
    out_path = config["output"].get("path") or args.path
    if out_path is None:
        raise ConfigError("no output path")

    is_band = isinstance(state, BandState)
    try:
        if is_band:
            kappa = args.kappa or "+"
            config["numerics"]["kappa"] = kappa
            branch = cont.branch_two(
                state, args.m, kappa, args.eps_max, args.n_steps,
                modes=modes, n_collocation=n_coll, tol=tol,
                both_signs=args.both_signs,
            )
        else:
            branch = cont.branch_one(
                state, args.m, args.eps_max, args.n_steps,
                modes=modes, n_collocation=n_coll, tol=tol,
                both_signs=args.both_signs,
            )
    except cont.SpectralCollisionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except cont.ContinuationStallError as exc:
        write_csv(
            out_path, _branch_header(modes, is_band), _branch_rows(exc.branch), config
        )
        print(f"error: {exc} (partial branch written)", file=sys.stderr)
        return EXIT_STALL
    write_csv(out_path, _branch_header(modes, is_band), _branch_rows(branch), config)
    return EXIT_OK


def _initial_from_args(args, state, config):
    kind = args.initial or "flat"
    modes = args.modes or 8
    fold = args.m or 2
    n_coll = args.collocation
    if kind == "flat":
        coeffs = np.zeros(modes)
        speed = 0.0
        contours = [ContourFourier(fold, coeffs, n_coll)]
        if isinstance(state, BandState):
            contours.append(ContourFourier(fold, np.zeros(modes), n_coll))
        return contours, speed
    if kind == "mode":
        eps = args.mode_eps if args.mode_eps is not None else 1e-4
        coeffs = np.zeros(modes)
        coeffs[0] = eps
        contours = [ContourFourier(fold, coeffs, n_coll)]
        if isinstance(state, BandState):
            contours.append(ContourFourier(fold, coeffs.copy(), n_coll))
        speed = burbea_shifted_speed(fold, state.gamma, state.omega_n, state.omega_s) \
            if isinstance(state, FlatCapState) else 0.0
        return contours, speed
    if kind == "branch":
        if not args.branch_csv:
            raise ConfigError("--initial branch requires --branch-csv")
        _, header, rows = read_csv(args.branch_csv)
        row = rows[args.row if args.row is not None else -1]
        rec = dict(zip(header, row))
        speed = float(rec["c"])
        f1 = [float(rec[k]) for k in header if k.startswith("f_") or k.startswith("f1_")]
        contours = [ContourFourier(fold, np.array(f1), n_coll)]
        f2 = [float(rec[k]) for k in header if k.startswith("f2_")]
        if f2:
            contours.append(ContourFourier(fold, np.array(f2), n_coll))
        if isinstance(state, BandState) and len(contours) == 1:
            raise ConfigError("band evolution needs a band branch row")
        return contours, speed
    raise ConfigError(f"unknown initial condition {kind!r}")


def cmd_evolve(args) -> int:
    config = _state_section(args, _load_config(args.config))
    config = _merge(config, args, {"output": ["path"]})
    state = _build_state(config)
    numerics = dict(config.get("numerics", {}))
    dt = args.dt or numerics.get("dt")
    t_end = args.t_end if args.t_end is not None else numerics.get("t_end")
    if dt is None or dt <= 0.0:
        raise ConfigError("evolve requires --dt > 0")
    if t_end is None or t_end < 0.0:
        raise ConfigError("evolve requires --t-end >= 0")
    if args.collocation is not None and not _power_of_two(args.collocation):
        raise ConfigError("collocation must be a power of two")
    contours, speed = _initial_from_args(args, state, config)
    if args.speed is not None:
        speed = args.speed
    numerics.update({"dt": dt, "t_end": t_end, "speed": speed})
    config["numerics"] = numerics
    out_path = config["output"].get("path") or args.path
    if out_path is None:
        raise ConfigError("no output path")

    exit_code = EXIT_OK
    try:
        traj = evo.evolve(
            contours if len(contours) > 1 else contours[0],
            state,
            t_end,
            dt,
            n_collocation=args.collocation,
            record_every=args.record_every or max(1, int(round(t_end / dt)) // 256),
            fold=args.fold,
        )
    except evo.EvolutionAbort as exc:
        traj = exc.trajectory
        print(f"error: {exc} (partial trajectory written)", file=sys.stderr)
        exit_code = EXIT_STALL

    csv_modes = args.csv_modes or 8
    fold = contours[0].fold
    header = ["t", "interface", "area", "gauss_residual", "rigid_rotation_error"]
    header += [f"cos_{i}" for i in range(1, csv_modes + 1)]
    header += [f"sin_{i}" for i in range(1, csv_modes + 1)]
    rows = []
    f0 = traj.snapshots[0]
    for t, snap, areas, gauss in zip(
        traj.times, traj.snapshots, traj.areas, traj.gauss_residuals
    ):
        for i, row in enumerate(snap):
            ref = evo.spectral_shift(f0[i], speed * t)
            rre = float(np.max(np.abs(row - ref)))
            spec = np.fft.rfft(row) / row.size
            cos_c = [2.0 * spec[fold * k].real for k in range(1, csv_modes + 1)]
            sin_c = [-2.0 * spec[fold * k].imag for k in range(1, csv_modes + 1)]
            rows.append([t, i + 1, float(areas[i]), gauss, rre, *cos_c, *sin_c])
    write_csv(out_path, header, rows, config)
    return exit_code


def cmd_verify(args) -> int:
    names = SUITES if args.suite in (None, "all") else (args.suite,)
    results = run_suites(names, seed=args.seed or 0, corrupt_in_closed=args.break_in_closed)
    all_ok = True
    for r in results:
        status = "PASS" if r["passed"] else "FAIL"
        print(f"[{status}] {r['suite']}: worst={r['worst']:.3e} tol={r['tol']:.1e}")
        all_ok &= r["passed"]
    return EXIT_OK if all_ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vortexcap",
        description="Rotating vortex caps and bands on the sphere: spectra, "
        "branches, contour dynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_state_flags(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--one", action="store_true", help="one-interface state")
        p.add_argument("--band", action="store_true", help="two-interface band")
        p.add_argument("--theta0", type=float)
        p.add_argument("--theta1", type=float)
        p.add_argument("--theta2", type=float)
        p.add_argument("--omega-n", type=float, dest="omega_n")
        p.add_argument("--omega-s", type=float, dest="omega_s")
        p.add_argument("--gamma", type=float)
        p.add_argument("--out", dest="path", help="output CSV path")

    p = sub.add_parser("spectrum", help="bifurcation speed tables")
    add_state_flags(p)
    p.add_argument("--m-max", type=int, dest="m_max")
    p.add_argument("--n-max", type=int, dest="n_max")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("region-scan", help="admissible (theta1,theta2) grid")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--resolution", type=int)
    p.add_argument("--case", choices=["fig1a", "fig1b", "both"], default="both")
    p.add_argument("--out", dest="path")
    p.set_defaults(func=cmd_region_scan)

    p = sub.add_parser("branch", help="Newton continuation of a branch")
    add_state_flags(p)
    p.add_argument("--m", type=int)
    p.add_argument("--kappa", choices=["+", "-"])
    p.add_argument("--eps-max", type=float, dest="eps_max")
    p.add_argument("--n-steps", type=int, dest="n_steps")
    p.add_argument("--modes", type=int)
    p.add_argument("--collocation", type=int)
    p.add_argument("--newton-tol", type=float, dest="newton_tol")
    p.add_argument("--both-signs", action="store_true", dest="both_signs")
    p.set_defaults(func=cmd_branch)

    p = sub.add_parser("evolve", help="time-integrate the contour dynamics")
    add_state_flags(p)
    p.add_argument("--t-end", type=float, dest="t_end")
    p.add_argument("--dt", type=float)
    p.add_argument("--initial", choices=["flat", "mode", "branch"])
    p.add_argument("--mode-eps", type=float, dest="mode_eps")
    p.add_argument("--branch-csv", dest="branch_csv")
    p.add_argument("--row", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--modes", type=int)
    p.add_argument("--csv-modes", type=int, dest="csv_modes")
    p.add_argument("--collocation", type=int)
    p.add_argument("--record-every", type=int, dest="record_every")
    p.add_argument("--fold", type=int)
    p.add_argument("--speed", type=float)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("verify", help="oracle self-check suites")
    p.add_argument("--suite", choices=["all", *SUITES])
    p.add_argument("--seed", type=int)
    p.add_argument(
        "--break-in-closed",
        action="store_true",
        dest="break_in_closed",
        help="deliberately corrupt the closed form (harness self-test)",
    )
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses code 2 for usage errors, matching the config-error code
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DegenerateStateError, cont.SpectralCollisionError, cont.DegeneracyError) as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except cont.ContinuationStallError as exc:
        print(f"stall: {exc}", file=sys.stderr)
        return EXIT_STALL


if __name__ == "__main__":
    sys.exit(main())
