"""Command-line front end: single runs, parameter studies, self-verification.

Exit codes: 0 success, 1 usage or configuration error, 2 solver failure,
3 verification failure.  The output directory comes from --out, falling
back to the WESTFEM_OUT environment variable, then ./results.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .analysis import err_linf_l2
from .cases import ProblemConfig, run_problem
from .errors import SolverFailure
from .spacefe import evaluate
from .studies import StudySpec, _config_cells, run_study, write_csv, write_study_outputs
from .verify import run_verify

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_VERIFY = 0, 1, 2, 3
ENV_OUT = "WESTFEM_OUT"


class UsageError(Exception):
    pass


def _out_dir(args) -> Path:
    if args.out is not None:
        return Path(args.out)
    env = os.environ.get(ENV_OUT)
    return Path(env) if env else Path("results")


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _cmd_run(args) -> int:
    cfg_dict = _load_json(args.config)
    if not isinstance(cfg_dict, dict):
        raise UsageError(f"{args.config} must hold a JSON object")
    name = cfg_dict.pop("name", None)
    snap_grid = cfg_dict.pop("snapshot_grid", None)
    snap_times = cfg_dict.pop("snapshot_times", None)
    try:
        cfg = ProblemConfig.from_dict(cfg_dict)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad run configuration: {exc}") from exc

    space, part, sol, rep = run_problem(cfg)
    have_exact = cfg.case.u is not None
    e_dt = err_linf_l2(sol, cfg.case, "dt") if have_exact else None
    e_g = err_linf_l2(sol, cfg.case, "grad") if have_exact else None

    row = _config_cells(cfg)
    row.update({"err_dt": e_dt, "err_grad": e_g, "eoc_dt": None, "eoc_grad": None,
                "iters_mean": round(rep.iters_mean, 3), "iters_max": rep.iters_max,
                "runtime_s": round(rep.runtime_s, 4)})

    out = _out_dir(args)
    base = out / (name or f"run-{cfg.case.name}")
    write_csv([row], base.with_suffix(".csv"))
    written = [str(base.with_suffix(".csv"))]

    if snap_grid is not None:
        m = int(snap_grid)
        if m < 2:
            raise UsageError("snapshot_grid must be at least 2")
        ax = np.linspace(0.0, 1.0, m)
        xg, yg = np.meshgrid(ax, ax, indexing="ij")
        times = (np.asarray(snap_times, dtype=float) if snap_times is not None
                 else part.breakpoints)
        u = np.empty((len(times), m, m))
        du = np.empty_like(u)
        for i, t in enumerate(times):
            side = "left" if i == len(times) - 1 and t >= part.breakpoints[-1] else "right"
            u[i] = evaluate(space, sol.value(t, side=side),
                            xg.ravel(), yg.ravel()).reshape(m, m)
            du[i] = evaluate(space, sol.dt(t, side=side),
                             xg.ravel(), yg.ravel()).reshape(m, m)
        snap_path = base.parent / (base.name + "-snapshots.npz")
        snap_path.parent.mkdir(parents=True, exist_ok=True)
        np.savez(snap_path, x=ax, y=ax, t=times, u=u, dtu=du)
        written.append(str(snap_path))

    err_txt = (f"err_dt={e_dt:.6e} err_grad={e_g:.6e}" if have_exact
               else "no closed-form solution; errors not computed")
    print(f"run {cfg.case.name}: n={cfg.n} p={cfg.p} q={cfg.q} tau={cfg.tau} "
          f"| {err_txt} | iters<= {rep.iters_max} | {rep.runtime_s:.2f}s")
    for path in written:
        print(f"  wrote {path}")
    return EXIT_OK


def _cmd_study(args) -> int:
    spec_dict = _load_json(args.spec)
    if not isinstance(spec_dict, dict):
        raise UsageError(f"{args.spec} must hold a JSON object")
    try:
        spec = StudySpec.from_dict(spec_dict)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad study spec: {exc}") from exc

    result = run_study(spec, threads=args.threads, strict=args.strict)
    paths = write_study_outputs(result, _out_dir(args), plot=args.plot)

    print(f"study {spec.name}: {len(result.rows)} rows, "
          f"{len(result.failures)} failures")
    for row in result.rows:
        eoc_txt = "" if row["eoc_dt"] is None else (
            f"  eoc_dt={row['eoc_dt']:<7} eoc_grad={row['eoc_grad']}")
        err_txt = ("" if row["err_dt"] is None else
                   f"err_dt={row['err_dt']:.4e} err_grad={row['err_grad']:.4e}")
        print(f"  n={row['n']:<3} tau={row['tau']:<8} p={row['p']} q={row['q']} "
              f"delta={row['delta']:<8} {err_txt}{eoc_txt}")
    for failure in result.failures:
        print(f"  FAILED [{failure['index']}]: {failure['error']}", file=sys.stderr)
    for kind, path in paths.items():
        print(f"  wrote {path}")
    return EXIT_OK if result.ok else EXIT_SOLVER


def _cmd_verify(args) -> int:
    try:
        report = run_verify(pattern=args.filter)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    for line in report.summary_lines(verbose=args.verbose):
        print(line)
    return EXIT_OK if report.passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="westfem",
        description="Space-time FEM solver for the Westervelt equation")
    sub = ap.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="solve one configured problem")
    run_p.add_argument("config", help="JSON problem configuration")
    run_p.set_defaults(fn=_cmd_run)

    study_p = sub.add_parser("study", help="execute a convergence study")
    study_p.add_argument("spec", help="JSON study specification")
    study_p.add_argument("--threads", type=int, default=1,
                         help="worker threads for sweep entries")
    study_p.add_argument("--strict", action="store_true",
                         help="abort the sweep on the first solver failure")
    study_p.add_argument("--plot", action="store_true",
                         help="also write an SVG convergence plot")
    study_p.set_defaults(fn=_cmd_study)

    verify_p = sub.add_parser("verify", help="run the self-verification suites")
    verify_p.add_argument("--filter", default=None,
                          help="glob pattern selecting suites (e.g. 'jump*')")
    verify_p.add_argument("--verbose", action="store_true",
                          help="list every check, not just suite results")
    verify_p.set_defaults(fn=_cmd_verify)

    for p in (run_p, study_p):
        p.add_argument("--out", default=None,
                       help="output directory (default $" + ENV_OUT + " or ./results)")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; remap to the documented code
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
