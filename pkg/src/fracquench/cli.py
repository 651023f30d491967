"""``fracquench`` command line: ml, solve, steady, critical, sweep, verify."""

from __future__ import annotations

import argparse
import itertools
import signal
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .config import ConfigError, build_config, dump_resolved, load_document, resolve
from .quench import critical_size, format_sweep_csv, steady_solve, sweep
from .runio import RunManifest, default_out_dir, emit_plotdata, write_json, write_text
from .solver import default_radius, existence_horizon, monotonicity_condition, run
from .special_fn import mittag_leffler
from .spectral import sup_norm, write_grid_csv
from .verify import SUITES, format_table, verify_all

EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_INTERRUPTED = 130


class _Interrupted(Exception):
    pass


def _on_sigterm(signum, frame):
    raise _Interrupted()


def _resolve_out_dir(args, resolved=None):
    if args.out_dir:
        return Path(args.out_dir)
    if resolved is not None and resolved.get("out_dir"):
        return Path(resolved["out_dir"])
    return Path(default_out_dir())


def _load(args):
    resolved = resolve(load_document(args.config))
    return resolved, build_config(resolved)


def _start_run(args, command, resolved):
    out = _resolve_out_dir(args, resolved)
    out.mkdir(parents=True, exist_ok=True)
    write_text(out / "config.yaml", dump_resolved(resolved))
    return out, RunManifest(out, command, resolved, args.seed)


def _bracket(rep):
    return None if rep.T_q_bracket is None else [float(v) for v in rep.T_q_bracket]


# -- subcommands -------------------------------------------------------------------

def cmd_ml(args):
    for z in args.z:
        print(f"{float(mittag_leffler(args.alpha, args.beta, z)):.15g}")
    return 0


def cmd_solve(args, state):
    resolved, cfg = _load(args)
    out, manifest = _start_run(args, "solve", resolved)
    state["manifest"] = manifest
    traj, rep = run(cfg)
    emit_plotdata(traj, out, cfg.snapshot_every)
    T1, T2 = existence_horizon(cfg)
    report = {"status": traj.status, "classification": rep.classification,
              "T_q_bracket": _bracket(rep), "quench_points": rep.quench_points,
              "final_time": traj.times[-1], "final_max_u": traj.max_values[-1],
              "steps": len(traj) - 1, "horizon": {"r": default_radius(cfg), "T1": T1, "T2": T2},
              "monotone_data": monotonicity_condition(cfg), "parameters": resolved}
    write_json(out / "report.json", report)
    manifest.finalize("ok", {"status": traj.status, "T_q_bracket": _bracket(rep)})
    print(f"{traj.status}: t = {traj.times[-1]:.6g}, max u = {traj.max_values[-1]:.6g}"
          + (f", T_q in [{rep.T_q_bracket[0]:.10g}, {rep.T_q_bracket[1]:.10g}]"
             if rep.T_q_bracket else ""))
    print(f"outputs in {out}")
    return 0


def cmd_steady(args, state):
    resolved, cfg = _load(args)
    out, manifest = _start_run(args, "steady", resolved)
    state["manifest"] = manifest
    st = resolved["steady"]
    res = steady_solve(cfg.domain, cfg.params, cfg.reaction, st["tol"], st["max_iter"])
    write_grid_csv(out / "steady.csv", res.v)
    summary = {"status": res.status, "iterations": res.iterations, "residual": res.residual,
               "sup": sup_norm(res.v), "heuristic": res.heuristic}
    write_json(out / "steady.json", dict(summary, parameters=resolved))
    manifest.finalize("ok", summary)
    print(f"{res.status} after {res.iterations} iterations, sup v = {summary['sup']:.10g}, "
          f"residual = {res.residual:.3e}")
    return 0


def cmd_critical(args, state):
    resolved, cfg = _load(args)
    out, manifest = _start_run(args, "critical", resolved)
    state["manifest"] = manifest
    st = resolved["steady"]
    res = critical_size(cfg.domain, cfg.params, cfg.reaction, args.lo, args.hi, args.tol,
                        steady_tol=st["tol"], steady_max_iter=st["max_iter"],
                        confirm=not args.no_confirm, t_max=resolved["t_max"],
                        h=resolved["h"])
    summary = {"lo": res.lo, "hi": res.hi, "modes": res.modes, "confirmed": res.confirmed,
               "evaluations": [[s, c] for s, c in res.evaluations]}
    write_json(out / "critical.json", dict(summary, parameters=resolved))
    manifest.finalize("ok", {"lo": res.lo, "hi": res.hi, "confirmed": res.confirmed})
    print(f"critical scale in [{res.lo:.10g}, {res.hi:.10g}] (N = {res.modes})")
    return 0


def _grid_cells(path, resolved):
    doc = load_document(path)
    if not isinstance(doc, dict):
        raise ConfigError(str(path), "expected a mapping with alpha, s, scale lists")
    unknown = sorted(set(doc) - {"alpha", "s", "scale"})
    if unknown:
        raise ConfigError(f"grid.{unknown[0]}", "unknown key")
    axes = []
    for key, default in (("alpha", resolved["alpha"]), ("s", resolved["s"]),
                         ("scale", resolved["scale"])):
        vals = doc.get(key, [default])
        if not isinstance(vals, list):
            vals = [vals]
        try:
            vals = [float(v) for v in vals]
        except (TypeError, ValueError):
            raise ConfigError(f"grid.{key}", "expected numbers") from None
        if not vals:
            raise ConfigError(f"grid.{key}", "empty list")
        axes.append(vals)
    return list(itertools.product(*axes))


def cmd_sweep(args, state):
    resolved, cfg = _load(args)
    if resolved["u0"]["kind"] != "zero":
        raise ConfigError("u0", "sweeps classify from zero initial data")
    cells = _grid_cells(args.grid, resolved)
    out, manifest = _start_run(args, "sweep", resolved)
    state["manifest"] = manifest
    rows = sweep(cells, cfg, steady_tol=resolved["steady"]["tol"], workers=args.workers)
    write_text(out / "phase.csv", format_sweep_csv(rows))
    errors = [r for r in rows if r["error"]]
    if errors:
        write_json(out / "errors.json", errors)
    manifest.finalize("ok", {"cells": len(rows), "errors": len(errors)})
    print(f"{len(rows)} cells, {len(errors)} errors; phase table in {out / 'phase.csv'}")
    return 0


def cmd_verify(args):
    unknown = [s for s in args.suites if s not in SUITES]
    if unknown:
        raise ConfigError("suite", f"unknown suite {unknown[0]!r}; choose from {', '.join(SUITES)}")
    checks = verify_all(args.suites or None, seed=args.seed or 0)
    table = format_table(checks)
    print(table)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_text(out / "verify.txt", table + "\n")
    return 0 if all(c.ok for c in checks) else EXIT_RUNTIME


# -- parser ----------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="fracquench", description=__doc__)
    p.add_argument("--version", action="version", version=f"fracquench {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out-dir", help="output directory (default ./runs/<timestamp>)")
        sp.add_argument("--seed", type=int, default=None, help="recorded for reproducibility")

    sp = sub.add_parser("ml", help="evaluate E_{alpha,beta}(z)")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--z", type=float, action="append", required=True,
                    help="argument; repeat for several values")
    common(sp)

    for name, text in (("solve", "time integration"), ("steady", "steady-state solve")):
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--config", required=True)
        common(sp)

    sp = sub.add_parser("critical", help="critical domain scale by bisection")
    sp.add_argument("--config", required=True)
    sp.add_argument("--lo", type=float, required=True)
    sp.add_argument("--hi", type=float, required=True)
    sp.add_argument("--tol", type=float, required=True)
    sp.add_argument("--no-confirm", action="store_true",
                    help="skip the time-solver check of the final endpoints")
    common(sp)

    sp = sub.add_parser("sweep", help="classify over a grid of (alpha, s, scale)")
    sp.add_argument("--config", required=True)
    sp.add_argument("--grid", required=True, help="YAML with alpha, s, scale lists")
    sp.add_argument("--workers", type=int, default=None,
                    help="worker processes (default FRACQ_THREADS or 1)")
    common(sp)

    sp = sub.add_parser("verify", help="run invariant suites")
    sp.add_argument("suites", nargs="*", metavar="SUITE",
                    help=f"any of {', '.join(SUITES)} (default all)")
    common(sp)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    state = {}
    previous = signal.signal(signal.SIGTERM, _on_sigterm)
    try:
        if args.command == "ml":
            return cmd_ml(args)
        if args.command == "verify":
            return cmd_verify(args)
        handler = {"solve": cmd_solve, "steady": cmd_steady, "critical": cmd_critical,
                   "sweep": cmd_sweep}[args.command]
        return handler(args, state)
    except (KeyboardInterrupt, _Interrupted):
        if "manifest" in state:
            state["manifest"].finalize("interrupted")
        print("interrupted", file=sys.stderr)
        return EXIT_INTERRUPTED
    except (ConfigError, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError, ArithmeticError, np.linalg.LinAlgError) as exc:
        if "manifest" in state:
            state["manifest"].finalize("failed", {"error": str(exc)})
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    finally:
        signal.signal(signal.SIGTERM, previous)


if __name__ == "__main__":
    sys.exit(main())
