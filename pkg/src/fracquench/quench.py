"""Steady states, quench/global classification, critical size and sweeps.

Global existence is equivalent to the existence of a steady state
``(-Delta)^s v = f(v)`` below the ceiling, which does not involve ``alpha``.
The steady problem is solved by the monotone iteration
``v^{k+1} = A^{-1} f(v^k)`` from zero, which increases to the minimal
solution when one exists and otherwise crosses ``c``.
"""

from __future__ import annotations

import dataclasses
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .solver import QuenchReport, SolveConfig, run
from .spectral import SpectralField, build_basis, from_grid, sup_norm, to_grid

__all__ = ["SteadyResult", "CriticalSizeResult", "QuenchReport", "BracketError",
           "steady_solve", "classify", "classify_detailed", "critical_size", "sweep",
           "SWEEP_COLUMNS", "worker_count"]

SWEEP_COLUMNS = ("alpha", "s", "scale", "classification", "T_q_lo", "T_q_hi",
                 "steady_status", "residual")


class BracketError(ValueError):
    """The initial bracket does not straddle the critical scale."""


@dataclass(eq=False)
class SteadyResult:
    """``heuristic`` marks a ``no_solution`` decided by stalled contraction
    rather than by crossing the ceiling."""

    status: str
    v: SpectralField
    iterations: int
    residual: float
    heuristic: bool = False
    history: Optional[list] = dc_field(default=None, repr=False)


def steady_solve(domain, params, reaction, tol=1e-9, max_iter=100000, check_every=100,
                 keep_history=False):
    """Minimal steady state by monotone iteration from zero.

    Converged when the grid sup of the update is at most ``tol`` and the L2
    residual ``|A v - f(v)|`` at most ``10 tol``; ``no_solution`` as soon as
    ``sup|v| >= c - tol``. Every ``check_every`` iterations the update size
    is compared with the one ``check_every`` iterations earlier; five
    consecutive ratios of at least ``1 - 1e-6`` with ``sup|v| > c/2`` also
    give ``no_solution``, flagged as heuristic.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    basis = build_basis(domain, params)
    mu = basis.frac_eigenvalues
    c = reaction.c
    v = basis.zeros()
    grid = to_grid(v)
    history = [grid.copy()] if keep_history else None
    change_ref = None
    stalls = 0
    residual = np.inf
    for k in range(max_iter + 1):
        sup = sup_norm(v, grid)
        if sup >= c - tol:
            return SteadyResult("no_solution", v, k, residual, False, history)
        fc = from_grid(reaction(grid), basis).coeffs
        residual = float(np.sqrt(np.sum((mu * v.coeffs - fc) ** 2)))
        if k == max_iter:
            break
        v_new = SpectralField(fc / mu, basis)
        grid_new = to_grid(v_new)
        change = float(np.max(np.abs(grid_new - grid)))
        if change <= tol and k > 0:
            fc_new = from_grid(reaction(grid_new), basis).coeffs
            res_new = float(np.sqrt(np.sum((mu * v_new.coeffs - fc_new) ** 2)))
            if res_new <= 10 * tol and sup_norm(v_new, grid_new) < c - tol:
                if keep_history:
                    history.append(grid_new.copy())
                return SteadyResult("converged", v_new, k + 1, res_new, False, history)
        if k % check_every == 0 and k > 0:
            if change_ref is not None and change >= (1 - 1e-6) * change_ref and sup > 0.5 * c:
                stalls += 1
                if stalls >= 5:
                    return SteadyResult("no_solution", v_new, k + 1, residual, True, history)
            else:
                stalls = 0
            change_ref = change
        v, grid = v_new, grid_new
        if keep_history:
            history.append(grid.copy())
    return SteadyResult("max_iter", v, max_iter, residual, False, history)


def _settling(traj, c):
    """True when the per-time change of the state decays over the run or
    has dropped to round-off."""
    n = len(traj.states)
    if n < 5:
        return False

    def rate(i):
        d = to_grid(traj.states[i] - traj.states[i - 1])
        return float(np.max(np.abs(d))) / (traj.times[i] - traj.times[i - 1])

    end = rate(n - 1)
    return end <= 1e-10 * c or end < rate(n // 2)


def classify_detailed(cfg, steady_tol=1e-9, steady_max_iter=100000):
    """Report together with the steady result and the trajectory."""
    if np.any(cfg.u0.coeffs != 0):
        raise ValueError("classification expects u0 = 0")
    steady = steady_solve(cfg.domain, cfg.params, cfg.reaction, steady_tol, steady_max_iter)
    traj, rep = run(cfg)
    steady_global = {"converged": True, "no_solution": False}.get(steady.status)
    if traj.status == "quenched":
        time_global = False
    elif traj.status == "reached_horizon":
        time_global = True
    else:
        time_global = None
    agrees = None if steady_global is None or time_global is None else (steady_global == time_global)
    if traj.status == "quenched":
        report = QuenchReport("quenched", rep.T_q_bracket, rep.quench_points, agrees)
    elif time_global and steady_global and _settling(traj, cfg.reaction.c):
        report = QuenchReport("global", None, [], agrees)
    else:
        report = QuenchReport("inconclusive", None, [], agrees)
    return report, steady, traj


def classify(cfg, steady_tol=1e-9):
    """Quenched iff the time run quenches; global iff the run reaches the
    horizon while settling and the steady solve converges."""
    return classify_detailed(cfg, steady_tol)[0]


@dataclass(eq=False)
class CriticalSizeResult:
    """Bracket ``[lo, hi]`` on the scale; ``evaluations`` lists every
    ``(scale, classification)`` in call order. ``confirmed`` holds the time
    solver's verdicts at the final endpoints."""

    lo: float
    hi: float
    evaluations: list
    modes: int
    confirmed: dict = dc_field(default_factory=dict)


def _steady_class(base, params, reaction, scale, tol, max_iter):
    res = steady_solve(base.scaled(scale), params, reaction, tol, max_iter)
    return {"converged": "global", "no_solution": "quenched"}.get(res.status, "inconclusive")


def critical_size(base, params, reaction, lo, hi, tol, steady_tol=1e-9, steady_max_iter=100000,
                  confirm=True, t_max=50.0, h=0.01):
    """Bisect on the scale with the steady classifier.

    Raises :class:`BracketError` unless ``lo`` is global and ``hi``
    quenching. With ``confirm`` the time solver is run at both final
    endpoints from zero data up to ``t_max``.
    """
    if not 0 < lo < hi:
        raise BracketError("need 0 < lo < hi")
    if not tol > 0:
        raise ValueError("tol must be positive")
    evals = []

    def cls(scale):
        out = _steady_class(base, params, reaction, scale, steady_tol, steady_max_iter)
        evals.append((scale, out))
        return out

    if cls(lo) != "global":
        raise BracketError(f"scale {lo} is not classified global")
    if cls(hi) != "quenched":
        raise BracketError(f"scale {hi} is not classified quenching")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        out = cls(mid)
        if out == "global":
            lo = mid
        elif out == "quenched":
            hi = mid
        else:
            raise BracketError(f"steady solve inconclusive at scale {mid}")
    result = CriticalSizeResult(lo, hi, evals, base.modes_per_dim)
    if confirm:
        for name, scale in (("lo", lo), ("hi", hi)):
            cfg = SolveConfig(base.scaled(scale), params, reaction, h=h, t_max=t_max)
            traj, _ = run(cfg)
            result.confirmed[name] = traj.status
    return result


def worker_count():
    """Positive integer from ``FRACQ_THREADS``; one worker when unset."""
    raw = os.environ.get("FRACQ_THREADS")
    if raw is None or raw.strip() == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"FRACQ_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"FRACQ_THREADS must be a positive integer, got {raw!r}")
    return n


def _sweep_cell(args):
    base, alpha, s, scale, steady_tol = args
    row = {"alpha": alpha, "s": s, "scale": scale}
    try:
        params = dataclasses.replace(base.params, alpha=alpha, s=s)
        cfg = dataclasses.replace(base, params=params, domain=base.domain.scaled(scale),
                                  basis=None, u0=None)
        report, steady, _ = classify_detailed(cfg, steady_tol)
        bracket = report.T_q_bracket or (None, None)
        row.update(classification=report.classification, T_q_lo=bracket[0], T_q_hi=bracket[1],
                   steady_status=steady.status, residual=steady.residual, error=None)
    except Exception as exc:  # recorded per cell, the sweep goes on
        row.update(classification="error", T_q_lo=None, T_q_hi=None, steady_status=None,
                   residual=None, error=f"{type(exc).__name__}: {exc}")
    return row


def sweep(grid, base, steady_tol=1e-9, workers=None):
    """Classify every ``(alpha, s, scale)`` of ``grid``; rows in grid order."""
    cells = [(base, float(a), float(s), float(sc), steady_tol) for a, s, sc in grid]
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(cells) <= 1:
        return [_sweep_cell(cell) for cell in cells]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_cell, cells))


def format_sweep_csv(rows):
    """CSV text with the sweep header; empty fields for absent values."""
    def fmt(v):
        if v is None:
            return ""
        if isinstance(v, float):
            return f"{v:.17g}"
        return str(v)

    lines = [",".join(SWEEP_COLUMNS)]
    for row in rows:
        lines.append(",".join(fmt(row[k]) for k in SWEEP_COLUMNS))
    return "\n".join(lines) + "\n"
