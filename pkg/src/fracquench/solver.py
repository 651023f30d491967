"""Time stepping of the mild formulation with exact Mittag-Leffler weights.

Per mode ``k`` the state at ``t_{n+1}`` is

    u_{n+1,k} = E_{a,1}(-mu_k t_{n+1}^a) u_{0,k} + sum_j W_{j,k} F_{j,k},

where ``F_j`` are the coefficients of ``f(u(t_j))`` and ``W_{j,k}`` is the
exact integral of ``tau^(a-1) E_{a,a}(-mu_k tau^a)`` over the offsets
spanned by ``[t_j, t_{j+1}]``. Only ``f`` is frozen (at the left end of each
cell), so the scheme is exact for ``f = 0``.

Times are integer ticks of ``h / 2**K`` so that halved steps land on exact
offsets and the ``E_{a,1}`` rows can be cached by offset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .reaction import ReactionSpec
from .spectral import (DomainSpec, FractionalParams, SpectralField, apply_fractional_laplacian,
                       build_basis, from_grid, grid_argmax_points, l2_norm, hs_norm, sup_norm,
                       to_grid)
from .special_fn import gamma, mittag_leffler, ml_derivative_weight

STATUSES = ("running", "reached_horizon", "quenched", "step_underflow")

# E rows are precomputed in blocks of this many offsets on the uniform path
_TABLE_BLOCK = 256
_WEIGHT_SERIES_SWITCH = 1e-6


@dataclass
class SolveConfig:
    """Everything needed for one run; ``u0`` defaults to zero."""

    domain: DomainSpec
    params: FractionalParams
    reaction: ReactionSpec
    u0: Optional[SpectralField] = None
    h: float = 1e-3
    t_max: float = 1.0
    quench_eps: Optional[float] = None
    h_min: float = 1e-10
    snapshot_every: int = 0
    basis: object = dc_field(default=None, repr=False)

    def __post_init__(self):
        if self.quench_eps is None:
            self.quench_eps = 1e-3 * self.reaction.c
        if self.basis is None:
            self.basis = build_basis(self.domain, self.params)
        if self.u0 is None:
            self.u0 = self.basis.zeros()
        elif self.u0.basis.shape != self.basis.shape:
            raise ValueError("u0 does not match the domain resolution")
        else:
            self.u0 = SpectralField(self.u0.coeffs, self.basis)
        c = self.reaction.c
        if not 0 < self.quench_eps < c:
            raise ValueError("quench_eps must lie in (0, c)")
        if not self.h > self.h_min > 0:
            raise ValueError("need h > h_min > 0")
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.snapshot_every < 0:
            raise ValueError("snapshot_every must be >= 0")
        grid = to_grid(self.u0)
        if np.min(grid) < -1e-12 * c:
            raise ValueError("u0 must be non-negative (0 <= u0 << c)")
        if sup_norm(self.u0, grid) >= c:
            raise ValueError("u0 amplitude must stay below c (0 <= u0 << c)")


@dataclass(eq=False)
class QuenchReport:
    """Outcome of a run or of a classification."""

    classification: str
    T_q_bracket: Optional[tuple] = None
    quench_points: list = dc_field(default_factory=list)
    steady_agrees: Optional[bool] = None

    def __post_init__(self):
        if self.classification not in ("quenched", "global", "inconclusive"):
            raise ValueError(f"bad classification {self.classification!r}")
        if self.classification == "quenched" and self.T_q_bracket is None:
            raise ValueError("a quenched report needs a bracket")
        if self.classification == "global" and self.T_q_bracket is not None:
            raise ValueError("a global report has no bracket")


@dataclass(eq=False)
class Trajectory:
    """Accepted states of a run. ``h_used[i]`` is the step that produced
    state ``i`` (0 for the initial state)."""

    times: list
    states: list
    max_values: list
    status: str = "running"
    h_used: list = dc_field(default_factory=list)
    T_q_bracket: Optional[tuple] = None
    _engine: object = dc_field(default=None, repr=False)

    def grid(self, i):
        return to_grid(self.states[i])

    def __len__(self):
        return len(self.times)


class _Engine:
    """History, kernel tables and step control for one run."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.basis = cfg.basis
        self.alpha = cfg.params.alpha
        self.mu = np.ascontiguousarray(self.basis.frac_eigenvalues.ravel())
        self.c = cfg.reaction.c
        self.eps = cfg.quench_eps
        # tick unit h / 2**K is the smallest step, at most h_min
        self.K = max(0, math.ceil(math.log2(cfg.h / cfg.h_min)))
        self.h0 = cfg.h
        self.hs0 = 2 ** self.K
        self.hs = self.hs0
        self.t_end = math.ceil(cfg.t_max * self.hs0 / cfg.h - 1e-9)
        self.ticks = [0]
        self.u0 = cfg.u0.coeffs.ravel().copy()
        cap = 64
        self.F = np.empty((cap, self.mu.size))
        self.uniform = True
        self.etab = np.ones((1, self.mu.size))
        self.wtab = np.empty((0, self.mu.size))
        self.cache = {}
        self.u_last = self.u0.copy()

    # -- kernel tables ---------------------------------------------------

    def _tau(self, ticks):
        return np.asarray(ticks, dtype=float) * self.h0 / self.hs0

    def _e_rows(self, tau):
        return mittag_leffler(self.alpha, 1.0, -np.outer(tau ** self.alpha, self.mu))

    def _weight_rows(self, e_lo, e_hi, tau_lo, tau_hi):
        w = np.maximum((e_lo - e_hi) / self.mu, 0.0)
        tiny = self.mu[0] * tau_hi ** self.alpha < _WEIGHT_SERIES_SWITCH
        for i in np.flatnonzero(np.atleast_1d(tiny)):
            w[i] = ml_derivative_weight(self.alpha, self.mu, tau_lo[i], tau_hi[i])
        return w

    def _grow_uniform(self, m_needed):
        # etab[m] = E(-mu (m h)^a); wtab[m] integrates offsets [m h, (m+1) h]
        m0 = self.etab.shape[0]
        if m_needed < m0:
            return
        m1 = max(m_needed + 1, m0 + _TABLE_BLOCK)
        new = self._e_rows(self.h0 * np.arange(m0, m1, dtype=float))
        self.etab = np.vstack([self.etab, new])
        w0 = self.wtab.shape[0]
        m = np.arange(w0, m1 - 1, dtype=float)
        w = self._weight_rows(self.etab[w0:m1 - 1], self.etab[w0 + 1:m1], m * self.h0,
                              (m + 1) * self.h0)
        self.wtab = np.vstack([self.wtab, w])

    def _e_offsets(self, offsets):
        """E rows for arbitrary tick offsets (non-uniform path)."""
        missing = sorted({d for d in offsets if d not in self.cache})
        if missing:
            rows = self._e_rows(self._tau(missing))
            for d, row in zip(missing, rows):
                self.cache[d] = row
        return np.stack([self.cache[d] for d in offsets])

    def _leave_uniform(self):
        self.uniform = False
        for m in range(self.etab.shape[0]):
            self.cache[m * self.hs0] = self.etab[m]

    # -- one candidate -----------------------------------------------------

    def candidate(self, hs):
        """Coefficients at ``ticks[-1] + hs`` (flat array)."""
        n = len(self.ticks) - 1
        F = self.F[:n + 1]
        if self.alpha == 1.0:
            h = hs * self.h0 / self.hs0
            decay = np.exp(-self.mu * h)
            return decay * self.u_last - np.expm1(-self.mu * h) / self.mu * F[n]
        if self.uniform and hs == self.hs0:
            self._grow_uniform(n + 2)
            hist = np.einsum("jk,jk->k", self.wtab[n::-1], F)
            return self.etab[n + 1] * self.u0 + hist
        if self.uniform:
            self._leave_uniform()
        t_new = self.ticks[-1] + hs
        offsets = [t_new - t for t in self.ticks] + [0]
        E = self._e_offsets(offsets)
        tau = self._tau(offsets)
        W = self._weight_rows(E[1:], E[:-1], tau[1:], tau[:-1])
        return E[0] * self.u0 + np.einsum("jk,jk->k", W, F)

    def accept(self, coeffs, f_coeffs, hs):
        n = len(self.ticks)
        if n >= self.F.shape[0]:
            self.F = np.vstack([self.F, np.empty_like(self.F)])
        self.F[n] = f_coeffs
        self.ticks.append(self.ticks[-1] + hs)
        self.u_last = coeffs

    def set_f0(self, f_coeffs):
        self.F[0] = f_coeffs


def _evaluate(cfg, coeffs):
    """Field, grid, sup and coefficients of f, or None when rejected."""
    if not np.all(np.isfinite(coeffs)):
        return None
    field = SpectralField(coeffs.reshape(cfg.basis.shape), cfg.basis)
    grid = to_grid(field)
    sup = sup_norm(field, grid)
    if not np.isfinite(sup) or sup >= cfg.reaction.c:
        return None
    fv = cfg.reaction(grid)
    if not np.all(np.isfinite(fv)) or np.max(fv) > cfg.reaction.f_max_cutoff:
        return None
    return field, grid, sup, from_grid(fv, cfg.basis).coeffs.ravel()


def start(cfg):
    """Trajectory holding only the initial state."""
    eng = _Engine(cfg)
    ev = _evaluate(cfg, eng.u0)
    if ev is None:
        raise ValueError("reaction cannot be evaluated at u0")
    field, grid, sup, fc = ev
    eng.set_f0(fc)
    return Trajectory([0.0], [field], [sup], "running", [0.0], None, eng)


def step(traj, cfg):
    """Advance by one accepted step (halving as needed) and update status."""
    if traj.status != "running":
        raise ValueError(f"cannot step a trajectory with status {traj.status}")
    eng = traj._engine
    c, eps = eng.c, eng.eps
    sup_last = traj.max_values[-1]
    while True:
        hs = eng.hs
        ev = _evaluate(cfg, eng.candidate(hs))
        if ev is None:
            if hs > 1:
                eng.hs //= 2
                continue
            h = hs * eng.h0 / eng.hs0
            if sup_last >= c - 10 * eps:
                traj.status = "quenched"
                traj.T_q_bracket = (traj.times[-1], traj.times[-1] + h)
            else:
                traj.status = "step_underflow"
            return traj
        field, grid, sup, fc = ev
        # localise the crossing of c - eps, and never close more than half
        # of the remaining gap in one explicit step while h can still shrink
        if hs > 1 and (sup >= c - eps or sup - sup_last > 0.5 * (c - sup_last)):
            eng.hs //= 2
            continue
        break
    eng.accept(field.coeffs.ravel(), fc, hs)
    t = eng.ticks[-1] * eng.h0 / eng.hs0
    traj.times.append(t)
    traj.states.append(field)
    traj.max_values.append(sup)
    traj.h_used.append(hs * eng.h0 / eng.hs0)
    if sup >= c - eps:
        traj.status = "quenched"
        traj.T_q_bracket = (t, t + hs * eng.h0 / eng.hs0)
        return traj
    if eng.ticks[-1] >= eng.t_end:
        traj.status = "reached_horizon"
        return traj
    # near the ceiling halve when the last rise would reach c - eps within a
    # few steps; a flat approach keeps h so that steady states do not stall
    rise = sup - sup_last
    if sup > c - 10 * eps and eng.hs > 1 and rise > 0.25 * (c - eps - sup):
        eng.hs //= 2
    return traj


def quench_points(field, eps, grid=None):
    """Collocation points within ``eps`` of the maximum."""
    if grid is None:
        grid = to_grid(field)
    return grid_argmax_points(field.basis, grid, eps)


def run(cfg, callback=None):
    """Step until the horizon, quenching or step underflow.

    ``callback(traj)`` is called after every accepted step.
    """
    traj = start(cfg)
    while traj.status == "running":
        n = len(traj.times)
        step(traj, cfg)
        if callback is not None and len(traj.times) > n:
            callback(traj)
    return traj, report_of(traj, cfg)


def report_of(traj, cfg):
    if traj.status == "quenched":
        pts = quench_points(traj.states[-1], cfg.quench_eps)
        return QuenchReport("quenched", traj.T_q_bracket, pts)
    if traj.status == "reached_horizon":
        return QuenchReport("global")
    return QuenchReport("inconclusive")


def horizon_times(alpha, c, r0, lipschitz):
    """``T1 = ((c - r0) G(1+a) / (L (1 + c)))^(1/a)``, ``T2 = (G(1+a)/L)^(1/a)``."""
    if lipschitz <= 0:
        return math.inf, math.inf
    g = gamma(1.0 + alpha)
    t1 = ((c - r0) * g / (lipschitz * (1.0 + c))) ** (1.0 / alpha)
    t2 = (g / lipschitz) ** (1.0 / alpha)
    return t1, t2


def existence_horizon(cfg, r=None):
    """Local existence times on the ball of radius ``r`` around zero.

    The Lipschitz constant is the sup-norm one, ``f'(r)``, on
    ``{|u| <= r}``; the guaranteed horizon is ``min(T1, T2)``. ``r``
    defaults to :func:`default_radius`. Radii close to ``sup|u0|`` make the
    ``T1`` formula optimistic, since it keeps ``c - r0`` rather than the ball
    radius.
    """
    if r is None:
        r = default_radius(cfg)
    r0 = sup_norm(cfg.u0)
    c = cfg.reaction.c
    if not r0 < r < c:
        raise ValueError(f"need sup|u0| = {r0:g} < r < c = {c:g}, got r = {r:g}")
    return horizon_times(cfg.params.alpha, c, r0, cfg.reaction.lipschitz_at(r))


def default_radius(cfg):
    """Midpoint ``(sup|u0| + c) / 2``, the radius used for reported horizons."""
    return 0.5 * (sup_norm(cfg.u0) + cfg.reaction.c)


def monotonicity_condition(cfg):
    """True iff ``-(-Delta)^s u0 + f(u0) > 0`` at every collocation point."""
    lap = to_grid(apply_fractional_laplacian(cfg.u0))
    return bool(np.all(-lap + cfg.reaction(to_grid(cfg.u0)) > 0))


def trace_rows(traj):
    """``(t, max_u, l2, hs, h_used)`` per stored state."""
    return [(t, m, l2_norm(s), hs_norm(s), h)
            for t, m, s, h in zip(traj.times, traj.max_values, traj.states, traj.h_used)]
