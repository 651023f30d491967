"""Invariant suites behind ``fracquench verify``.

Each check reports a margin: positive means the invariant holds with that
much room (in the check's own units), negative means it failed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .operators import apply_S, subordination_check, wright_laplace
from .quench import classify_detailed, steady_solve
from .reaction import ReactionSpec
from .solver import SolveConfig, existence_horizon, monotonicity_condition, run
from .spectral import (DomainSpec, FractionalParams, SpectralField, build_basis, from_grid,
                       hs_norm, sup_norm, to_grid)
from .special_fn import (ScalarSeries, caputo_scalar, gamma, mittag_leffler, ml_asymptotic_branch,
                         ml_contour_branch, rl_integral_scalar)

SUITES = ("special_fn", "operators", "solver", "quench")


@dataclass
class Check:
    """``expected_fail`` marks a known, analysed limitation: it is shown as
    XFAIL and does not fail its suite unless it unexpectedly passes."""

    suite: str
    name: str
    passed: bool
    margin: float
    seconds: float = 0.0
    expected_fail: bool = False

    @property
    def status(self):
        if self.expected_fail:
            return "XPASS" if self.passed else "XFAIL"
        return "PASS" if self.passed else "FAIL"

    @property
    def ok(self):
        return self.passed != self.expected_fail


def _check(suite, name, margin, expected_fail=False):
    return Check(suite, name, bool(margin >= 0), float(margin), expected_fail=expected_fail)


# -- special functions ---------------------------------------------------------

# At (0.3, 10) the identity is the (0.3, 1) one sampled with step ~2 (by
# self-similarity), far too coarse for 5e-3 at h = 1e-3.
RL_UNRESOLVED = (0.3, 10.0)


def rl_identity_error(a, mu, h, t_end=1.0, t_from=0.1):
    """Max error of ``J^(1-a)(t^(a-1) E_{a,a}(-mu t^a)) = E_{a,1}(-mu t^a)`` on
    ``[t_from, t_end]``."""
    tt = h * np.arange(int(round(t_end / h)) + 1)
    v = np.zeros_like(tt)
    v[1:] = tt[1:] ** (a - 1) * mittag_leffler(a, a, -mu * tt[1:] ** a)
    J = rl_integral_scalar(ScalarSeries(v, h), 1 - a, singular_exponent=a - 1,
                           sigma_power=a).values
    err = np.abs(J - mittag_leffler(a, 1.0, -mu * tt ** a))
    return float(np.max(err[tt >= t_from - 1e-12]))


def caputo_identity_error(a, mu, h, t_end=1.0, t_from=0.1):
    """Max of ``|D^a E + mu E| / mu`` for ``E = E_{a,1}(-mu t^a)`` on
    ``[t_from, t_end]``."""
    s = ScalarSeries.sample(lambda x: mittag_leffler(a, 1.0, -mu * x ** a), t_end, h)
    d = caputo_scalar(s, a).values
    err = np.abs(d + mu * s.values) / mu
    return float(np.max(err[s.times >= t_from - 1e-12]))


def suite_special_fn(rng):
    out = []
    z = rng.uniform(-30.0, 5.0, 200)
    rel = np.max(np.abs(mittag_leffler(1.0, 1.0, z) / np.exp(z) - 1.0))
    out.append(_check("special_fn", "E_{1,1} = exp (rel 1e-12)", 1e-12 - rel))
    worst = max(abs(mittag_leffler(a, b, 0.0) - 1.0 / gamma(b))
                for a in (0.3, 0.5, 0.8, 1.0) for b in (0.3, 0.5, 1.0, 1.7))
    out.append(_check("special_fn", "E(0) = 1/Gamma(beta) (1e-14)", 1e-14 - worst))
    worst = 0.0
    for a in (0.3, 0.5, 0.8):
        for b in (a, 1.0):
            zz = -50.0
            c = ml_contour_branch(a, b, zz)
            s = ml_asymptotic_branch(a, b, zz)
            worst = max(worst, abs(c - s) / abs(c))
    out.append(_check("special_fn", "regime switch continuity (rel 1e-8)", 1e-8 - worst))
    t = np.arange(0.0, 100.0 + 1e-9, 0.01)
    worst = 0.0
    for a in (0.3, 0.5, 0.8, 1.0):
        e = mittag_leffler(a, 1.0, -t)
        worst = max(worst, float(np.max(np.diff(e))), float(-np.min(e)))
    out.append(_check("special_fn", "E_{a,1}(-t) positive and non-increasing", -worst))
    worst = {}
    for a in (0.3, 0.5, 0.8):
        for mu in (1.0, 10.0):
            worst[a, mu] = rl_identity_error(a, mu, 1e-3)
    hard = RL_UNRESOLVED
    out.append(_check("special_fn", "J^(1-a)(t^(a-1) E_aa) = E_a1 on t>=0.1 (5e-3)",
                      5e-3 - max(v for k, v in worst.items() if k != hard)))
    out.append(_check("special_fn", f"same identity at (a, mu) = {hard}",
                      5e-3 - worst[hard], expected_fail=True))
    worst = max(caputo_identity_error(a, mu, 1e-3) for a in (0.3, 0.5, 0.8) for mu in (1.0, 10.0))
    out.append(_check("special_fn", "Caputo E_a1 = -mu E_a1 on t>=0.1 (5e-3)", 5e-3 - worst))
    # moments of the Wright density: Gamma(1+r)/Gamma(1+a r)
    worst = 0.0
    for a in (0.3, 0.5, 0.8):
        for r in (0, 1, 2):
            val, _ = wright_laplace(a, 0.0, weight_power=r)
            ref = gamma(1.0 + r) / gamma(1.0 + a * r)
            worst = max(worst, abs(val / ref - 1.0))
    out.append(_check("special_fn", "Wright moments (rel 1e-6)", 1e-6 - worst))
    return out


# -- operators -------------------------------------------------------------------

def suite_operators(rng, gamma_fn=gamma, n_fields=1000):
    out = []
    worst_s = worst_p = -np.inf
    for a in (0.3, 0.5, 0.8):
        basis = build_basis(DomainSpec(1, (1.0,), 32), FractionalParams(a, 0.6))
        fields = rng.normal(size=(n_fields,) + basis.shape) / np.arange(1, 33)
        hs0 = np.sqrt(np.sum(basis.frac_eigenvalues * fields ** 2, axis=1))
        for t in (0.01, 0.1, 1.0, 10.0):
            s_mult = mittag_leffler(a, 1.0, -basis.frac_eigenvalues * t ** a)
            p_mult = mittag_leffler(a, a, -basis.frac_eigenvalues * t ** a)
            hs_s = np.sqrt(np.sum(basis.frac_eigenvalues * (fields * s_mult) ** 2, axis=1))
            hs_p = np.sqrt(np.sum(basis.frac_eigenvalues * (fields * p_mult) ** 2, axis=1))
            worst_s = max(worst_s, float(np.max(hs_s / hs0)))
            worst_p = max(worst_p, float(np.max(hs_p / (hs0 / gamma_fn(a)))))
    out.append(_check("operators", "|S(t)u| <= |u| (1+1e-12)", 1.0 + 1e-12 - worst_s))
    out.append(_check("operators", "|P(t)u| <= |u|/Gamma(a) (1+1e-12)", 1.0 + 1e-12 - worst_p))
    worst = 0.0
    for a in (0.3, 0.5, 0.8, 1.0):
        basis = build_basis(DomainSpec(1, (1.0,), 64), FractionalParams(a, 0.6))
        x = basis.collocation[0]
        for _ in range(20):
            g = sum(rng.normal() * np.sin((n + 1) * np.pi * x) / (n + 1) for n in range(6)) ** 2
            u = from_grid(g, basis)
            for t in (1e-3, 0.1, 10.0):
                w = to_grid(apply_S(t, u))
                worst = max(worst, -float(np.min(w)) / sup_norm(u))
    out.append(_check("operators", "S(t) keeps u >= 0 (-1e-8 sup u)", 1e-8 - worst))
    basis = build_basis(DomainSpec(1, (1.0,), 64), FractionalParams(0.5, 0.6))
    u = SpectralField(rng.normal(size=64) / np.arange(1, 65) ** 2, basis)
    gaps = [hs_norm(apply_S(10.0 ** -k, u) - u) for k in range(1, 7)]
    out.append(_check("operators", "S(t)u -> u monotonically as t -> 0",
                      float(np.min(-np.diff(gaps)))))
    worst = max(subordination_check(*args) for args in ((0.5, 1, 1), (0.3, 5, 0.5), (0.8, 0.1, 2)))
    out.append(_check("operators", "subordination identity (1e-6)", 1e-6 - worst))
    return out


# -- solver ------------------------------------------------------------------------

def _pointwise_margins(traj, cfg):
    """Worst positivity, minimum-principle and monotonicity slack over states."""
    c = cfg.reaction.c
    tol = 1e-8 * c
    g0 = to_grid(cfg.u0)
    prev = g0
    pos = minp = mono = np.inf
    check_mono = monotonicity_condition(cfg)
    for i in range(len(traj)):
        g = traj.grid(i)
        pos = min(pos, float(np.min(g)) + tol)
        minp = min(minp, float(np.min(g - g0)) + tol)
        if check_mono and i > 0:
            mono = min(mono, float(np.min(g - prev)) + tol)
        prev = g
    return pos, minp, (mono if check_mono else np.inf)


def suite_solver(rng):
    out = []
    dom = DomainSpec(1, (1.0,), 32)
    params = FractionalParams(0.6, 0.7)
    basis = build_basis(dom, params)
    u0 = SpectralField(0.3 * np.exp(-np.arange(32.0)) * (rng.uniform(0.5, 1.0)), basis)
    cfg = SolveConfig(dom, params, ReactionSpec("constant", 1.0, 0.0), u0, h=0.02, t_max=1.0)
    traj, _ = run(cfg)
    worst = max(float(np.max(np.abs(s.coeffs - apply_S(t, u0).coeffs)))
                for t, s in zip(traj.times, traj.states))
    out.append(_check("solver", "f = 0 reproduces S(t)u0 (1e-12)", 1e-12 - worst))
    margins = [np.inf, np.inf, np.inf]
    for L in (0.3, 10.0):
        cfg = SolveConfig(DomainSpec(1, (L,), 64), FractionalParams(0.7, 0.6), ReactionSpec(),
                          h=0.01, t_max=2.0)
        traj, rep = run(cfg)
        margins = [min(m, v) for m, v in zip(margins, _pointwise_margins(traj, cfg))]
        if rep.classification == "quenched":
            out.append(_check("solver", f"horizon <= T_q (L={L:g})",
                              rep.T_q_bracket[0] - min(existence_horizon(cfg))))
    for name, m in zip(("positivity", "minimum principle", "monotone in time"), margins):
        out.append(_check("solver", f"{name} (1e-8 c)", m))
    return out


# -- quench analysis -------------------------------------------------------------------

def suite_quench(rng):
    out = []
    res = steady_solve(DomainSpec(1, (0.3,), 64), FractionalParams(1.0, 0.6), ReactionSpec(),
                       tol=1e-9, keep_history=True)
    steps = [float(np.min(b - a)) for a, b in zip(res.history[:-1], res.history[1:])]
    out.append(_check("quench", "steady iterates increase (-1e-10)", min(steps) + 1e-10))
    out.append(_check("quench", "steady residual <= 10 tol", 10 * 1e-9 - res.residual))
    classes = {}
    agree = True
    for a in (0.4, 0.7, 1.0):
        for L in (0.3, 10.0):
            cfg = SolveConfig(DomainSpec(1, (L,), 32), FractionalParams(a, 0.6), ReactionSpec(),
                              h=0.02, t_max=20.0)
            rep, _, _ = classify_detailed(cfg)
            classes.setdefault(L, set()).add(rep.classification)
            agree = agree and bool(rep.steady_agrees)
    same = all(len(v) == 1 for v in classes.values())
    out.append(_check("quench", "classification independent of alpha", 0.0 if same else -1.0))
    out.append(_check("quench", "steady and time solver agree", 0.0 if agree else -1.0))
    return out


def verify_all(suites=None, seed=0, gamma_fn=None):
    """Run the named suites (all by default) and return their checks."""
    suites = list(SUITES) if not suites else list(suites)
    unknown = [s for s in suites if s not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite {unknown[0]!r}; choose from {', '.join(SUITES)}")
    rng = np.random.default_rng(seed)
    checks = []
    for name in suites:
        t0 = time.perf_counter()
        if name == "special_fn":
            got = suite_special_fn(rng)
        elif name == "operators":
            got = suite_operators(rng, gamma_fn or gamma)
        elif name == "solver":
            got = suite_solver(rng)
        else:
            got = suite_quench(rng)
        dt = time.perf_counter() - t0
        for c in got:
            c.seconds = dt / len(got)
        checks.extend(got)
    return checks


def format_table(checks):
    """Plain-text table: suite, check, status, margin, and a per-suite summary."""
    lines = [f"{'suite':<11} {'check':<48} {'status':<6} {'margin':>11}"]
    for c in checks:
        lines.append(f"{c.suite:<11} {c.name:<48} {c.status:<6} "
                     f"{c.margin:>11.3e}")
    lines.append("")
    for suite in dict.fromkeys(c.suite for c in checks):
        sub = [c for c in checks if c.suite == suite]
        worst = min((c for c in sub if not c.expected_fail), key=lambda c: c.margin)
        status = "PASS" if all(c.ok for c in sub) else "FAIL"
        lines.append(f"{suite:<11} {status:<6} worst margin {worst.margin:.3e} ({worst.name})")
    return "\n".join(lines)
