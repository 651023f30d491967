"""Reaction terms f(u) with a quenching ceiling c."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# kinds with a singularity at u = c, plus two regular ones used in tests
SINGULAR_KINDS = ("inverse_power", "exponential_singular")
TEST_KINDS = ("constant", "linear")
KINDS = SINGULAR_KINDS + TEST_KINDS


@dataclass(frozen=True)
class ReactionSpec:
    """Nonlinearity and its ceiling.

    ``inverse_power``: ``f(u) = (c - u)^-p``.
    ``exponential_singular``: ``f(u) = exp(p u / (c - u))``.
    ``constant``: ``f(u) = p`` and ``linear``: ``f(u) = p u``; neither blows
    up, they exist for exactness checks.
    """

    kind: str = "inverse_power"
    c: float = 1.0
    p: float = 1.0
    f_max_cutoff: float = 1e12

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown reaction kind {self.kind!r}; expected one of {KINDS}")
        if not self.c > 0:
            raise ValueError("reaction.c must be positive")
        if self.kind in SINGULAR_KINDS and not self.p > 0:
            raise ValueError("reaction.p must be positive")
        if not self.f_max_cutoff > 0:
            raise ValueError("f_max_cutoff must be positive")

    @property
    def singular(self):
        return self.kind in SINGULAR_KINDS

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "constant":
            return np.full_like(u, self.p)
        if self.kind == "linear":
            return self.p * u
        gap = self.c - u
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if self.kind == "inverse_power":
                out = gap ** (-self.p)
            else:
                out = np.exp(self.p * u / gap)
        return np.where(gap > 0, out, np.inf)

    def lipschitz_at(self, r):
        """Sup-norm Lipschitz constant of f on ``{|u| <= r}``, ``r < c``.

        f is increasing and convex on [0, c), so this is ``f'(r)``.
        """
        if self.kind == "constant":
            return 0.0
        if self.kind == "linear":
            return abs(self.p)
        if not r < self.c:
            raise ValueError("r must lie below the ceiling c")
        gap = self.c - r
        if self.kind == "inverse_power":
            return self.p / gap ** (self.p + 1.0)
        return float(np.exp(self.p * r / gap) * self.p * self.c / gap ** 2)
