"""Dirichlet sine basis on intervals and rectangles.

Functions on ``(0, L1) x ... x (0, Ld)`` are stored by their coefficients
against the L2-orthonormal Dirichlet eigenfunctions
``e_n(x) = prod_i sqrt(2/L_i) sin(n_i pi x_i / L_i)``. Grid values live on
the interior collocation points ``x_i = i L/(N+1)``; the type-I discrete
sine transform maps between the two exactly.

2D arrays are indexed ``[n2, n1]`` so that the flattened (row-major) order
has ``n1`` fastest; grid arrays are indexed ``[y, x]`` the same way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.fft import dstn, idstn


@dataclass(frozen=True)
class FractionalParams:
    """Time order ``alpha`` and space order ``s``, both in (0, 1]."""

    alpha: float
    s: float

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not 0 < self.s <= 1:
            raise ValueError(f"s must lie in (0, 1], got {self.s}")


@dataclass(frozen=True)
class DomainSpec:
    """Box ``prod (0, scale * L_i)`` with ``modes_per_dim`` modes per axis."""

    dim: int
    lengths: tuple
    modes_per_dim: int = 128
    scale: float = 1.0

    def __post_init__(self):
        lengths = tuple(float(v) for v in np.atleast_1d(self.lengths))
        object.__setattr__(self, "lengths", lengths)
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if len(lengths) != self.dim:
            raise ValueError(f"expected {self.dim} lengths, got {len(lengths)}")
        if self.modes_per_dim < 4:
            raise ValueError("modes_per_dim must be >= 4")
        if not self.scale > 0 or any(v <= 0 for v in lengths):
            raise ValueError("lengths and scale must be positive")

    @property
    def effective_lengths(self):
        return tuple(self.scale * v for v in self.lengths)

    @property
    def n_modes(self):
        return self.modes_per_dim ** self.dim

    def scaled(self, scale):
        return DomainSpec(self.dim, self.lengths, self.modes_per_dim, scale)


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """Eigenpairs of the Dirichlet Laplacian on a box and their powers ``s``."""

    domain: DomainSpec
    params: FractionalParams
    eigenvalues: np.ndarray = dc_field(repr=False)
    frac_eigenvalues: np.ndarray = dc_field(repr=False)
    collocation: tuple = dc_field(repr=False)

    @property
    def shape(self):
        return self.eigenvalues.shape

    @property
    def lengths(self):
        return self.domain.effective_lengths

    @property
    def cell_volume(self):
        n = self.domain.modes_per_dim
        return math.prod(L / (n + 1) for L in self.lengths)

    def grid_points(self):
        """Collocation points as an ``(N**d, d)`` array in flattened order."""
        mesh = np.meshgrid(*self.collocation, indexing="xy")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def zeros(self):
        return SpectralField(np.zeros(self.shape), self)

    def with_alpha(self, alpha):
        """Same spatial data, different time order (shares the arrays)."""
        return SpectralBasis(self.domain, FractionalParams(alpha, self.params.s),
                             self.eigenvalues, self.frac_eigenvalues, self.collocation)


def build_basis(domain, params):
    """Eigenvalues ``(n pi / (scale L))^2`` per axis, tensor sums in 2D."""
    n = np.arange(1, domain.modes_per_dim + 1, dtype=float)
    per_dim = [(n * math.pi / L) ** 2 for L in domain.effective_lengths]
    if domain.dim == 1:
        lam = per_dim[0]
    else:
        lam = per_dim[1][:, None] + per_dim[0][None, :]
    lam = np.ascontiguousarray(lam)
    lam.setflags(write=False)
    mu = lam ** params.s
    mu.setflags(write=False)
    nodes = tuple(
        np.arange(1, domain.modes_per_dim + 1) * L / (domain.modes_per_dim + 1)
        for L in domain.effective_lengths
    )
    return SpectralBasis(domain, params, lam, mu, nodes)


def _transform_scale(basis):
    # orthonormal DST-I times prod sqrt((N+1)/L_i) maps coefficients to values
    n = basis.domain.modes_per_dim
    return math.prod(math.sqrt((n + 1) / L) for L in basis.lengths)


@dataclass(eq=False)
class SpectralField:
    """Coefficients of a function against the orthonormal sine basis."""

    coeffs: np.ndarray
    basis: SpectralBasis

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != self.basis.shape:
            raise ValueError(
                f"coefficient shape {self.coeffs.shape} does not match basis {self.basis.shape}")

    def copy(self):
        return SpectralField(self.coeffs.copy(), self.basis)

    def __add__(self, other):
        return SpectralField(self.coeffs + other.coeffs, self.basis)

    def __sub__(self, other):
        return SpectralField(self.coeffs - other.coeffs, self.basis)

    def __mul__(self, scalar):
        return SpectralField(self.coeffs * scalar, self.basis)

    __rmul__ = __mul__

    def to_grid(self):
        return to_grid(self)

    def hs_norm(self):
        return hs_norm(self)

    def l2_norm(self):
        return l2_norm(self)

    def sup_norm(self):
        return sup_norm(self)


def to_grid(field):
    """Values at the collocation points (type-I DST along each axis)."""
    return _transform_scale(field.basis) * dstn(field.coeffs, type=1, norm="ortho")


def from_grid(values, basis):
    """Coefficients of the sine interpolant through the collocation values.

    Equals the rectangle-rule projection ``sum_i u(x_i) e_n(x_i) dV`` and is
    the exact inverse of :func:`to_grid`.
    """
    values = np.asarray(values, dtype=float)
    if values.shape != basis.shape:
        raise ValueError(f"grid shape {values.shape} does not match basis {basis.shape}")
    return SpectralField(idstn(values, type=1, norm="ortho") / _transform_scale(basis), basis)


def apply_fractional_laplacian(field):
    """``(-Delta)^s``: multiply each coefficient by ``lambda_n^s``."""
    return SpectralField(field.coeffs * field.basis.frac_eigenvalues, field.basis)


def hs_norm(field):
    """``(sum lambda_n^s w_n^2)^(1/2)``."""
    return float(np.sqrt(np.sum(field.basis.frac_eigenvalues * field.coeffs ** 2)))


def l2_norm(field):
    return float(np.sqrt(np.sum(field.coeffs ** 2)))


def _sine_matrix(points, length, n_modes):
    n = np.arange(1, n_modes + 1)
    return math.sqrt(2.0 / length) * np.sin(np.outer(points, n) * (math.pi / length))


def eval_tensor(field, axes_points):
    """Values on the tensor grid spanned by per-axis point arrays."""
    basis = field.basis
    n = basis.domain.modes_per_dim
    mats = [_sine_matrix(np.asarray(p, float), L, n) for p, L in zip(axes_points, basis.lengths)]
    if basis.domain.dim == 1:
        return mats[0] @ field.coeffs
    return mats[1] @ field.coeffs @ mats[0].T


def midpoints(basis):
    """Per-axis midpoints of consecutive points of ``{0, x_1..x_N, L}``."""
    out = []
    for nodes, L in zip(basis.collocation, basis.lengths):
        full = np.concatenate([[0.0], nodes, [L]])
        out.append(0.5 * (full[1:] + full[:-1]))
    return out


def sup_norm(field, grid_values=None):
    """Max of ``|u|`` over the collocation points and the cell midpoints."""
    if grid_values is None:
        grid_values = to_grid(field)
    mid = eval_tensor(field, midpoints(field.basis))
    return float(max(np.max(np.abs(grid_values)), np.max(np.abs(mid))))


def eval_at(field, points):
    """Evaluate ``sum w_n e_n(x)`` at arbitrary points of the closed box.

    ``points`` has shape ``(m, d)`` (or ``(m,)`` in 1D).
    """
    basis = field.basis
    pts = np.asarray(points, dtype=float)
    if basis.domain.dim == 1 and pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[1] != basis.domain.dim:
        raise ValueError(f"points must have shape (m, {basis.domain.dim})")
    tol = 1e-12
    for i, L in enumerate(basis.lengths):
        if np.any(pts[:, i] < -tol * L) or np.any(pts[:, i] > L * (1 + tol)):
            raise ValueError(f"point outside the domain along axis {i}")
    n = basis.domain.modes_per_dim
    mats = [_sine_matrix(pts[:, i], L, n) for i, L in enumerate(basis.lengths)]
    if basis.domain.dim == 1:
        return mats[0] @ field.coeffs
    # sum_{n2,n1} w[n2,n1] s2[m,n2] s1[m,n1]
    return np.einsum("mi,ij,mj->m", mats[1], field.coeffs, mats[0])


def write_grid_csv(path, field, grid_values=None):
    """CSV snapshot with header ``x[,y],u`` and 17 significant digits."""
    if grid_values is None:
        grid_values = to_grid(field)
    pts = field.basis.grid_points()
    header = "x,u" if field.basis.domain.dim == 1 else "x,y,u"
    rows = np.column_stack([pts, np.ravel(grid_values)])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def grid_argmax_points(basis, grid_values, eps):
    """Coordinates of collocation points within ``eps`` of the grid maximum."""
    vals = np.ravel(grid_values)
    idx = np.flatnonzero(vals >= vals.max() - eps)
    pts = basis.grid_points()[idx]
    return [tuple(float(v) for v in p) for p in pts]
