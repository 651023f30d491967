import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracquench.spectral import (DomainSpec, FractionalParams, SpectralField,
                                 apply_fractional_laplacian, build_basis, eval_at, from_grid,
                                 grid_argmax_points, hs_norm, l2_norm, sup_norm, to_grid,
                                 write_grid_csv)


def basis_1d(L=math.pi, n=8, s=1.0, scale=1.0, alpha=0.5):
    return build_basis(DomainSpec(1, (L,), n, scale), FractionalParams(alpha, s))


@pytest.mark.parametrize("dim, lengths, scale, n, expected", [
    (1, (math.pi,), 1.0, 4, [1, 4, 9, 16]),
    (1, (math.pi,), 2.0, 2, [0.25, 1.0]),
    (2, (math.pi, math.pi), 1.0, 2, [2, 5, 5, 8]),
])
def test_eigenvalues(dim, lengths, scale, n, expected):
    basis = build_basis(DomainSpec(dim, lengths, max(n, 4), scale), FractionalParams(0.5, 1.0))
    got = np.sort(basis.eigenvalues[tuple(slice(0, n) for _ in range(dim))].ravel())
    np.testing.assert_allclose(got, expected, rtol=1e-14)


def test_fractional_eigenvalues_are_powers():
    basis = basis_1d(s=0.3)
    np.testing.assert_allclose(basis.frac_eigenvalues, basis.eigenvalues ** 0.3, rtol=1e-15)


def test_arrays_are_read_only():
    basis = basis_1d()
    with pytest.raises(ValueError):
        basis.eigenvalues[0] = 2.0


@pytest.mark.parametrize("kwargs", [
    dict(dim=3, lengths=(1, 1, 1)), dict(dim=1, lengths=(1, 2)), dict(dim=1, lengths=(-1,)),
    dict(dim=1, lengths=(1,), modes_per_dim=2), dict(dim=1, lengths=(1,), scale=0.0),
])
def test_domain_validation(kwargs):
    with pytest.raises(ValueError):
        DomainSpec(**kwargs)


@pytest.mark.parametrize("alpha, s", [(0.0, 0.5), (1.5, 0.5), (0.5, 0.0), (0.5, 1.2)])
def test_params_validation(alpha, s):
    with pytest.raises(ValueError):
        FractionalParams(alpha, s)


def test_single_mode_grid():
    basis = basis_1d(n=4)
    w = SpectralField(np.array([1.0, 0, 0, 0]), basis)
    x = basis.collocation[0]
    np.testing.assert_allclose(to_grid(w), math.sqrt(2 / math.pi) * np.sin(x), atol=1e-15)
    assert np.all(to_grid(basis.zeros()) == 0.0)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), dim=st.sampled_from([1, 2]))
def test_round_trip(seed, dim):
    rng = np.random.default_rng(seed)
    basis = build_basis(DomainSpec(dim, (1.3, 0.7)[:dim], 12), FractionalParams(0.5, 0.7))
    w = SpectralField(rng.normal(size=basis.shape), basis)
    np.testing.assert_allclose(from_grid(to_grid(w), basis).coeffs, w.coeffs, atol=1e-12)


def test_from_grid_shape_error():
    with pytest.raises(ValueError):
        from_grid(np.zeros(5), basis_1d(n=8))


def test_field_shape_error():
    with pytest.raises(ValueError):
        SpectralField(np.zeros(5), basis_1d(n=8))


def test_fractional_laplacian_examples():
    basis = basis_1d(s=1.0)
    w = SpectralField(np.eye(8)[0], basis)
    assert apply_fractional_laplacian(w).coeffs[0] == pytest.approx(1.0)
    basis = basis_1d(s=0.5)
    w = SpectralField(np.eye(8)[1], basis)  # lambda_2 = 4
    assert apply_fractional_laplacian(w).coeffs[1] == pytest.approx(2.0)


def test_fractional_laplacian_matches_dense_square_root():
    # sqrt of the Dirichlet Laplacian through a dense eigen-decomposition of
    # the sine-basis Galerkin matrix on a fine quadrature grid
    n = 8
    basis = basis_1d(n=n, s=0.5)
    rng = np.random.default_rng(2)
    w = SpectralField(rng.normal(size=n), basis)
    m = 4000
    x = (np.arange(m) + 0.5) * math.pi / m
    modes = np.arange(1, n + 1)
    de = math.sqrt(2 / math.pi) * np.cos(np.outer(x, modes)) * modes
    stiff = de.T @ de * (math.pi / m)
    vals, vecs = np.linalg.eigh(stiff)
    root = vecs @ np.diag(np.sqrt(vals)) @ vecs.T
    np.testing.assert_allclose(apply_fractional_laplacian(w).coeffs, root @ w.coeffs, atol=1e-10)


def test_hs_norm_examples():
    basis = basis_1d(n=4, s=0.5)
    assert hs_norm(basis.zeros()) == 0.0
    assert hs_norm(SpectralField(np.array([2.0, 0, 0, 0]), basis)) == pytest.approx(2.0)
    assert hs_norm(SpectralField(np.array([1.0, 1.0, 0, 0]), basis)) == pytest.approx(math.sqrt(3))


def test_l2_norm_is_parseval():
    basis = basis_1d(n=64, L=2.0)
    x = basis.collocation[0]
    u = from_grid(x * (2 - x), basis)
    grid = to_grid(u)
    assert l2_norm(u) == pytest.approx(math.sqrt(np.sum(grid ** 2) * basis.cell_volume), rel=1e-12)


def test_eval_at():
    basis = basis_1d(n=16)
    rng = np.random.default_rng(5)
    w = SpectralField(rng.normal(size=16), basis)
    np.testing.assert_allclose(eval_at(w, np.array([0.0, math.pi])), 0.0, atol=1e-12)
    one = SpectralField(np.eye(16)[0], basis)
    assert eval_at(one, np.array([math.pi / 2]))[0] == pytest.approx(math.sqrt(2 / math.pi))
    np.testing.assert_allclose(eval_at(w, basis.collocation[0]), to_grid(w), atol=1e-12)
    with pytest.raises(ValueError):
        eval_at(w, np.array([4.0]))


def test_eval_at_2d_matches_grid():
    basis = build_basis(DomainSpec(2, (1.0, 2.0), 8), FractionalParams(0.5, 0.5))
    w = SpectralField(np.random.default_rng(1).normal(size=basis.shape), basis)
    np.testing.assert_allclose(eval_at(w, basis.grid_points()), to_grid(w).ravel(), atol=1e-12)
    with pytest.raises(ValueError):
        eval_at(w, np.zeros((3, 3)))


def test_sup_norm_sees_midpoints():
    basis = basis_1d(n=16)
    u = SpectralField(np.eye(16)[0], basis)
    # the first mode peaks at pi/2, between collocation points for even N
    assert sup_norm(u) >= np.max(to_grid(u))
    assert sup_norm(u) == pytest.approx(math.sqrt(2 / math.pi), rel=1e-2)


def test_field_arithmetic():
    basis = basis_1d()
    a = SpectralField(np.ones(8), basis)
    b = 2 * a - a
    np.testing.assert_array_equal(b.coeffs, a.coeffs)
    c = a.copy()
    c.coeffs[0] = 5.0
    assert a.coeffs[0] == 1.0


def test_grid_argmax_points():
    basis = basis_1d(n=7)
    grid = to_grid(SpectralField(np.eye(7)[0], basis))
    pts = grid_argmax_points(basis, grid, 1e-12)
    assert pts == [(pytest.approx(math.pi / 2),)]


def test_write_grid_csv(tmp_path):
    basis = build_basis(DomainSpec(2, (1.0, 1.0), 4), FractionalParams(0.5, 0.5))
    write_grid_csv(tmp_path / "g.csv", basis.zeros())
    lines = (tmp_path / "g.csv").read_text().splitlines()
    assert lines[0] == "x,y,u"
    assert len(lines) == 17
