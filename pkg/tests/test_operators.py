import math

import numpy as np
import pytest

from fracquench.operators import (QuadratureError, apply_P, apply_S, heat_semigroup, p_stamp,
                                  s_stamp, subordination_check, wright_laplace)
from fracquench.special_fn import DomainError, gamma
from fracquench.spectral import (DomainSpec, FractionalParams, SpectralField, build_basis,
                                 from_grid, l2_norm, to_grid)


def mode_field(mu_index=0, alpha=0.5, s=1.0, L=math.pi, n=8):
    basis = build_basis(DomainSpec(1, (L,), n), FractionalParams(alpha, s))
    return SpectralField(np.eye(n)[mu_index], basis)


def test_heat_semigroup():
    u = mode_field()
    assert np.array_equal(heat_semigroup(0.0, u).coeffs, u.coeffs)
    assert heat_semigroup(math.log(2), u).coeffs[0] == pytest.approx(0.5, rel=1e-15)
    rng = np.random.default_rng(0)
    w = SpectralField(rng.normal(size=8), u.basis)
    assert l2_norm(heat_semigroup(0.3, w)) <= l2_norm(w)


def test_apply_S_examples():
    u = mode_field()
    assert np.array_equal(apply_S(0.0, u).coeffs, u.coeffs)
    one = mode_field(alpha=1.0, L=math.pi / math.sqrt(2))  # lambda_1 = 2
    assert apply_S(1.0, one).coeffs[0] == pytest.approx(math.exp(-2.0), rel=1e-14)
    assert apply_S(1.0, u).coeffs[0] == pytest.approx(0.4275835761558070, rel=1e-13)


def test_apply_P_examples(oracles):
    u = mode_field()
    assert apply_P(0.0, u).coeffs[0] == pytest.approx(1 / gamma(0.5), rel=1e-15)
    one = mode_field(alpha=1.0)
    np.testing.assert_allclose(apply_P(0.7, one).coeffs, heat_semigroup(0.7, one).coeffs,
                               rtol=1e-14)
    ref = [r[3] for r in oracles["mittag_leffler"] if r[:3] == [0.5, 0.5, -1.0]][0]
    assert apply_P(1.0, u).coeffs[0] == pytest.approx(ref, rel=1e-12)


def test_stamps_reuse():
    u = mode_field(n=8)
    st = s_stamp(0.3, u.basis)
    assert st.kind == "S"
    np.testing.assert_array_equal(st.apply(u).coeffs, apply_S(0.3, u).coeffs)
    assert p_stamp(0.3, u.basis).kind == "P"
    with pytest.raises(DomainError):
        s_stamp(-1.0, u.basis)


def test_negative_time_rejected():
    u = mode_field()
    for op in (heat_semigroup, apply_S, apply_P):
        with pytest.raises(DomainError):
            op(-0.1, u)


def test_S_keeps_non_negative_data():
    basis = build_basis(DomainSpec(1, (1.0,), 64), FractionalParams(0.4, 0.7))
    x = basis.collocation[0]
    u = from_grid(np.where(np.abs(x - 0.3) < 0.1, 1.0, 0.0), basis)
    for t in (1e-4, 1e-2, 1.0):
        # spectral truncation allows a small undershoot of a discontinuous profile
        assert np.min(to_grid(apply_S(t, u))) >= -0.1


def test_S_keeps_smooth_non_negative_data():
    basis = build_basis(DomainSpec(1, (1.0,), 64), FractionalParams(0.4, 0.7))
    x = basis.collocation[0]
    u = from_grid(np.sin(np.pi * x) ** 4, basis)
    for t in (1e-4, 1e-2, 1.0, 10.0):
        assert np.min(to_grid(apply_S(t, u))) >= -1e-8


@pytest.mark.parametrize("args", [(0.5, 1, 1), (0.3, 5, 0.5), (0.8, 0.1, 2)])
def test_subordination(args):
    assert subordination_check(*args, 256) <= 1e-6


def test_subordination_domain():
    with pytest.raises(DomainError):
        subordination_check(1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        subordination_check(0.5, -1.0, 1.0)


def test_subordination_reports_quadrature_failure(monkeypatch):
    import fracquench.operators as ops
    monkeypatch.setattr(ops, "wright_laplace", lambda *a, **k: (0.5, 1e-3))
    with pytest.raises(QuadratureError):
        subordination_check(0.5, 1.0, 1.0)


def test_wright_laplace_mass():
    for a in (0.2, 0.6, 0.9):
        val, err = wright_laplace(a, 0.0)
        assert val == pytest.approx(1.0, rel=1e-9)
        assert err < 1e-8
