import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from forcedmech import bundles as bm


def vecs(m, n):
    """n independent coordinate vectors of length m."""
    return st.tuples(*[arrays(float, m, elements=st.floats(-1e3, 1e3, allow_nan=False)) for _ in range(n)])


dims = st.integers(1, 4)


# --- worked examples -------------------------------------------------------


def test_kappa11_example():
    assert bm.kappa11(bm.TTPoint([1], [2], [3], [4])) == bm.TTPoint([1], [3], [2], [4])


def test_alpha_examples():
    z = bm.TTStarPoint([0], [5], [2], [7])
    s = bm.alpha(z)
    assert s == bm.TStarTPoint([0], [2], [7], [5])
    assert bm.alpha_inv(s) == z
    assert bm.alpha(bm.TTStarPoint.zero(3)) == bm.TStarTPoint.zero(3)


def test_beta_example():
    assert bm.beta(bm.TTStarPoint([0], [1], [2], [3])) == bm.TStarTStarPoint([0], [1], [3], [-2])
    b = bm.beta(bm.TTStarPoint([0], [1], [0], [0]))
    assert b.y[0] == 0 and b.z[0] == 0


def test_F_examples():
    assert bm.F11(bm.TTPoint([1], [2], [3], [4])) == bm.TTPoint([1], [2], [0], [3])
    w = bm.TT2Point([0.5], [0.25], [2.0], [1], [5], [9])
    assert bm.F22(w) == bm.TT2Point([0.5], [0.25], [2.0], [0], [0], [2])


def test_T1_examples():
    assert bm.tangent_lift_T1(bm.SecondTangent([0], [3], [-1])) == bm.TTPoint([0], [3], [3], [-1])
    assert bm.tangent_lift_T1(bm.SecondTangent.zero(1)) == bm.TTPoint.zero(1)


def test_mu_chi_examples():
    assert bm.mu(bm.Covector([1], [9]), bm.Covector([1], [4])) == bm.TTStarPoint([1], [4], [0], [9])
    w = bm.TTStarPoint([0], [1], [5], [7])
    assert bm.chi(bm.Covector([0], [2]), w) == bm.TTStarPoint([0], [1], [5], [5])
    assert bm.chi(bm.Covector([0], [0]), w) == w


def test_base_mismatch():
    with pytest.raises(bm.BaseMismatchError):
        bm.mu(bm.Covector([1], [9]), bm.Covector([2], [4]))
    with pytest.raises(bm.BaseMismatchError):
        bm.chi(bm.Covector([1], [9]), bm.TTStarPoint([0], [1], [5], [7]))
    with pytest.raises(bm.BaseMismatchError):
        bm.pair_T(bm.Covector([1], [1]), bm.TangentVector([0], [1]))
    with pytest.raises(bm.BaseMismatchError):
        bm.pair_TT(bm.TStarTPoint([0], [1], [1], [1]), bm.TTPoint([0], [2], [1], [1]))
    with pytest.raises(bm.BaseMismatchError):
        bm.tangent_pair(bm.TTStarPoint([0], [1], [5], [2]), bm.TTPoint([0], [3], [4], [4]))
    with pytest.raises(bm.BaseMismatchError):
        bm.pair_TsTs(bm.TStarTStarPoint([0], [1], [1], [1]), bm.TTStarPoint([0], [2], [1], [1]))


def test_tangent_pair_example():
    # p=1, pdot=2 against a variation with v-slot 3 and dv-slot 4
    z = bm.TTStarPoint([0], [1], [5], [2])
    w = bm.TTPoint([0], [3], [5], [4])
    assert bm.tangent_pair(z, w) == 10.0


def test_pairings_vanish_on_zero():
    z = bm.TTStarPoint([0.3], [1], [5], [2])
    assert bm.tangent_pair(z, bm.TTPoint([0.3], [0], [5], [0])) == 0.0
    assert bm.pair_TT(bm.TStarTPoint([0.3], [2], [4], [5]), bm.TTPoint([0.3], [2], [0], [0])) == 0.0
    assert bm.pair_T(bm.Covector([0.3], [7]), bm.TangentVector([0.3], [0])) == 0.0


def test_tangent_pair_is_time_derivative_of_pairing():
    """Along eta(t) and dxi(t), polynomial in t, <eta, dxi>' = tangent pairing of their lifts."""
    rng = np.random.default_rng(3)
    m = 3
    ce = rng.normal(size=(3, m))  # eta(t) = c0 + c1 t + c2 t^2
    cd = rng.normal(size=(3, m))
    cx = rng.normal(size=(2, m))  # base x(t) = a0 + a1 t
    eta, etadot = ce[0], ce[1]
    dxi, dxidot = cd[0], cd[1]
    # d/dt sum eta.dxi at t=0, by hand
    expected = float(ce[1] @ cd[0] + ce[0] @ cd[1])
    z = bm.TTStarPoint(cx[0], eta, cx[1], etadot)
    w = bm.TTPoint(cx[0], dxi, cx[1], dxidot)
    assert bm.tangent_pair(z, w) == pytest.approx(expected, rel=1e-15)


def test_G_M_and_forms_examples():
    w = bm.TTStarPoint([0.5], [3], [4], [1])
    assert bm.G_M(w) == 12.0
    rest = bm.TTStarPoint([0.5], [3], [0], [0])
    assert bm.iT_omega(rest, [1], [2], [3], [4]) == 0.0


# --- properties ------------------------------------------------------------


@settings(max_examples=200)
@given(dims.flatmap(lambda m: vecs(m, 4)))
def test_kappa11_involution(c):
    w = bm.TTPoint(*c)
    assert bm.kappa11(bm.kappa11(w)) == w
    fixed = bm.TTPoint(c[0], c[1], c[1], c[3])
    assert bm.kappa11(fixed) == fixed


@settings(max_examples=200)
@given(dims.flatmap(lambda m: vecs(m, 6)))
def test_kappa12_kappa21_inverse(c):
    w = bm.TT2Point(*c)
    assert bm.kappa21(bm.kappa12(w)) == w
    u = bm.T2TPoint(*c)
    assert bm.kappa12(bm.kappa21(u)) == u
    # both tangent-level projections agree after the exchange
    assert bm.tau_T2T(bm.kappa12(w)) == bm.kappa11(bm.tau_TT2(w))


@settings(max_examples=200)
@given(dims.flatmap(lambda m: vecs(m, 6)))
def test_F_composition_table(c):
    w = bm.TT2Point(*c)
    assert bm.F21(bm.F21(w)) == bm.F22(w)
    for comp in (bm.F22(bm.F21(w)), bm.F21(bm.F22(w)), bm.F22(bm.F22(w))):
        assert not np.any(comp.dx) and not np.any(comp.dv) and not np.any(comp.da)
    ff = bm.F11(bm.F11(bm.TTPoint(*c[:4])))
    assert not np.any(ff.dx) and not np.any(ff.dv)


@settings(max_examples=200)
@given(dims.flatmap(lambda m: vecs(m, 3)))
def test_F11_after_T1(c):
    s = bm.SecondTangent(*c)
    w = bm.F11(bm.tangent_lift_T1(s))
    assert not np.any(w.dx) and np.array_equal(w.dv, s.v)


@settings(max_examples=200)
@given(dims.flatmap(lambda m: vecs(m, 6)))
def test_alpha_kappa_duality(c):
    z = bm.TTStarPoint(*c[:4])
    w = bm.TTPoint(c[0], c[2], c[4], c[5])
    assert bm.pair_TT(bm.alpha(z), w) == bm.tangent_pair(z, bm.kappa11(w))


@settings(max_examples=200)
@given(dims.flatmap(lambda m: vecs(m, 6)))
def test_beta_symplectic_identity(c):
    u = bm.TTStarPoint(*c[:4])
    u2 = bm.TTStarPoint(c[0], c[1], c[4], c[5])
    a = bm.pair_TsTs(bm.beta(u), u2)
    b = bm.pair_TsTs(bm.beta(u2), u)
    expected = float(u.pdot @ u2.v - u.v @ u2.pdot)
    scale = 1.0 + float(np.abs(u.pdot) @ np.abs(u2.v) + np.abs(u.v) @ np.abs(u2.pdot))
    assert abs(a - expected) <= 1e-15 * scale
    assert abs(a + b) <= 1e-15 * scale


@settings(max_examples=200)
@given(dims.flatmap(lambda m: vecs(m, 4)))
def test_round_trips_and_base_preservation(c):
    z = bm.TTStarPoint(*c)
    assert bm.alpha_inv(bm.alpha(z)) == z
    assert bm.beta_inv(bm.beta(z)) == z
    s = bm.TStarTPoint(*c)
    assert bm.alpha(bm.alpha_inv(s)) == s
    a = bm.alpha(z)
    assert np.array_equal(a.x, z.x) and np.array_equal(a.v, z.v)
    b = bm.beta(z)
    assert np.array_equal(b.x, z.x) and np.array_equal(b.p, z.p)


@settings(max_examples=200)
@given(dims.flatmap(lambda m: vecs(m, 5)))
def test_chi_removes_mu(c):
    x, p, v, pdot, f = c
    w = bm.TTStarPoint(x, p, v, pdot)
    fc = bm.Covector(x, f)
    mu = bm.mu(fc, bm.Covector(x, p))
    got = bm.chi(fc, w)
    assert np.array_equal(got.pdot, w.pdot - mu.pdot)
    assert np.array_equal(got.v, w.v - mu.v)


@settings(max_examples=200)
@given(dims.flatmap(lambda m: vecs(m, 4)))
def test_mu_pairs_to_force_work(c):
    """The vertical lift of f, paired with a variation over the rest point, is f . dx."""
    x, p, f, dx = c
    z = bm.mu(bm.Covector(x, f), bm.Covector(x, p))
    w = bm.TTPoint(x, dx, np.zeros_like(x), np.zeros_like(x))
    assert bm.tangent_pair(z, w) == pytest.approx(float(f @ dx), rel=1e-12, abs=1e-9)


@settings(max_examples=200)
@given(dims.flatmap(lambda m: vecs(m, 8)))
def test_dT_theta_minus_iT_omega_is_dG(c):
    x, p, v, pdot, dx, dp, dxdot, dpdot = c
    w = bm.TTStarPoint(x, p, v, pdot)
    lhs = bm.dT_theta(w, dx, dp, dxdot, dpdot) - bm.iT_omega(w, dx, dp, dxdot, dpdot)
    rhs = float(v @ dp + p @ dxdot)
    scale = 1.0 + float(np.abs(pdot) @ np.abs(dx) + np.abs(v) @ np.abs(dp) + np.abs(p) @ np.abs(dxdot))
    assert abs(lhs - rhs) <= 1e-14 * scale


def test_liouville_and_omega():
    w = bm.TTStarPoint([0.0, 1.0], [2.0, -1.0], [0.5, 4.0], [0, 0])
    assert bm.liouville_theta(w) == bm.G_M(w) == -3.0
    assert bm.omega([1, 0], [0, 1], [0, 1], [1, 0]) == -bm.omega([0, 1], [1, 0], [1, 0], [0, 1])


def test_points_are_immutable_and_checked():
    w = bm.TTPoint([1, 2], [3, 4], [5, 6], [7, 8])
    with pytest.raises(ValueError):
        w.x[0] = 3.0
    with pytest.raises(ValueError):
        bm.TTPoint([1, 2], [3], [5, 6], [7, 8])
    assert w.dim == 2
