import numpy as np
import pytest

from forcedmech import bundles as bm
from forcedmech import systems
from forcedmech.lagrangian import (
    LagrangianSystem,
    accel,
    d0_residual,
    euler_lagrange,
    lambda_form,
    legendre,
    legendre_via_alpha,
    prolonged_momentum,
    solve_accel,
    tulczyjew_identity_residual,
)
from forcedmech.linalg import SingularMassMatrixError, solve_checked

M, G, GH, GV, V0 = 2.0, 9.81, 0.5, 0.8, 10.0


@pytest.fixture
def aircraft():
    return systems.aircraft()


def _germ(rng, m):
    return bm.SecondTangent(rng.uniform(-1, 1, m), rng.uniform(-3, 3, m), rng.uniform(-3, 3, m))


def test_legendre_examples(aircraft):
    assert legendre(aircraft, bm.TangentVector([3.0, -1.0], [10.0, 0.0])) == bm.Covector([3.0, -1.0], [20.0, 0.0])
    fp = systems.free_particle()
    assert np.array_equal(legendre(fp, bm.TangentVector([1.0, 2.0], [0.0, 0.0])).p, [0.0, 0.0])


@pytest.mark.parametrize("sys", systems.corpus(), ids=lambda s: s.name)
def test_legendre_equals_alpha_route(sys, rng):
    for _ in range(100):
        tv = bm.TangentVector(rng.uniform(-1, 1, sys.dim), rng.uniform(-3, 3, sys.dim))
        assert legendre(sys, tv) == legendre_via_alpha(sys, tv)


def test_euler_lagrange_aircraft(aircraft, rng):
    for _ in range(20):
        s = _germ(rng, 2)
        f = euler_lagrange(aircraft, s).p
        expected = [M * s.a[0] + GH * s.v[0], M * s.a[1] + GV * s.v[1] + M * G]
        assert np.allclose(f, expected, rtol=1e-15, atol=1e-14)


def test_euler_lagrange_trivial_germs():
    fp = systems.free_particle()
    assert not np.any(euler_lagrange(fp, bm.SecondTangent([1, 2], [3, 4], [0, 0])).p)
    osc = LagrangianSystem.from_text(1, "0.5*v1^2 - 0.5*x1^2")
    assert euler_lagrange(osc, bm.SecondTangent([1.0], [0.0], [-1.0])).p[0] == 0.0


def test_solve_accel_examples(aircraft):
    tv = bm.TangentVector([0.0, 0.0], [V0, 0.0])
    s = solve_accel(aircraft, tv, bm.Covector(tv.x, [GH * V0, M * G]))
    assert np.array_equal(s.a, [0.0, 0.0])
    s = solve_accel(aircraft, tv, bm.Covector(tv.x, [0.0, 0.0]))
    assert np.allclose(s.a, [-GH * V0 / M, -G], rtol=1e-15)
    fp = systems.free_particle()
    assert not np.any(solve_accel(fp, tv, bm.Covector(tv.x, [0.0, 0.0])).a)


def test_solve_accel_base_mismatch(aircraft):
    with pytest.raises(bm.BaseMismatchError):
        solve_accel(aircraft, bm.TangentVector([0, 0], [1, 0]), bm.Covector([1, 0], [0, 0]))


@pytest.mark.parametrize("sys", [*systems.corpus(), systems.relativistic_particle()], ids=lambda s: s.name)
def test_accel_round_trip(sys, rng):
    for _ in range(100):
        s = _germ(rng, sys.dim)
        f = euler_lagrange(sys, s)
        back = solve_accel(sys, bm.TangentVector(s.x, s.v), f)
        assert np.allclose(back.a, s.a, rtol=0, atol=1e-10)
        assert np.allclose(euler_lagrange(sys, back).p, f.p, rtol=0, atol=1e-12)


def test_singular_mass_matrix():
    sys = LagrangianSystem.from_text(2, "0.5*v1^2 + x2*v2")
    with pytest.raises(SingularMassMatrixError) as info:
        accel(sys, [0, 0], [1, 1], [0, 0])
    assert info.value.condition == float("inf")
    near = LagrangianSystem.from_text(2, "0.5*v1^2 + 0.5*e*v2^2", params={"e": 1e-14})
    with pytest.raises(SingularMassMatrixError) as info:
        accel(near, [0, 0], [1, 1], [0, 0])
    assert info.value.condition > 1e12


def test_condition_estimate_larger_systems(rng):
    a = rng.normal(size=(4, 4))
    a = a @ a.T + np.eye(4)
    b = rng.normal(size=4)
    assert np.allclose(solve_checked(a.tolist(), b.tolist()), np.linalg.solve(a, b), rtol=1e-12)
    a[3] = a[2]
    with pytest.raises(SingularMassMatrixError):
        solve_checked(a.tolist(), b.tolist())


def test_d0_residual_examples(aircraft, rng):
    # steady flight with the force folded in by chi
    x = [3.0, 0.0]
    w = bm.TTStarPoint(x, [M * V0, 0.0], [V0, 0.0], [0.0, 0.0])
    folded = bm.chi(bm.Covector(x, [GH * V0, M * G]), w)
    assert not np.any(d0_residual(aircraft, folded))
    fp = systems.free_particle(mass=1.0)
    assert not np.any(d0_residual(fp, bm.TTStarPoint([1, 2], [3, 4], [3, 4], [0, 0])))
    for _ in range(20):
        z = bm.TTStarPoint.random(rng, 2)
        expected = [
            z.pdot[0] - 0.0 + GH * z.v[0],
            z.pdot[1] + M * G + GV * z.v[1],
            z.p[0] - M * z.v[0],
            z.p[1] - M * z.v[1],
        ]
        assert np.allclose(d0_residual(aircraft, z), expected, rtol=1e-15, atol=1e-14)


def test_lambda_form_coordinates(aircraft):
    lam = lambda_form(aircraft, bm.TangentVector([0, 0], [V0, 2.0]))
    assert np.allclose(lam.a, [-GH * V0, -M * G - GV * 2.0], rtol=1e-15)
    assert np.array_equal(lam.b, [M * V0, M * 2.0])


def test_tulczyjew_identity_examples(aircraft, rng):
    for sys in (aircraft, systems.free_particle(), systems.damped_oscillator(c=0.1)):
        for _ in range(100):
            assert np.max(np.abs(tulczyjew_identity_residual(sys, _germ(rng, sys.dim)))) <= 1e-12


def test_prolonged_momentum_coordinates(aircraft):
    s = bm.SecondTangent([0, 0], [1.0, 2.0], [3.0, 4.0])
    w = prolonged_momentum(aircraft, s)
    assert np.array_equal(w.p, [2.0, 4.0]) and np.array_equal(w.pdot, [6.0, 8.0])


def test_system_validation():
    with pytest.raises(ValueError):
        LagrangianSystem.from_text(2, "0.5*m*v1^2", params={})
    with pytest.raises(ValueError):
        LagrangianSystem.from_text(2, "0.5*v1^2", ["v1"])
    assert LagrangianSystem.from_text(1, "0.5*v1^2").is_potential
    assert not systems.damped_oscillator().is_potential
