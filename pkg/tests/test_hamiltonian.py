import numpy as np
import pytest

from forcedmech import bundles as bm
from forcedmech import systems
from forcedmech.hamiltonian import (
    NewtonConfig,
    NoConvergenceError,
    energy,
    hamilton_residual,
    hamiltonian,
    invert_legendre,
    legendre_invert,
    theta_form,
    vector_field_Z,
    vector_field_Z_via_beta,
)
from forcedmech.lagrangian import LagrangianSystem, d0_residual, euler_lagrange, legendre, prolonged_momentum
from forcedmech.linalg import SingularMassMatrixError

from .oracles import five_point

M, G, GH, GV, V0 = 2.0, 9.81, 0.5, 0.8, 10.0
SYSTEMS = [*systems.corpus(), systems.relativistic_particle()]


@pytest.fixture
def aircraft():
    return systems.aircraft()


def _random_covector(rng, sys):
    """Momenta reachable by the Legendre map (relativistic: any p is)."""
    return bm.Covector(rng.uniform(-1, 1, sys.dim), rng.uniform(-3, 3, sys.dim))


def test_newton_config_validation():
    with pytest.raises(ValueError):
        NewtonConfig(tol=0.0)
    with pytest.raises(ValueError):
        NewtonConfig(max_iter=0)


def test_legendre_invert_examples(aircraft):
    assert legendre_invert(aircraft, bm.Covector([0, 0], [20.0, 0.0])) == bm.TangentVector([0, 0], [10.0, 0.0])
    fp = systems.free_particle()
    assert not np.any(legendre_invert(fp, bm.Covector([1, 1], [0, 0])).v)


@pytest.mark.parametrize("sys", SYSTEMS, ids=lambda s: s.name)
def test_legendre_round_trips(sys, rng):
    for _ in range(100):
        v = rng.uniform(-2.5, 2.5, sys.dim)
        tv = bm.TangentVector(rng.uniform(-1, 1, sys.dim), v)
        inv = invert_legendre(sys, tv.x, legendre(sys, tv).p)
        assert np.allclose(inv.v, v, rtol=0, atol=1e-12)
        p = _random_covector(rng, sys)
        back = legendre(sys, legendre_invert(sys, p))
        assert np.allclose(back.p, p.p, rtol=0, atol=1e-12)


def test_newton_uses_halving_on_stiff_start():
    # from v=0 the full Newton step for p=20 lands outside |v| < c
    sys = systems.relativistic_particle()
    inv = invert_legendre(sys, [0.0], [20.0])
    assert abs(legendre(sys, bm.TangentVector([0.0], inv.v)).p[0] - 20.0) <= 1e-12
    assert abs(inv.v[0]) < 3.0


def test_no_convergence_reports_iterations():
    sys = systems.relativistic_particle()
    with pytest.raises(NoConvergenceError) as info:
        invert_legendre(sys, [0.0], [20.0], NewtonConfig(max_iter=2))
    assert info.value.iterations == 2 and info.value.residual > 0


def test_singular_newton_jacobian():
    sys = LagrangianSystem.from_text(1, "v1^3")
    with pytest.raises(SingularMassMatrixError):
        invert_legendre(sys, [0.0], [1.0])


def test_initial_guess_option(aircraft):
    cfg = NewtonConfig(initial_guess=(10.0, 0.0))
    inv = invert_legendre(aircraft, [0, 0], [20.0, 0.0], cfg)
    assert inv.iterations == 0 and inv.v == [10.0, 0.0]
    with pytest.raises(ValueError):
        invert_legendre(aircraft, [0, 0], [20.0, 0.0], NewtonConfig(initial_guess="random"))


def test_hamiltonian_examples(aircraft, rng):
    assert hamiltonian(aircraft, bm.Covector([0, 0], [20.0, 0.0])) == 100.0
    assert hamiltonian(aircraft, bm.Covector([5, 0], [0.0, 0.0])) == 0.0
    for _ in range(50):
        p = _random_covector(rng, aircraft)
        assert hamiltonian(aircraft, p) == pytest.approx(p.p @ p.p / (2 * M) + M * G * p.x[1], rel=1e-14)


@pytest.mark.parametrize("sys", SYSTEMS, ids=lambda s: s.name)
def test_H_plus_L_is_pairing(sys, rng):
    for _ in range(100):
        tv = bm.TangentVector(rng.uniform(-1, 1, sys.dim), rng.uniform(-2.5, 2.5, sys.dim))
        p = legendre(sys, tv)
        lhs = hamiltonian(sys, p) + sys.value(tv.x, tv.v)
        assert lhs == pytest.approx(float(p.p @ tv.v), rel=1e-12, abs=1e-12)
        assert energy(sys, tv.x, tv.v, p.p) == pytest.approx(hamiltonian(sys, p), rel=1e-12, abs=1e-12)


def test_theta_examples(aircraft):
    lower, upper = theta_form(aircraft, bm.Covector([0, 0], [20.0, 0.0]))
    assert np.array_equal(upper, [10.0, 0.0])
    assert np.allclose(lower, [5.0, 19.62], rtol=1e-15)


@pytest.mark.parametrize("sys", SYSTEMS, ids=lambda s: s.name)
def test_theta_two_routes(sys, rng):
    """theta = dH + rho o Lambda, with dH by finite differences of H itself."""
    for _ in range(20):
        p = _random_covector(rng, sys)
        lower, upper = theta_form(sys, p)
        v = legendre_invert(sys, p).v
        rho = np.array(sys.rho_at(p.x, v))
        for k in range(sys.dim):

            def H_x(s, k=k):
                x = p.x.copy()
                x[k] = s
                return hamiltonian(sys, bm.Covector(x, p.p))

            def H_p(s, k=k):
                q = p.p.copy()
                q[k] = s
                return hamiltonian(sys, bm.Covector(p.x, q))

            assert lower[k] == pytest.approx(five_point(H_x, p.x[k]) + rho[k], abs=1e-9, rel=1e-9)
            assert upper[k] == pytest.approx(five_point(H_p, p.p[k]), abs=1e-9, rel=1e-9)


def test_theta_is_dH_without_rho(rng):
    sys = systems.pendulum()
    p = _random_covector(rng, sys)
    lower, _ = theta_form(sys, p)
    v = legendre_invert(sys, p).v
    assert lower == pytest.approx(-np.array(sys.jet(p.x, v).gx), rel=1e-15)


def test_vector_field_examples(aircraft):
    Z = vector_field_Z(aircraft, bm.Covector([0, 0], [2 * V0, 0.0]))
    assert np.array_equal(Z.v, [V0, 0.0])
    assert np.allclose(Z.pdot, [-GH * V0, -M * G], rtol=1e-15)
    fp = systems.free_particle(mass=1.5)
    Z = vector_field_Z(fp, bm.Covector([0, 0], [3.0, -1.5]))
    assert np.allclose(Z.v, [2.0, -1.0], rtol=1e-15) and not np.any(Z.pdot)


@pytest.mark.parametrize("sys", SYSTEMS, ids=lambda s: s.name)
def test_Z_lies_in_D0(sys, rng):
    for _ in range(100):
        p = _random_covector(rng, sys)
        Z = vector_field_Z(sys, p)
        assert Z == vector_field_Z_via_beta(sys, p)
        assert np.max(np.abs(d0_residual(sys, Z))) <= 1e-10


@pytest.mark.parametrize("sys", SYSTEMS, ids=lambda s: s.name)
def test_L_plus_G_M_along_Z_is_minus_H(sys, rng):
    for _ in range(50):
        p = _random_covector(rng, sys)
        Z = vector_field_Z(sys, p)
        assert sys.value(Z.x, Z.v) - bm.G_M(Z) == pytest.approx(-hamiltonian(sys, p), rel=1e-12, abs=1e-12)


def test_hamilton_residual_examples(aircraft):
    t = 1.7
    sample = bm.ForceMomentumSample([V0 * t, 0.0], [GH * V0, M * G], [M * V0, 0.0])
    assert not np.any(hamilton_residual(aircraft, sample, [0.0, 0.0], [V0, 0.0]))
    fp = systems.free_particle(mass=2.0)
    sample = bm.ForceMomentumSample([1, 1], [0, 0], [4.0, -2.0])
    assert not np.any(hamilton_residual(fp, sample, [0, 0], [2.0, -1.0]))


@pytest.mark.parametrize("sys", SYSTEMS, ids=lambda s: s.name)
def test_pictures_agree_on_random_germs(sys, rng):
    """A germ with its Euler-Lagrange force satisfies Hamilton's equations, and not otherwise."""
    for _ in range(50):
        s = bm.SecondTangent(rng.uniform(-1, 1, sys.dim), rng.uniform(-2.5, 2.5, sys.dim), rng.uniform(-3, 3, sys.dim))
        f = euler_lagrange(sys, s).p
        w = prolonged_momentum(sys, s)
        sample = bm.ForceMomentumSample(s.x, f, w.p)
        assert np.max(np.abs(hamilton_residual(sys, sample, w.pdot, s.v))) <= 1e-9
        wrong = bm.ForceMomentumSample(s.x, f + 0.1, w.p)
        assert np.max(np.abs(hamilton_residual(sys, wrong, w.pdot, s.v))) >= 0.09
