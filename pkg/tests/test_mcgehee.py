import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import pushforward_residual, start_on_energy_level

from hill_regularize.dynamics import CartesianState, hamiltonian
from hill_regularize.errors import DomainError, SingularState
from hill_regularize.integrator import EventSpec, integrate
from hill_regularize.mcgehee import (
    McGeheeState,
    energy_residual,
    energy_residual_array,
    exponents,
    from_mcgehee,
    make_regularized_field,
    physical_time_rate,
    recover_physical_time,
    regularized_field,
    rpow,
    to_mcgehee,
    unscaled_field,
)
from hill_regularize.params import HillParams

HILL = HillParams(A=-1.0, B=0.5, c=1.0)


@pytest.mark.parametrize(
    "nu, alpha, mode, expected",
    [
        (1, 3, "standard", ("3/2", "2/5")),
        (1, 7, "newtonian-limit", ("1/2", "2/3")),
        (2, 4, "standard", ("2", "1/3")),
        ("1", "4/3", "standard", ("2/3", "3/5")),
    ],
)
def test_exponents(nu, alpha, mode, expected):
    beta, gamma = exponents(nu, alpha, mode)
    assert (str(beta), str(gamma)) == expected


@pytest.mark.parametrize("nu, alpha, mode", [(3, 3, "standard"), (0, 3, "standard"), (1, 3, "other"), (0.5, 3, "standard")])
def test_exponents_domain(nu, alpha, mode):
    with pytest.raises((DomainError, TypeError)):
        exponents(nu, alpha, mode)


def test_to_mcgehee_examples():
    s = to_mcgehee(CartesianState(1, 0, 1, 0), "3/2", "2/5")
    assert (s.r, s.theta, s.v, s.w) == (1.0, 0.0, 1.0, 0.0)
    s = to_mcgehee(CartesianState(0, 1, 1, 0), "3/2", "2/5")
    assert (s.r, s.theta, s.v) == (1.0, pytest.approx(math.pi / 2), pytest.approx(0.0, abs=1e-16))
    assert s.w == pytest.approx(-1.0)


def test_to_mcgehee_singular():
    with pytest.raises(SingularState):
        to_mcgehee(CartesianState(0, 0, 1, 0), "3/2", "2/5")


def test_from_mcgehee_examples():
    c = from_mcgehee(McGeheeState(1, 0, 0, 1), "3/2", "2/5")
    assert (c.x1, c.x2, c.y1, c.y2) == (1.0, 0.0, 0.0, 1.0)
    c = from_mcgehee(McGeheeState(32, 0, 0, 0), "3/2", "2/5")
    assert (c.x1, c.x2, c.y1, c.y2) == (pytest.approx(4.0, rel=1e-15), 0.0, 0.0, 0.0)


def test_from_mcgehee_at_collision():
    c = from_mcgehee(McGeheeState(0, 1.0, 0, 0), "3/2", "2/5")
    assert (c.x1, c.x2, c.y1, c.y2) == (0.0, 0.0, 0.0, 0.0)
    with pytest.raises(SingularState):
        from_mcgehee(McGeheeState(0, 1.0, 0.5, 0), "3/2", "2/5")


def test_state_validation_and_theta_normalization():
    with pytest.raises(DomainError):
        McGeheeState(-1e-3, 0, 0, 0)
    assert McGeheeState(1, -math.pi / 2, 0, 0).theta == pytest.approx(1.5 * math.pi)
    assert McGeheeState(1, 7.0, 0, 0).theta == pytest.approx(7.0 - 2 * math.pi)


def test_roundtrip_random_states():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        rho = 10 ** rng.uniform(-2, 2)
        phi = rng.uniform(-math.pi, math.pi)
        s = CartesianState(rho * math.cos(phi), rho * math.sin(phi), *rng.normal(size=2) * 3)
        back = from_mcgehee(to_mcgehee(s, "3/2", "2/5"), "3/2", "2/5")
        got = np.array([back.x1, back.x2, back.y1, back.y2])
        want = np.array([s.x1, s.x2, s.y1, s.y2])
        assert np.max(np.abs(got - want) / np.maximum(1.0, np.abs(want))) < 1e-13


def test_rpow():
    assert rpow(0.0, 0) == 1.0
    assert rpow(0.0, 0.4) == 0.0
    assert rpow(4.0, 0.5) == 2.0
    with pytest.raises(SingularState):
        rpow(0.0, -1)


def test_regularized_field_examples():
    p = HillParams(A=0.3, B=-0.2, c=1.0)
    s = math.sqrt(3.0)
    assert regularized_field(McGeheeState(0, 2.0, 0, s), p) == pytest.approx([0, s, 0, 0], abs=1e-15)
    p0 = HillParams(A=0.3, B=-0.2, c=0.0)
    assert regularized_field(McGeheeState(0, 0, 1, 0), p0).tolist() == [0.0, 0.0, 1.5, 0.0]


@pytest.mark.parametrize(
    "params",
    [
        HillParams(A=-0.9989275, B=0.498928, c=1.0),
        HillParams(A=-1.0, B=0.5, c=0.0),
        HillParams(A=0.3, B=-0.7, c=-0.5),
        HillParams(A=-1.0, B=0.5, c=0.0, mode="newtonian-limit"),
        HillParams(A=0.2, B=0.1, c=0.4, nu=2, alpha=4),
    ],
)
def test_conjugacy(params):
    rng = np.random.default_rng(11)
    for _ in range(300):
        m = [rng.uniform(0.05, 5), rng.uniform(0, 2 * np.pi), *rng.normal(size=2) * 2]
        assert pushforward_residual(params, m) < 1e-9


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(-5, 5), st.floats(-5, 5), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_collision_set_is_invariant(theta, v, w, A, B, c):
    d = make_regularized_field(HillParams(A=A, B=B, c=c))(0.0, np.array([0.0, theta, v, w]))
    assert d[0] == 0.0


def test_coupling_terms_vanish_as_r_to_zero():
    field = make_regularized_field(HILL)
    base = field(0.0, np.array([0.0, 0.7, 0.3, -0.4]))
    gaps = [np.max(np.abs(field(0.0, np.array([r, 0.7, 0.3, -0.4])) - base)) for r in (1e-2, 1e-4, 1e-6)]
    assert gaps[0] > gaps[1] > gaps[2] and gaps[2] < 1e-3


def test_unscaled_field():
    s = McGeheeState(2.0, 0.3, 0.1, -0.2)
    assert unscaled_field(s, HILL) == pytest.approx(regularized_field(s, HILL) / 2.0, rel=1e-15)
    with pytest.raises(SingularState):
        unscaled_field(McGeheeState(0.0, 0.3, 0.1, -0.2), HILL)


@pytest.mark.parametrize("r", [0.0, 1.0, 2.5])
def test_physical_time_rate(r):
    assert physical_time_rate(r) == r


def test_energy_residual_examples():
    for theta in (0.0, 1.0, 4.0):
        s = McGeheeState(0, theta, 1.0, 1.0)
        assert energy_residual(s, HILL, h=123.0) == pytest.approx(0.0, abs=1e-15)
    p0 = HillParams(A=-1.0, B=0.5, c=0.0)
    assert energy_residual(McGeheeState(0, 0, 1, 0), p0, h=-7.0) == 0.5


def test_energy_residual_matches_hamiltonian():
    """H = h iff the residual vanishes: residual = r^(2 - 2 gamma) (H - h)."""
    rng = np.random.default_rng(5)
    params = HillParams(A=-0.9989275, B=0.498928, c=0.7)
    for _ in range(500):
        rho = rng.uniform(0.1, 5)
        phi = rng.uniform(0, 2 * np.pi)
        cart = CartesianState(rho * math.cos(phi), rho * math.sin(phi), *rng.normal(size=2))
        h = hamiltonian(cart, params)
        m = to_mcgehee(cart, params.beta, params.gamma)
        assert abs(energy_residual(m, params, h)) < 1e-11 * max(1.0, abs(h)) * max(1.0, m.r**1.2)
        shifted = energy_residual(m, params, h + 1.0)
        assert shifted == pytest.approx(-(m.r**1.2), rel=1e-9, abs=1e-11)


def test_energy_residual_conserved_along_flow():
    rng = np.random.default_rng(2)
    field = make_regularized_field(HILL)
    escape = EventSpec(lambda t, y: y[0] - 10.0, "rising", True)
    done = 0
    while done < 4:
        h = rng.uniform(-2, 2)
        y0 = start_on_energy_level(HILL, h, rng.uniform(0.05, 1), rng.uniform(0, 2 * np.pi), rng.normal())
        if y0 is None:
            continue
        traj = integrate(field, y0, (0.0, 20.0), 1e-12, 1e-12, events=[escape])
        res = [abs(energy_residual_array(y, HILL, h)) for y in traj.y]
        assert max(res) < 1e-8
        done += 1


def test_recover_physical_time_examples():
    tau = np.linspace(0, 2, 11)
    assert recover_physical_time(np.column_stack([tau, np.ones_like(tau)]))[-1] == pytest.approx(2.0)
    assert recover_physical_time(np.column_stack([tau, tau]))[-1] == pytest.approx(2.0, abs=1e-15)
    assert recover_physical_time([(0.0, 1.0), (1.0, 1.0)], t0=5.0).tolist() == [5.0, 6.0]


def test_recover_physical_time_exact_on_quadratics_irregular_grid():
    tau = np.array([0.0, 0.1, 0.35, 0.4, 1.0, 1.7, 2.0])
    t = recover_physical_time(np.column_stack([tau, tau**2]))
    assert t == pytest.approx(tau**3 / 3, abs=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(0.01, 1.0), st.floats(0.0, 10.0)), min_size=2, max_size=30))
def test_recover_physical_time_monotone(steps):
    tau = np.cumsum([s for s, _ in steps])
    r = np.array([x for _, x in steps])
    t = recover_physical_time(np.column_stack([tau, r]))
    assert np.all(np.diff(t) >= 0)


def test_recover_physical_time_rejects_unsorted():
    with pytest.raises(DomainError):
        recover_physical_time([(0.0, 1.0), (2.0, 1.0), (1.0, 1.0)])
    with pytest.raises(DomainError):
        recover_physical_time([0.0, 1.0])
