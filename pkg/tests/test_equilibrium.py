import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hill_regularize.equilibrium import (
    OblateBody,
    TriangleConfig,
    lambdas,
    relative_equilibrium,
    rescale_oblateness,
    side_residual,
    solve_triangle,
    triangle_residuals,
)
from hill_regularize.errors import DomainError, MultipleRoots, NoRoot


def bisect_oracle(C, rhs, lo=0.5, hi=1.5):
    """Plain bisection on the side equation, independent of the solver."""
    f = lambda u: 1 / u**3 - 3 * C / u**5 - rhs  # noqa: E731
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (f(lo) > 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.mark.parametrize(
    "u, C, rhs, expected",
    [(1.0, 0.0, 1.0, 0.0), (1.0, 0.1, 1.0, -0.3), (2.0, 0.0, 0.0, 0.125)],
)
def test_side_residual(u, C, rhs, expected):
    assert side_residual(u, C, rhs) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("u", [0.0, -1.0])
def test_side_residual_domain(u):
    with pytest.raises(DomainError):
        side_residual(u, 0.0, 1.0)


def test_newtonian_limit_is_equilateral():
    assert solve_triangle(0.0, 0.0, 0.0) == (1.0, 1.0)


def test_symmetric_bodies():
    u1, u2 = solve_triangle(-0.001, -0.001, -0.001)
    assert u1 == u2
    r1, r2 = triangle_residuals(u1, u2, -0.001, -0.001, -0.001)
    assert abs(r1) < 1e-12 and abs(r2) < 1e-12


def test_larger_oblateness_is_opposite_longer_side():
    # C2 > C1, so the side opposite body 2 (u1) is the longer one
    C1, C2, C3 = -0.002, -0.001, -0.0005
    u1, u2 = solve_triangle(C1, C2, C3)
    rhs = 1 - 3 * (C1 + C2)
    # frozen from a 40-digit mpmath bisection
    assert u1 == pytest.approx(0.99950666301294850476, abs=1e-14)
    assert u2 == pytest.approx(0.99851560055586826557, abs=1e-14)
    assert u1 == pytest.approx(bisect_oracle(C1 + C3, rhs), abs=1e-14)
    assert u2 == pytest.approx(bisect_oracle(C2 + C3, rhs), abs=1e-14)
    assert u1 > u2


oblate = st.floats(min_value=-0.01, max_value=0.0)


@settings(max_examples=200, deadline=None)
@given(oblate, oblate, oblate)
def test_residuals_and_swap_symmetry(C1, C2, C3):
    u1, u2 = solve_triangle(C1, C2, C3)
    r1, r2 = triangle_residuals(u1, u2, C1, C2, C3)
    assert abs(r1) < 1e-12 and abs(r2) < 1e-12
    assert solve_triangle(C2, C1, C3) == (u2, u1)


@settings(max_examples=100, deadline=None)
@given(oblate, oblate, st.floats(min_value=-0.01, max_value=-1e-4), st.floats(min_value=1e-4, max_value=1e-3))
def test_more_oblate_tertiary_lengthens_both_sides(C1, C2, C3, step):
    u1, u2 = solve_triangle(C1, C2, C3)
    v1, v2 = solve_triangle(C1, C2, C3 - step)
    rhs = 1 - 3 * (C1 + C2)
    assert v1 > u1 and v2 > u2
    assert v1 == pytest.approx(bisect_oracle(C1 + C3 - step, rhs), abs=1e-13)


def test_prolate_nonmonotone_raises():
    with pytest.raises(MultipleRoots):
        solve_triangle(0.0, 0.0, 0.06)


def test_no_root_in_bracket():
    # rhs = 0.01 sits below the side function everywhere on the bracket
    with pytest.raises(NoRoot):
        solve_triangle(0.165, 0.165, -0.2)


def test_rhs_must_be_positive():
    with pytest.raises(DomainError):
        solve_triangle(0.2, 0.2, 0.0)


def test_lambdas_classical_hill():
    lam1, lam2, delta = lambdas(0.0, 1.0, 1.0)
    assert (lam1, lam2, delta) == (0.0, 3.0, 1.0)
    assert lambdas(1.0, 1.0, 1.0)[:2] == (0.0, 3.0)


def test_lambdas_hektor():
    lam1, lam2, _ = lambdas(0.0009533386, 1 - 5.94154e-11, 1 - 1.99318e-12)
    assert lam1 == pytest.approx(0.002144, abs=1e-6)
    assert lam2 == pytest.approx(2.997855, abs=1e-6)


def test_lambdas_equal_masses():
    lam1, lam2, delta = lambdas(0.5, 1.0, 1.0)
    assert delta == pytest.approx(0.25, abs=1e-15)
    assert (lam1, lam2) == pytest.approx((0.75, 2.25), abs=1e-15)


def test_lambdas_negative_delta_is_error(monkeypatch):
    # delta >= 0 for every mu in [0, 1] we could find, so force the branch
    import hill_regularize.equilibrium as eq

    monkeypatch.setattr(eq, "discriminant", lambda mu, u1, u2: -1e-3)
    with pytest.raises(DomainError, match="discriminant"):
        eq.lambdas(0.5, 1.0, 1.0)


def test_lambdas_mu_out_of_range():
    with pytest.raises(DomainError):
        lambdas(1.5, 1.0, 1.0)


@settings(max_examples=300, deadline=None)
@given(
    st.floats(min_value=0.0, max_value=1.0),
    st.floats(min_value=0.9, max_value=1.1),
    st.floats(min_value=0.9, max_value=1.1),
)
def test_trace_and_split_identities(mu, u1, u2):
    lam1, lam2, delta = lambdas(mu, u1, u2)
    trace = 2 - 2 * (1 - mu) / u1**5 - 2 * mu / u2**5 + 3 * (1 - mu) / u1**3 + 3 * mu / u2**3
    assert lam1 + lam2 == pytest.approx(trace, abs=1e-14)
    assert lam2 - lam1 == pytest.approx(3 * math.sqrt(delta) / (u1**3 * u2**3), abs=1e-14)
    assert lam1 <= lam2


@pytest.mark.parametrize(
    "c20, radius, m3, expected",
    [(0.0, 1.0, 0.5, 0.0), (-0.2, 1.0, 1.0, -0.1), (-0.2, 2.0, 8.0, -0.1)],
)
def test_rescale_oblateness(c20, radius, m3, expected):
    assert rescale_oblateness(c20, radius, m3) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("radius, m3", [(1.0, 0.0), (0.0, 1.0), (1.0, -2.0)])
def test_rescale_oblateness_domain(radius, m3):
    with pytest.raises(DomainError):
        rescale_oblateness(-0.1, radius, m3)


def test_oblate_body():
    body = OblateBody(mass=1.0, radius=2.0, c20=-0.1)
    assert body.C == pytest.approx(-0.2)
    with pytest.raises(DomainError):
        OblateBody(mass=0.0, radius=1.0, c20=0.0)


def test_relative_equilibrium_spherical_bodies():
    tri = relative_equilibrium([OblateBody(1.0, 1e-3, 0.0), OblateBody(1e-12, 1e-4, 0.0), OblateBody(1e-15, 1e-5, 0.0)])
    assert isinstance(tri, TriangleConfig)
    assert (tri.u1, tri.u2) == (1.0, 1.0)
    assert tri.lambda1 == pytest.approx(0.0, abs=1e-11)
    assert tri.lambda2 == pytest.approx(3.0, abs=1e-11)
