import math

import numpy as np
import pytest
import sympy as sp

from radialop.core import RadialCoeff, RadialOperator, substitute_n
from radialop.quantization import build_momentum_squared, build_radial_laplacian, build_reduced_momentum
from radialop.verify import (
    OracleDomainError,
    adaptive_simpson,
    bump_pair,
    fd_cartesian_laplacian,
    fd_divergence_rhat,
    fd_radial_directional_derivative,
    quadrature_adjoint_check,
    random_point_at_radius,
    run_suite,
    standard_suite,
    symbolic_action,
    verify_operator_action,
    weighted_inner_product,
)

r = sp.Symbol("r", positive=True)
SUITE = {f.id: f for f in standard_suite()}
SYMPY_FORMS = {
    "r^2": r**2,
    "r^3": r**3,
    "r^-1": 1 / r,
    "gaussian": sp.exp(-(r**2) / 2),
    "sin(r)/r": sp.sin(r) / r,
}


def point(n, radius, seed=0):
    return random_point_at_radius(n, radius, np.random.default_rng(seed))


@pytest.mark.parametrize("fid", sorted(SYMPY_FORMS))
def test_closed_form_derivatives_against_sympy(fid):
    f, expr = SUITE[fid], SYMPY_FORMS[fid]
    for x in (0.6, 1.3, 2.9):
        for k in range(3):
            assert f.derivative(k)(x) == pytest.approx(float(sp.diff(expr, r, k).subs(r, x)), rel=1e-13)


def test_bump_derivatives_against_sympy():
    f, g = bump_pair(1.0, 3.0)
    t = r - 2
    bump = sp.exp(-1 / (1 - t**2))
    for fn, expr in ((f, bump), (g, (1 + r) * bump)):
        for x in (1.1, 1.7, 2.0, 2.55, 2.97):
            for k in range(3):
                ref = float(sp.diff(expr, r, k).subs(r, x))
                assert fn.derivative(k)(x) == pytest.approx(ref, rel=1e-10, abs=1e-300)
        assert fn.value(np.array([1.0, 3.0, 0.5, 4.0])).tolist() == [0.0, 0.0, 0.0, 0.0]


# --- Cartesian Laplacian ----------------------------------------------------


@pytest.mark.parametrize("radius", [0.7, 1.5, 2.8])
def test_fd_laplacian_of_r_squared_3d(radius):
    assert fd_cartesian_laplacian(SUITE["r^2"], point(3, radius)) == pytest.approx(6.0, rel=1e-8)


def test_fd_laplacian_gaussian_5d():
    got = fd_cartesian_laplacian(SUITE["gaussian"], point(5, 1.0))
    assert got == pytest.approx(-4 * math.exp(-0.5), rel=1e-7)
    assert got == pytest.approx(-2.4261, abs=1e-4)


def test_fd_laplacian_1d_cubic():
    assert fd_cartesian_laplacian(SUITE["r^3"], np.array([2.0])) == pytest.approx(12.0, rel=1e-8)


def test_fd_laplacian_outside_support():
    with pytest.raises(OracleDomainError):
        fd_cartesian_laplacian(SUITE["r^-1"], point(3, 0.3))


# --- divergence and directional derivative -------------------------------------


@pytest.mark.parametrize("n,radius,expected", [(3, 2.0, 1.0), (1, 1.7, 0.0), (1, -0.9, 0.0), (7, 3.0, 2.0)])
def test_fd_divergence(n, radius, expected):
    x = np.array([radius]) if n == 1 else point(n, radius)
    assert abs(fd_divergence_rhat(x) - expected) <= 1e-7


def test_fd_divergence_near_origin_rejected():
    with pytest.raises(OracleDomainError):
        fd_divergence_rhat(np.array([1e-7, 0.0, 0.0]))


def test_fd_directional_examples():
    assert abs(fd_radial_directional_derivative(SUITE["r^2"], point(4, 1.5)) - 3.0) <= 1e-7
    assert abs(fd_radial_directional_derivative(SUITE["gaussian"], point(3, 1.0)) + math.exp(-0.5)) <= 1e-6
    assert abs(fd_radial_directional_derivative(SUITE["r^-1"], point(3, 2.0)) + 0.25) <= 1e-6


# --- operator action ------------------------------------------------------------


def test_verify_laplacian_action_n4():
    rng = np.random.default_rng(3)
    lap = substitute_n(build_radial_laplacian(), 4)
    rec = verify_operator_action(
        lap, 4, SUITE["gaussian"], rng.uniform(0.51, 3.0, 50), rng, oracle=fd_cartesian_laplacian
    )
    assert rec.passed and rec.samples == 50 and rec.max_rel_error <= 1e-6


def test_momentum_squared_equals_laplacian_in_3d():
    f = SUITE["r^2"]
    lap = substitute_n(build_radial_laplacian(), 3)
    sq = substitute_n(build_momentum_squared(), 3)
    for x in (0.6, 1.2, 2.5):
        assert symbolic_action(sq, f, x) == symbolic_action(lap, f, x)
    rec = verify_operator_action(sq, 3, f, [0.6, 1.2, 2.5])
    assert rec.passed


def test_momentum_squared_gap_in_2d_is_a_quarter():
    f = SUITE["r^2"]
    lap = substitute_n(build_radial_laplacian(), 2)
    sq = substitute_n(build_momentum_squared(), 2)
    for x in (0.6, 1.2, 2.5):
        assert symbolic_action(lap, f, x) - symbolic_action(sq, f, x) == pytest.approx(0.25, rel=1e-12)
    rec = verify_operator_action(sq, 2, f, np.linspace(0.6, 2.9, 20))
    assert rec.passed


def test_operator_action_rejects_high_order():
    with pytest.raises(ValueError):
        verify_operator_action(RadialOperator.derivative(3), 3, SUITE["r^2"], [1.0])


# --- quadrature ----------------------------------------------------------------


def test_adaptive_simpson_known_integrals():
    assert adaptive_simpson(np.sin, 0.0, np.pi) == pytest.approx(2.0, abs=1e-10)
    assert adaptive_simpson(lambda x: x**4, 1.0, 3.0) == pytest.approx(242 / 5, abs=1e-10)
    assert adaptive_simpson(lambda x: np.exp(-(x**2)), -6.0, 6.0) == pytest.approx(math.sqrt(math.pi), abs=1e-10)


def test_adjoint_quadrature_examples():
    f, g = bump_pair()
    dr = substitute_n(build_reduced_momentum(), 5)
    assert quadrature_adjoint_check(dr, 5, f, g).max_abs_error <= 1e-8
    lap = substitute_n(build_radial_laplacian(), 4)
    rec = quadrature_adjoint_check(lap, 4, f, g)
    assert rec.passed and rec.details["lhs"] == pytest.approx(rec.details["rhs"], abs=1e-8)
    r_op = RadialOperator.multiplication(RadialCoeff.monomial(1))
    assert quadrature_adjoint_check(r_op, 3, f, g).max_abs_error <= 1e-12


def test_skewness_depends_on_the_weight():
    # D_r built for n = 5 is skew for the r^4 weight but not for the r^1 weight
    f, g = bump_pair()
    dr5 = substitute_n(build_reduced_momentum(), 5)
    for n, skew in ((5, True), (2, False)):
        lhs = weighted_inner_product(lambda x: symbolic_action(dr5, f, x), g.value, n, 1.0, 3.0)
        rhs = weighted_inner_product(f.value, lambda x: symbolic_action(dr5, g, x), n, 1.0, 3.0)
        assert (abs(lhs + rhs) <= 1e-8) is skew


def test_adjoint_check_requires_vanishing_boundary():
    f = SUITE["r^2"]
    with pytest.raises(OracleDomainError):
        quadrature_adjoint_check(RadialOperator.derivative(), 3, f, f)


# --- suites ---------------------------------------------------------------------


def test_suites_pass_and_are_deterministic():
    a = run_suite("all", range(1, 8), seed=42)
    b = run_suite("all", range(1, 8), seed=42)
    assert [x.to_dict() for x in a] == [x.to_dict() for x in b]
    assert all(rec.passed for rec in a), [rec.check_name for rec in a if not rec.passed]


@pytest.mark.parametrize("n", [1, 3])
def test_momentum_gap_vanishes_in_one_and_three_dimensions(n):
    for rec in run_suite("laplacian", [n]):
        if rec.check_name.startswith("momentum_squared_gap"):
            assert rec.details["max_abs_laplacian_minus_momentum_squared"] < 1e-6


@pytest.mark.parametrize("n", [2, 4, 5, 7])
def test_momentum_gap_is_visible_elsewhere(n):
    gaps = [
        rec.details["max_abs_laplacian_minus_momentum_squared"]
        for rec in run_suite("laplacian", [n])
        if rec.check_name == "momentum_squared_gap[r^2]"
    ]
    # (n-1)(n-3)/4 * r^2 / r^2, exactly constant for f = r^2
    assert gaps[0] == pytest.approx(abs((n - 1) * (n - 3) / 4), rel=1e-6)


def test_tolerance_override_can_fail_records():
    records = run_suite("divergence", [3], tolerance=1e-30)
    assert not any(rec.passed for rec in records)
