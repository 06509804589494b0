import numpy as np
import pytest
import sympy as sp

import sym_oracle as so
from df_forge import catalog
from df_forge.domain import curve_from_function
from df_forge.errors import ProjectionAmbiguous, TransversalityError, TubeError
from df_forge.transport import (SplineCurve, corrected_defining, hess_LN_on_curve, obstruction_rhs,
                                obstruction_values, reach_estimate, seam_check, solve_on_curve,
                                transport_residuals)

EPS = 0.3


@pytest.fixture(scope="module")
def flat():
    return catalog.get("exp_flat")


@pytest.fixture(scope="module")
def pert():
    return catalog.get(f"exp_flat_perturbed:eps={EPS}")


def test_obstruction_matches_sympy_and_closed_form(pert):
    cv = pert.curves["gamma"](24)
    # symbolic derivatives cannot be evaluated at w = 0 (exp(-1/0)); the flat factor and all its
    # derivatives vanish there, so use the symbolic jet of the remaining factor on the circle
    expr = (so.x ** 2 + so.y ** 2 - 1) * sp.exp(EPS * so.u)
    J = {k: f(cv.z, cv.w) for k, f in so.jet(expr).items()}
    gz, gw = J["dz"], J["dw"]
    n = np.sqrt(abs(gz) ** 2 + abs(gw) ** 2)
    L = np.stack([gw, -gz], -1) / n[:, None]
    N = np.stack([np.conj(gz), np.conj(gw)], -1) / n[:, None]
    M = np.stack([np.stack([J["dzzb"], J["dzwb"]], -1), np.stack([J["dwzb"], J["dwwb"]], -1)], -2)
    H = np.einsum("ni,nij,nj->n", L, M, np.conj(N))
    expect = -H / np.conj(np.sum(N * np.stack([gz, gw], -1), -1))
    got = obstruction_values(pert.rho, cv.z, cv.w)
    assert np.max(np.abs(got - expect)) <= 1e-6
    # by hand: Hess(L, N) = -eps zbar / 2 and conj(N)(rho) = 1 on the circle
    assert np.max(np.abs(got - EPS * np.conj(cv.z) / 2)) <= 1e-6
    assert abs(obstruction_rhs(pert.rho, (cv.z[0], cv.w[0])) - got[0]) < 1e-15
    norm = obstruction_values(pert.rho, cv.z, cv.w, normalized=True)
    assert np.allclose(norm, got / 2)


def test_obstruction_zero_for_raw_flat_function(flat):
    cv = flat.curves["gamma"](16)
    assert np.max(np.abs(obstruction_values(flat.rho, cv.z, cv.w))) < 1e-14


def test_zero_rhs_gives_zero_solution(flat):
    sol = solve_on_curve(flat.curves["gamma"](64), flat.rho)
    rng = np.random.default_rng(0)
    t = rng.uniform(0, 2 * np.pi, 30)
    z = np.exp(1j * t) * (1 + 0.01 * rng.normal(size=30))
    w = 0.02 * (rng.normal(size=30) + 1j * rng.normal(size=30))
    assert np.all(sol.u(z, w) == 0)


def test_constant_rhs_matches_hand_solution(flat):
    # on the circle L = -zbar d/dw, so L u = 1 with u = 0 on the curve gives u = Re(-2 z w) + O(|w|^2)
    sol = solve_on_curve(flat.curves["gamma"](128), flat.rho, h_const=1.0)
    rng = np.random.default_rng(1)
    t = rng.uniform(0, 2 * np.pi, 40)
    z = np.exp(1j * t)
    w = 1e-3 * (rng.normal(size=40) + 1j * rng.normal(size=40))
    u = sol.u(z, w)
    assert u.dtype.kind == "f"
    assert np.max(np.abs(u - (-2 * z * w).real)) < 1e-5
    tr = transport_residuals(sol, flat.rho)
    assert tr["max_abs_residual"] <= 1e-5 and tr["max_abs_u_on_curve"] <= 1e-12
    assert seam_check(sol, flat.rho)["jump"] < 1e-9


def test_spline_curve_reach_and_nearest(flat):
    sp_ = SplineCurve(flat.curves["gamma"](128))
    r = reach_estimate(sp_)
    assert abs(r["max_curvature"] - 1) < 1e-3 and abs(r["reach"] - 1) < 1e-3
    x = np.array([[0.9 * np.cos(1.0), 0.9 * np.sin(1.0), 0.05, 0.0]])
    s, amb, dist = sp_.nearest(x)
    # stationarity on the spline itself; the spline differs from the circle by O(h^4)
    assert not amb[0] and abs(np.dot(x[0] - sp_(s)[0], sp_(s, 1)[0])) < 1e-12
    assert abs(s[0] - 1.0) < 1e-6
    assert abs(dist[0] - np.hypot(0.1, 0.05)) < 1e-6
    # the centre of the circle is equidistant from every curve point
    _, amb0, _ = sp_.nearest(np.zeros((1, 4)))
    assert amb0[0]


def test_ambiguous_projection_raises(flat):
    sol = solve_on_curve(flat.curves["gamma"](64), flat.rho, h_const=1.0)
    with pytest.raises(ProjectionAmbiguous):
        sol.u(np.array([0j]), np.array([0j]))


def test_tangential_curve_is_rejected():
    ball = catalog.get("ball")
    # the real circle (cos t, sin t) lies in a complex tangent direction of the sphere
    cv = curve_from_function(lambda t: (np.cos(t) + 0j, np.sin(t) + 0j), 64)
    with pytest.raises(TransversalityError):
        solve_on_curve(cv, ball.rho, h_const=1.0)


def test_tube_radius_validation(pert):
    cv = pert.curves["gamma"](64)
    with pytest.raises(TubeError):
        corrected_defining(pert.rho, cv, {"r_in": 0.5, "r_out": 1.5})
    with pytest.raises(TubeError):
        corrected_defining(pert.rho, cv, {"r_in": 0.4, "r_out": 0.3})


def test_correction_support_and_effect(pert):
    cv = pert.curves["gamma"](128)
    cd, info = corrected_defining(pert.rho, cv)
    phi = info["phi"]
    assert info["r_in"] < info["r_out"] <= info["reach"]["reach"]
    # outside the outer tube the corrected function is the original one
    far_z = np.array([0.0 + 0j, 0.1j, 0.2 + 0j])
    far_w = np.array([0.9j, -0.9j, 0.95 + 0j])
    assert np.all(phi(far_z, far_w) == 0)
    assert np.array_equal(cd(far_z, far_w), pert.rho(far_z, far_w))
    # the correction keeps the zero set and the sign
    rng = np.random.default_rng(2)
    z = np.exp(1j * rng.uniform(0, 6.3, 50)) * (1 + 0.05 * rng.normal(size=50))
    w = 0.1 * (rng.normal(size=50) + 1j * rng.normal(size=50))
    assert np.array_equal(np.sign(cd(z, w)), np.sign(pert.rho(z, w)))
    before = hess_LN_on_curve(pert.rho, cv)
    after = hess_LN_on_curve(cd, cv)
    assert np.allclose(before, EPS / 2, atol=1e-8)
    assert after.max() <= 1e-5
