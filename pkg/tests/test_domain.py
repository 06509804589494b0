import math

import numpy as np
import pytest

from df_forge import catalog
from df_forge.domain import (boundary_sample, curve_from_function, frame_vectors, levi_flat_scan, levi_form,
                             levi_values, polyline_hausdorff, project_points, project_to_boundary, realify,
                             real_gradient, transversality_check)
from df_forge.cdiff import CPoint, gradient, jet2


@pytest.fixture(scope="module")
def ball():
    return catalog.get("ball")


@pytest.fixture(scope="module")
def flat():
    return catalog.get("exp_flat")


def test_projection_lands_on_boundary(ball, flat):
    rng = np.random.default_rng(0)
    for e in (ball, flat):
        z = 0.6 * (rng.normal(size=200) + 1j * rng.normal(size=200))
        w = 0.6 * (rng.normal(size=200) + 1j * rng.normal(size=200))
        zz, ww, conv, degen = project_points(e.rho, z, w)
        assert conv.mean() > 0.95
        val, g = gradient(e.rho.field, zz[conv], ww[conv])
        assert np.all(np.abs(val) <= 1e-9 * np.linalg.norm(g, axis=-1))
    q = project_to_boundary(ball.rho, CPoint(0.3 + 0j, 0.2j))
    assert abs(abs(q.z) ** 2 + abs(q.w) ** 2 - 1) < 1e-9


def test_ball_levi_is_one_and_scale_invariant(ball):
    z, w = boundary_sample(ball.rho, 200, seed=1)
    nrm, un = levi_values(ball.rho, z, w)
    assert np.allclose(nrm, 1.0, atol=1e-7)
    # unnormalized uses the non-unit L: |d rho|^2 Hess(L, L) = 1 on the sphere
    assert np.allclose(un, 1.0, atol=1e-7)
    big = ball.rho.scaled(3.0)
    assert np.allclose(levi_values(big, z, w)[0], nrm, atol=1e-7)
    assert abs(levi_form(ball.rho, (z[0], w[0])) - 1) < 1e-7


def test_frame_and_realify_identities(flat):
    z, w = boundary_sample(flat.rho, 50, seed=2)
    J = jet2(flat.rho.field, z, w)
    L, N, nrm = frame_vectors(J.grad)
    reL, imL = realify(L)
    G = real_gradient(J.grad)
    # Re L and Im L are tangent: orthogonal to the Euclidean gradient
    assert np.max(np.abs(np.sum(reL * G, -1))) < 1e-10
    assert np.max(np.abs(np.sum(imL * G, -1))) < 1e-10
    # for real u, L u = Re L . grad u + i Im L . grad u; check with u = rho
    Lrho = np.sum(L * J.grad, -1)
    assert np.max(np.abs(Lrho)) < 1e-12
    Nrho = np.sum(N * J.grad, -1)
    assert np.allclose(Nrho, nrm)


def test_flat_circle_levi_zero_and_root_check(flat):
    cv = flat.curves["gamma"](64)
    nrm, _ = levi_values(flat.rho, cv.z, cv.w)
    assert np.max(np.abs(nrm)) < 1e-12
    r = catalog.no_extra_flat_root_check()
    assert abs(r["min_value"] - math.log(2)) <= 1e-9
    assert r["positive"]


def test_transversality_on_flat_circle(flat):
    tc = transversality_check(flat.curves["gamma"](128), flat.rho)
    assert tc["transversal"] and tc["min_singular_value"] > 0.999


def test_curve_tangents_and_hausdorff():
    cv = curve_from_function(lambda t: (np.exp(1j * t), 0 * t + 0j), 400)
    x = cv.real
    t = 2 * np.pi * np.arange(400) / 400
    exact = np.stack([-np.sin(t), np.cos(t), 0 * t, 0 * t], -1)
    tang = cv.tangents / np.linalg.norm(cv.tangents, axis=-1, keepdims=True)
    assert np.max(np.abs(tang - exact)) < 1e-3
    td = np.linspace(0, 2 * np.pi, 200001)
    ref = np.stack([np.cos(td), np.sin(td), 0 * td, 0 * td], -1)
    # chord sagitta of a 400-gon, 1 - cos(pi / 400), up to the 1e-4 densify and 3e-5 reference spacings
    sag = 1 - np.cos(np.pi / 400)
    assert abs(polyline_hausdorff(x, True, ref) - sag) < 0.5e-4 + 0.5 * 3.2e-5
    assert abs(polyline_hausdorff(x + [0, 0, 0.01, 0], True, ref) - 0.01) < 1e-4


def test_scans(ball, flat):
    rb = levi_flat_scan(ball.rho, 2000, seed=0)
    assert rb.n_flagged == 0 and rb.components == []
    rf = levi_flat_scan(flat.rho, 5000, seed=3, reference=flat.flat_reference)
    kinds = [c["classification"] for c in rf.components]
    assert kinds == ["curve-like"]
    assert rf.components[0]["hausdorff_to_reference"] < 1e-3
    assert rf.min_grad_norm > 0
