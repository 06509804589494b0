import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracle_library import ORACLES
from df_forge.cdiff import ScalarField, jet2
from df_forge.domain import DefiningFunction
from df_forge.errors import InteriorError
from df_forge.hessian_frame import (eta_bisect, eta_threshold, frame_hessian, min_eig, pencil, psd_eta_max,
                                    psd_eta_max_from_jet, sphere_ab)


def _herm(rng, n):
    X = rng.normal(size=(n, 2, 2)) + 1j * rng.normal(size=(n, 2, 2))
    return (X + np.conj(np.swapaxes(X, -1, -2))) / 2


def _brute(A, g, n=20001):
    etas = np.linspace(0, 1, n)
    out = []
    for Ak, gk in zip(A, g):
        M = Ak[None] + (1 - etas)[:, None, None] * np.outer(gk, np.conj(gk))[None]
        ok = np.linalg.eigvalsh(M)[:, 0] >= -1e-12 * np.abs(np.linalg.eigvalsh(Ak)).max()
        good = etas[ok]
        out.append(good.max() if len(good) else 0.0)
    return np.array(out)


def test_threshold_matches_bisection_and_brute_force():
    rng = np.random.default_rng(3)
    A = _herm(rng, 300)
    g = rng.normal(size=(300, 2)) + 1j * rng.normal(size=(300, 2))
    t = eta_threshold(A, g)
    b = eta_bisect(A, g)
    assert np.max(np.abs(t - b)) < 1e-9
    assert np.max(np.abs(t - _brute(A, g))) <= 1 / 20000 + 1e-12
    # at an interior threshold the pencil is singular
    inner = (t > 1e-6) & (t < 1 - 1e-6)
    M = A[inner] + (1 - t[inner])[:, None, None] * g[inner, :, None] * np.conj(g[inner, None, :])
    assert np.max(np.abs(min_eig(M)) / np.abs(np.linalg.eigvalsh(A[inner])).max(axis=1)) < 1e-9


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 5), st.floats(-5, -0.01), st.complex_numbers(max_magnitude=3),
       st.complex_numbers(max_magnitude=3))
def test_threshold_diagonal_closed_form(l0, l1, g0, g1):
    # A = diag(l0, l1), l1 < 0 < l0: det(A + s g g*) = l0 l1 + s (l1 |g0|^2 + l0 |g1|^2)
    A = np.array([[[l0, 0], [0, l1]]], complex)
    g = np.array([[g0, g1]])
    den = l1 * abs(g0) ** 2 + l0 * abs(g1) ** 2
    if den <= 1e-9:
        expect = 0.0
    else:
        expect = max(0.0, 1 - (-l0 * l1) / den)
    assert abs(eta_threshold(A, g)[0] - expect) < 1e-9


def test_threshold_semidefinite_is_one():
    A = np.array([[[2.0, 0.5], [0.5, 1.0]]], complex)
    assert eta_threshold(A, np.array([[1.0, 2.0j]]))[0] == 1.0


def test_psd_eta_max_hand_example():
    # rho = v - |w|^2 + |z|^2: Hess = diag(1, -1), d rho = (zbar, -i/2 - wbar).
    # A = (-rho) diag(1, -1); threshold s* = (-rho) / (|g1|^2 - |g0|^2), eta = 1 - s*.
    f = ScalarField(lambda z, w: w.imag - abs(w) ** 2 + abs(z) ** 2, "saddle")
    rho = DefiningFunction(f, ((-2,) * 4, (2,) * 4))
    for z, w in [(0.1 + 0.05j, -0.3j), (0.2j, 0.1 - 0.4j), (0.0, -0.2j)]:
        r = w.imag - abs(w) ** 2 + abs(z) ** 2
        g0, g1 = np.conj(z), -0.5j - np.conj(w)
        expect = 1 - (-r) / (abs(g1) ** 2 - abs(g0) ** 2)
        assert abs(psd_eta_max(rho, (z, w)) - expect) < 1e-8


def test_ball_exponent_is_one_and_pencil_consistent():
    f = ScalarField(ORACLES["ball"][0], "ball")
    rng = np.random.default_rng(0)
    z = 0.4 * (rng.normal(size=50) + 1j * rng.normal(size=50)) / 2
    w = 0.4 * (rng.normal(size=50) + 1j * rng.normal(size=50)) / 2
    J = jet2(f, z, w)
    assert np.all(psd_eta_max_from_jet(J) == 1.0)
    P = pencil(J.val, J.mixed, J.grad, 1.0)
    assert np.all(min_eig(P) > 0)
    with pytest.raises(InteriorError):
        psd_eta_max_from_jet(jet2(f, np.array([1.0 + 0j]), np.array([1.0 + 0j])))


def test_frame_hessian_frame_properties():
    f = ScalarField(ORACLES["perturbed_ball"][0], "pb")
    rho = DefiningFunction(f, ((-2,) * 4, (2,) * 4))
    fh = frame_hessian(rho, (0.3 + 0.2j, -0.1 + 0.5j))
    L, N = fh.L, fh.N
    assert abs(np.vdot(L, L) - 1) < 1e-12 and abs(np.vdot(N, N) - 1) < 1e-12
    assert abs(np.vdot(N, L)) < 1e-12
    # N(rho) = |d rho| and L(rho) = 0
    assert abs(fh.N_rho - fh.grad_norm) < 1e-12
    J = jet2(f, np.array([0.3 + 0.2j]), np.array([-0.1 + 0.5j]))
    assert abs(np.sum(L * J.grad[0])) < 1e-12


def test_sphere_ab_unit():
    a, b = sphere_ab(64)
    assert a.shape == (64,)
    assert np.allclose(np.abs(a) ** 2 + np.abs(b) ** 2, 1)
