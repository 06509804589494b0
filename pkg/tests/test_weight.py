import numpy as np
import pytest

import sympy as sp

import sym_oracle as so
from df_forge import catalog
from df_forge.cdiff import jet2
from df_forge.errors import HypothesisError, ParamError
from df_forge.weight import (build_candidate, check_lemma33, choose_C, decomposition_identity_check, fh_weight,
                             levi_unit_values, xi_values)


def sym_frame_entries(expr, z, w):
    """Hess(L, L) and Hess(N, L) of a sympy expression with the unit frame, from symbolic derivatives."""
    J = {k: f(z, w) for k, f in so.jet(expr).items()}
    gz, gw = J["dz"], J["dw"]
    n = np.sqrt(abs(gz) ** 2 + abs(gw) ** 2)
    L = np.stack([gw, -gz], -1) / n[..., None]
    N = np.stack([np.conj(gz), np.conj(gw)], -1) / n[..., None]
    M = np.stack([np.stack([J["dzzb"], J["dzwb"]], -1), np.stack([J["dwzb"], J["dwwb"]], -1)], -2)

    def H(X, Y):
        return np.einsum("...i,...ij,...j->...", X, M, np.conj(Y))
    return H(L, L).real, H(N, L)


EPS = 0.1


def _pb_expr():
    return so.x ** 2 + so.y ** 2 + so.u ** 2 + so.v ** 2 - 1 + EPS * sp.re(so.Z ** 2 * sp.conjugate(so.W))


@pytest.fixture(scope="module")
def pts():
    rng = np.random.default_rng(5)
    z = 0.4 * (rng.normal(size=20) + 1j * rng.normal(size=20))
    w = 0.4 * (rng.normal(size=20) + 1j * rng.normal(size=20))
    return z, w


def test_frame_entries_and_weight_match_sympy(pts):
    z, w = pts
    e = catalog.get(f"perturbed_ball:eps={EPS}")
    LL, NL = sym_frame_entries(_pb_expr(), z, w)
    assert np.max(np.abs(levi_unit_values(e.rho, z, w) - LL)) < 1e-10
    assert np.max(np.abs(xi_values(e.rho, z, w) - NL)) < 1e-10
    psi = fh_weight(e.rho, 2.0)
    assert np.max(np.abs(psi(z, w) - (-2.0 * np.abs(NL) ** 2))) < 1e-10


def test_weight_vanishes_on_flat_circle():
    e = catalog.get("exp_flat")
    cv = e.curves["gamma"](32)
    psi = fh_weight(e.rho, 5.0)
    assert np.max(np.abs(psi(cv.z, cv.w))) < 1e-20


@pytest.mark.parametrize("C", [0.5, 1.0, 5.0])
def test_weight_identities_on_flat_circle(C):
    e = catalog.get("exp_flat")
    r = check_lemma33(e.rho, C, e.curves["gamma"](64))
    assert r["pass"], r


def test_weight_identities_hypothesis_errors():
    e = catalog.get("exp_flat_perturbed")
    with pytest.raises(HypothesisError):
        check_lemma33(e.rho, 1.0, e.curves["gamma"](16))
    b = catalog.get("ball")
    with pytest.raises(HypothesisError):
        check_lemma33(b.rho, 1.0, b.curves["equator"](16))


@pytest.mark.parametrize("name", ["ball", "exp_flat", "perturbed_ball"])
def test_decomposition_identity(name, pts):
    e = catalog.get(name)
    z, w = pts
    keep = e.rho(z, w) < -1e-3
    r = decomposition_identity_check(e.rho, 1.0, 0.5, 0.1, z[keep], w[keep], n_ab=16)
    assert r["max_rel_error"] <= 1e-4


def test_candidate_reduces_to_power(pts):
    e = catalog.get("ball")
    z, w = pts
    c = build_candidate(e.rho, 0.0, 0.5, 0.0)
    r = e.rho(z, w)
    # -(-r)^eta inside, continued oddly (sign(r) |r|^eta) outside
    assert np.allclose(c.candidate(z, w), np.sign(r) * np.sqrt(np.abs(r)))
    assert np.any(r > 0) and np.any(r < 0)
    c1 = build_candidate(e.rho, 0.0, 1.0, 0.0)
    assert c1.candidate is e.rho.field
    with pytest.raises(ParamError):
        build_candidate(e.rho, 1.0, 1.5, 0.1)
    with pytest.raises(ParamError):
        build_candidate(e.rho, -1.0, 0.5, 0.1)


def test_choose_C_relation():
    e = catalog.get("exp_flat")
    cv = e.curves["gamma"](32)
    r = choose_C(e.rho, cv.z, cv.w, 0.1)
    assert r["K"] ** 2 / (4 * r["C"]) <= 0.1 / 8
    assert r["heuristic"]
