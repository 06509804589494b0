"""The weight psi = -C |Hess_r(L_r, N_r)|^2, weighted candidates and the checks
that accompany them on Levi-flat sets."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cdiff import DiffScheme, Jet2, ScalarField, jet2, gradient, nested_field, wirtinger
from .domain import CurveSamples, DefiningFunction, frame_vectors, hess_form, real_gradient
from .errors import DomainError, HypothesisError, ParamError

__all__ = [
    "WeightedCandidate",
    "zero_field",
    "fh_weight",
    "xi_values",
    "levi_unit_values",
    "build_candidate",
    "weighted_defining",
    "check_lemma33",
    "choose_C",
    "decomposition_identity_check",
]


def _field(f):
    return f.field if isinstance(f, DefiningFunction) else f


def zero_field(name: str = "zero") -> ScalarField:
    def jet(z, w):
        sh = np.broadcast(np.asarray(z), np.asarray(w)).shape
        zc = np.zeros(sh, complex)
        return Jet2(np.zeros(sh), *[zc.copy() for _ in range(9)])

    return ScalarField(lambda z, w: np.zeros(np.broadcast(np.asarray(z), np.asarray(w)).shape), name, exact_jet=jet)


def _frame_entries(r, z, w, scheme):
    J = jet2(_field(r), z, w, scheme=scheme)
    L, N, nrm = frame_vectors(J.grad)
    return J, L, N, nrm


def xi_values(r, z, w, scheme: Optional[DiffScheme] = None):
    """xi = Hess_r(N_r, L_r) with the frame of r taken at each point."""
    J, L, N, _ = _frame_entries(r, np.asarray(z, complex), np.asarray(w, complex), scheme)
    return hess_form(J.mixed, N, L)


def levi_unit_values(r, z, w, scheme: Optional[DiffScheme] = None):
    """Hess_r(L_r, L_r) with the unit L_r (not divided by |d r|)."""
    J, L, N, _ = _frame_entries(r, np.asarray(z, complex), np.asarray(w, complex), scheme)
    return hess_form(J.mixed, L, L).real


def fh_weight(r, C: float, scheme: Optional[DiffScheme] = None) -> ScalarField:
    """psi = -C |Hess_r(L_r, N_r)|^2 as a differentiable field.

    L_r, N_r are given by the unit-frame formulas at every point where the
    gradient of r is nonzero.
    """
    if C < 0:
        raise ParamError("C must be nonnegative")
    rf = _field(r)
    if C == 0:
        return zero_field(f"psi[C=0,{rf.name}]")

    def ev(z, w):
        z = np.asarray(z, complex)
        w = np.asarray(w, complex)
        xi = xi_values(rf, z, w, scheme)
        return -C * np.abs(xi) ** 2

    return nested_field(ev, (rf,), differentiates=True, name=f"psi[C={C:g},{rf.name}]",
                        meta={"C": C, "kind": "fh_weight"})


def weighted_defining(r, psi: ScalarField, name: Optional[str] = None) -> ScalarField:
    """r e^psi."""
    rf = _field(r)

    def ev(z, w):
        return rf(z, w) * np.exp(psi(z, w))

    out = nested_field(ev, (rf, psi), name=name or f"{rf.name}*exp({psi.name})")
    out.exclude = rf.exclude
    return out


@dataclass
class WeightedCandidate:
    r: DefiningFunction
    C_weight: float
    eta: float
    delta: float
    psi: ScalarField
    rho: ScalarField
    candidate: ScalarField

    def describe(self):
        return {"r": self.r.name, "C": self.C_weight, "eta": self.eta, "delta": self.delta,
                "candidate": self.candidate.name, "depth": self.candidate.depth}


def build_candidate(r: DefiningFunction, C: float, eta: float, delta: float,
                    scheme: Optional[DiffScheme] = None) -> WeightedCandidate:
    """-(-r e^psi)^eta exp(-delta eta |z|^2) with psi the weight above.

    Outside the domain the candidate is continued by the odd extension
    sign(t) |t|^eta so that it stays negative exactly where r is.
    """
    if not 0 < eta <= 1:
        raise ParamError("eta must lie in (0, 1]")
    if delta < 0 or C < 0:
        raise ParamError("delta and C must be nonnegative")
    psi = fh_weight(r, C, scheme)
    rho = weighted_defining(r, psi)
    rf = _field(r)

    if C == 0 and delta == 0 and eta == 1:
        cand = rf
    else:
        def ev(z, w):
            t = rho(z, w)
            phi = np.abs(z) ** 2 + np.abs(w) ** 2
            return np.sign(t) * np.abs(t) ** eta * np.exp(-delta * eta * phi)

        cand = nested_field(ev, (rho,), name=f"cand[C={C:g},eta={eta:g},delta={delta:g},{rf.name}]",
                            meta={"C": C, "eta": eta, "delta": delta})
    return WeightedCandidate(r, C, eta, delta, psi, rho, cand)


def choose_C(r, z, w, delta: float, safety: float = 2.0, scheme: Optional[DiffScheme] = None) -> dict:
    """C with K^2 / (4C) <= delta / 8, times a safety factor.

    K bounds 2 / |grad r| over the supplied points near the flat set
    (the factor relating the normal derivative of the Levi form to its
    difference quotient along -r).  Heuristic: the true constant depends on
    a neighbourhood the sample only approximates.
    """
    _, g = gradient(_field(r), np.asarray(z, complex), np.asarray(w, complex), scheme=scheme)
    gn = np.linalg.norm(real_gradient(g), axis=-1)
    K = float(2.0 * np.max(1.0 / gn))
    C = safety * 2.0 * K ** 2 / delta
    return {"K": K, "C": C, "delta": delta, "safety_factor": safety, "heuristic": True}


def check_lemma33(r, C: float, sigma, tol: float = 1e-5, flat_tol: float = 1e-8,
                  scheme: Optional[DiffScheme] = None, step: float = 2e-3, levels: int = 2) -> dict:
    """Residuals of the weight identities at points of a flat set.

    At each point of ``sigma`` (a CurveSamples or a (z, w) pair):

    * ``L_psi``: |L_r psi|;
    * ``hess_gap``: Hess_psi(L, L) + C |N_r Hess_r(L_r, L_r)|^2, expected <= 0;
    * ``third_order``: |L_r Hess_r(N_r, L_r) - N_r Hess_r(L_r, L_r)|.

    The derivatives of Hess_r(N_r, L_r) and Hess_r(L_r, L_r) along the frame
    are single central differences (with Richardson) of these jet-built
    functions, i.e. third derivatives of r together with the variation of the
    frame.  Points failing Hess_r(L, L) = Hess_r(L, N) = 0 within
    ``flat_tol`` raise HypothesisError.
    """
    if isinstance(sigma, CurveSamples):
        z, w = sigma.z, sigma.w
    else:
        z, w = sigma
    z = np.asarray(z, complex).reshape(-1)
    w = np.asarray(w, complex).reshape(-1)
    rf = _field(r)
    J, L, N, nrm = _frame_entries(rf, z, w, scheme)
    H_LL = hess_form(J.mixed, L, L)
    H_LN = hess_form(J.mixed, L, N)
    bad = (np.abs(H_LL) > flat_tol) | (np.abs(H_LN) > flat_tol)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise HypothesisError(
            f"point {k} is not flat with Hess(L,N)=0: |Hess(L,L)|={abs(H_LL[k]):.2e}, |Hess(L,N)|={abs(H_LN[k]):.2e}")
    psi = fh_weight(rf, C, scheme)
    Jp = jet2(psi, z, w, scheme=scheme)
    L_psi = np.abs(np.sum(L * Jp.grad, axis=-1))
    hess_psi_LL = hess_form(Jp.mixed, L, L).real
    h = step * np.maximum(1.0, np.sqrt(np.abs(z) ** 2 + np.abs(w) ** 2))

    def xi_fn(zz, ww):
        return xi_values(rf, zz, ww, scheme)

    def levi_fn(zz, ww):
        return levi_unit_values(rf, zz, ww, scheme)

    xz, _, xw, _ = wirtinger(xi_fn, z, w, h, levels)
    lz, _, lw, _ = wirtinger(levi_fn, z, w, h, levels)
    L_xi = L[:, 0] * xz + L[:, 1] * xw
    N_levi = N[:, 0] * lz + N[:, 1] * lw
    third = np.abs(L_xi - N_levi)
    gap = hess_psi_LL + C * np.abs(N_levi) ** 2
    res = {
        "C": C,
        "n": int(len(z)),
        "tol": tol,
        "max_L_psi": float(L_psi.max()),
        "max_hess_gap": float(gap.max()),
        "max_third_order": float(third.max()),
        "max_abs_N_levi": float(np.abs(N_levi).max()),
        "max_abs_L_xi": float(np.abs(L_xi).max()),
        "L_psi": [float(v) for v in L_psi],
        "hess_gap": [float(v) for v in gap],
        "third_order": [float(v) for v in third],
    }
    res["pass"] = bool(res["max_L_psi"] <= tol and res["max_hess_gap"] <= tol and res["max_third_order"] <= tol)
    return res


def decomposition_identity_check(r, C: float, eta: float, delta: float, z, w, n_ab: int = 64,
                                 scheme: Optional[DiffScheme] = None) -> dict:
    """Assembled -eta e^{-delta eta phi} (-r e^psi)^{eta-1} (|a|^2 I + 2 Re(a conj(b) II) + |b|^2 III)
    against the complex Hessian of the candidate differentiated directly, phi = |z|^2 + |w|^2.

    The error at each point is max over the (a, b) sample of the absolute
    difference divided by the largest |assembled| value at that point.
    """
    from .hessian_frame import candidate_form, sphere_ab

    z = np.asarray(z, complex).reshape(-1)
    w = np.asarray(w, complex).reshape(-1)
    rf = _field(r)
    wc = build_candidate(r, C, eta, delta, scheme)
    Jr = jet2(rf, z, w, scheme=scheme)
    Jp = jet2(wc.psi, z, w, scheme=scheme)
    a, b = sphere_ab(n_ab)
    assembled, L, N = candidate_form(Jr, Jp, z, w, eta, delta, a[None, :], b[None, :])
    Jc = jet2(wc.candidate, z, w, scheme=scheme)
    V = a[None, :, None] * L[:, None, :] + b[None, :, None] * N[:, None, :]
    direct = np.einsum("nki,nij,nkj->nk", V, Jc.mixed, np.conj(V)).real
    scale = np.max(np.abs(assembled), axis=1)
    rel = np.max(np.abs(direct - assembled), axis=1) / scale
    return {"n": int(len(z)), "n_ab": n_ab, "C": C, "eta": eta, "delta": delta,
            "max_rel_error": float(rel.max()), "median_rel_error": float(np.median(rel)),
            "per_point": [float(v) for v in rel]}
