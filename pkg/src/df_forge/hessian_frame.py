"""Frame Hessians, the 2x2 exponent threshold of -(-rho)^eta and the I/II/III
decomposition of the complex Hessian of -(-r e^psi)^eta exp(-delta eta |z|^2).

Throughout, |z|^2 stands for |z|^2 + |w|^2 and Hess_f(X, Y) = sum f_{i jbar} X_i conj(Y_j).
"""
from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np

from .cdiff import DiffScheme, Jet2, ScalarField, jet2
from .domain import DefiningFunction, frame_vectors, hess_form
from .errors import DomainError, InteriorError

__all__ = [
    "FrameHessian",
    "Decomposition",
    "frame_hessian",
    "frame_hessian_from_jet",
    "pencil",
    "psd_eta_max",
    "psd_eta_max_from_jet",
    "eta_threshold",
    "eta_bisect",
    "min_eig",
    "decompose",
    "decompose_arrays",
    "candidate_form",
    "collar_inequality_check",
    "sphere_ab",
]


def _field(f):
    return f.field if isinstance(f, DefiningFunction) else f


@dataclass
class FrameHessian:
    H_LL: float
    H_LN: complex
    H_NN: float
    N_rho: complex
    grad_norm: float
    L: np.ndarray
    N: np.ndarray

    def as_dict(self):
        d = asdict(self)
        d["H_LN"] = [self.H_LN.real, self.H_LN.imag]
        d["N_rho"] = [complex(self.N_rho).real, complex(self.N_rho).imag]
        d["L"] = [[c.real, c.imag] for c in self.L]
        d["N"] = [[c.real, c.imag] for c in self.N]
        return d


def frame_hessian_from_jet(J: Jet2, grad_floor: float = 0.0):
    """Vectorised frame Hessian entries (H_LL, H_LN, H_NN, N_rho, |d rho|, L, N)."""
    g = J.grad
    L, N, nrm = frame_vectors(g, grad_floor)
    M = J.mixed
    H_LL = hess_form(M, L, L)
    H_LN = hess_form(M, L, N)
    H_NN = hess_form(M, N, N)
    N_rho = np.sum(N * g, axis=-1)
    return H_LL, H_LN, H_NN, N_rho, nrm, L, N


def frame_hessian(rho, p, scheme: Optional[DiffScheme] = None, grad_floor: float = 1e-8) -> FrameHessian:
    """Hess(L, L), Hess(L, N), Hess(N, N) and N(rho) with the frame taken at p."""
    z, w = (p.z, p.w) if hasattr(p, "z") else p
    J = jet2(_field(rho), np.array([z], complex), np.array([w], complex), scheme=scheme)
    H_LL, H_LN, H_NN, N_rho, nrm, L, N = frame_hessian_from_jet(J, grad_floor)
    return FrameHessian(float(H_LL[0].real), complex(H_LN[0]), float(H_NN[0].real), complex(N_rho[0]),
                        float(nrm[0]), L[0], N[0])


# -- exponent threshold ----------------------------------------------------------

def pencil(rho_val, M, g, eta):
    """M(eta) = (-rho) H + (1 - eta) g g*, the complex Hessian of -(-rho)^eta
    divided by eta (-rho)^(eta - 2)."""
    rho_val = np.asarray(rho_val, float)
    gg = g[..., :, None] * np.conj(g)[..., None, :]
    eta = np.asarray(eta, float)
    return (-rho_val)[..., None, None] * M + (1.0 - eta)[..., None, None] * gg


def min_eig(A):
    return np.linalg.eigvalsh(A)[..., 0]


def eta_threshold(A, g, psd_tol: float = 1e-12):
    """Largest eta in (0, 1] with A + (1 - eta) g g* >= 0 for Hermitian 2x2 A.

    With s = 1 - eta, det(A + s g g*) = det A + s g* adj(A) g and the trace
    grows by s |g|^2, so the threshold is s* = -det A / (g* adj(A) g) when A
    has exactly one negative eigenvalue and that denominator is positive.
    Returns 1 when A is already semidefinite and 0 when no eta > 0 works.
    """
    A = np.asarray(A, complex)
    g = np.asarray(g, complex)
    ev = np.linalg.eigvalsh(A)
    scale = np.maximum(np.max(np.abs(ev), axis=-1), 1e-300)
    lam0 = ev[..., 0]
    lam1 = ev[..., 1]
    a, b = A[..., 0, 0], A[..., 0, 1]
    c, d = A[..., 1, 0], A[..., 1, 1]
    det = (a * d - b * c).real
    # adj(A) = [[d, -b], [-c, a]]
    g0, g1 = g[..., 0], g[..., 1]
    quad = (np.conj(g0) * (d * g0 - b * g1) + np.conj(g1) * (-c * g0 + a * g1)).real
    out = np.zeros(lam0.shape)
    psd = lam0 >= -psd_tol * scale
    out[psd] = 1.0
    one_neg = ~psd & (lam1 > psd_tol * scale) & (quad > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        s_star = np.where(one_neg, -det / np.where(quad > 0, quad, 1.0), np.inf)
    eta = 1.0 - s_star
    out = np.where(one_neg, np.clip(eta, 0.0, 1.0), out)
    return out


def eta_bisect(A, g, tol: float = 1e-12, psd_tol: float = 1e-12, iters: int = 60):
    """Bisection on eta for the predicate min-eig(A + (1 - eta) g g*) >= 0."""
    A = np.asarray(A, complex)
    g = np.asarray(g, complex)
    scale = np.maximum(np.max(np.abs(np.linalg.eigvalsh(A)), axis=-1), 1e-300)

    def ok(eta):
        M = A + (1.0 - eta)[..., None, None] * g[..., :, None] * np.conj(g)[..., None, :]
        return min_eig(M) >= -psd_tol * scale

    shape = A.shape[:-2]
    lo = np.zeros(shape)
    hi = np.ones(shape)
    top = ok(hi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        good = ok(mid)
        lo = np.where(good, mid, lo)
        hi = np.where(good, hi, mid)
        if np.all(hi - lo < tol):
            break
    return np.where(top, 1.0, lo)


def psd_eta_max_from_jet(J: Jet2, psd_tol: float = 1e-12):
    val = np.asarray(J.val, float)
    if np.any(val >= 0):
        raise InteriorError("psd_eta_max requires rho(p) < 0")
    A = (-val)[..., None, None] * J.mixed
    return eta_threshold(A, J.grad, psd_tol)


def psd_eta_max(rho, p, scheme: Optional[DiffScheme] = None, psd_tol: float = 1e-12) -> float:
    """Largest eta in (0, 1] for which -(-rho)^eta has a semidefinite complex Hessian at p."""
    z, w = (p.z, p.w) if hasattr(p, "z") else p
    J = jet2(_field(rho), np.array([z], complex), np.array([w], complex), scheme=scheme)
    return float(psd_eta_max_from_jet(J, psd_tol)[0])


# -- I / II / III ---------------------------------------------------------------------

@dataclass
class Decomposition:
    I: float
    II: complex
    III: float
    eta: float
    delta: float
    C_weight: float = 0.0

    def as_dict(self):
        return {"I": self.I, "II": [self.II.real, self.II.imag], "III": self.III, "eta": self.eta,
                "delta": self.delta, "C_weight": self.C_weight}


def _weighted_frame(Jr: Jet2, Jp: Jet2):
    """Gradient of rho = r e^psi from the jets of r and psi, and its frame."""
    r = np.asarray(Jr.val)
    e = np.exp(np.asarray(Jp.val))
    g = e[..., None] * (Jr.grad + r[..., None] * Jp.grad)
    L, N, nrm = frame_vectors(g)
    return g, L, N


def decompose_arrays(Jr: Jet2, Jp: Jet2, z, w, eta: float, delta: float):
    """I, II, III at arrays of points from the jets of r and psi.

    L and N are the unit frame of rho = r e^psi, so L(rho) = 0 exactly; the
    algebra below uses that, |L| = |N| = 1 and <L, N> = 0.
    """
    r = np.asarray(Jr.val, float)
    if np.any(r >= 0):
        raise DomainError("decompose requires r(p) < 0")
    psi = np.asarray(Jp.val, float)
    ep = np.exp(psi)
    g_rho, L, N = _weighted_frame(Jr, Jp)
    z = np.asarray(z, complex)
    w = np.asarray(w, complex)
    gphi = np.stack([np.conj(z), np.conj(w)], axis=-1) * np.ones_like(L)
    gr, gp = Jr.grad, Jp.grad

    def V(X, g):
        return np.sum(X * g, axis=-1)

    def Vb(X, g):  # conj(X)(f) for real f
        return np.conj(V(X, g))

    Lphi, Nphi = V(L, gphi), V(N, gphi)
    Lr, Nr = V(L, gr), V(N, gr)
    Lp, Np = V(L, gp), V(N, gp)
    Nbr, Nbp, Nbphi = Vb(N, gr), Vb(N, gp), Vb(N, gphi)
    Hr_LL, Hr_LN, Hr_NN = (hess_form(Jr.mixed, X, Y) for X, Y in ((L, L), (L, N), (N, N)))
    Hp_LL, Hp_LN, Hp_NN = (hess_form(Jp.mixed, X, Y) for X, Y in ((L, L), (L, N), (N, N)))
    de, d2e = delta * eta, delta ** 2 * eta

    I = ep * (d2e * (-r) * np.abs(Lphi) ** 2 - delta * (-r) + r * np.abs(Lp) ** 2 - Hr_LL - r * Hp_LL)
    II = ep * (de * Lphi * Nbr + de * r * Lphi * Nbp + d2e * (-r) * Lphi * Nbphi - Lp * Nbr - Lr * Nbp
               - r * Lp * Nbp - Hr_LN - r * Hp_LN)
    rho = r * ep
    N_rho = V(N, g_rho)
    # Hess_rho(N, N) for rho = r e^psi
    H_rho_NN = ep * (Hr_NN + r * Hp_NN + r * np.abs(Np) ** 2 + Nr * np.conj(Np) + Np * np.conj(Nr))
    III = (de * N_rho * np.conj(Nphi) + de * Nphi * np.conj(N_rho) + d2e * (-rho) * np.abs(Nphi) ** 2
           - delta * (-rho) - H_rho_NN
           + (eta - 1.0) / (-rho) * ep ** 2 * (np.abs(Nr) ** 2 + r ** 2 * np.abs(Np) ** 2
                                                + r * Nr * np.conj(Np) + r * Np * np.conj(Nr)))
    return I.real, II, III.real, L, N


def decompose(r, psi, eta: float, delta: float, p, scheme: Optional[DiffScheme] = None,
              C_weight: float = 0.0) -> Decomposition:
    z, w = (p.z, p.w) if hasattr(p, "z") else p
    z = np.array([z], complex)
    w = np.array([w], complex)
    Jr = jet2(_field(r), z, w, scheme=scheme)
    if np.asarray(Jr.val)[0] >= 0:
        raise DomainError("decompose requires r(p) < 0")
    Jp = jet2(_field(psi), z, w, scheme=scheme)
    I, II, III, _, _ = decompose_arrays(Jr, Jp, z, w, eta, delta)
    return Decomposition(float(I[0]), complex(II[0]), float(III[0]), eta, delta, C_weight)


def candidate_form(Jr: Jet2, Jp: Jet2, z, w, eta, delta, a, b):
    """-eta e^{-delta eta |z|^2} (-r e^psi)^{eta-1} (|a|^2 I + 2 Re(a conj(b) II) + |b|^2 III)
    for (a, b) arrays of shape (..., K); returns shape (..., K) and the frame."""
    I, II, III, L, N = decompose_arrays(Jr, Jp, z, w, eta, delta)
    r = np.asarray(Jr.val)
    psi = np.asarray(Jp.val)
    phi = np.abs(np.asarray(z)) ** 2 + np.abs(np.asarray(w)) ** 2
    pre = -eta * np.exp(-delta * eta * phi) * (-r * np.exp(psi)) ** (eta - 1.0)
    q = (np.abs(a) ** 2 * I[..., None] + 2 * (a * np.conj(b) * II[..., None]).real
         + np.abs(b) ** 2 * III[..., None])
    return pre[..., None] * q, L, N


def sphere_ab(n: int = 64):
    """Deterministic Fibonacci-style points (a, b) on the unit sphere of C^2."""
    k = np.arange(n) + 0.5
    t = k / n                               # |a|^2 uniform
    phi1 = 2 * np.pi * k * (np.sqrt(5) - 1) / 2
    phi2 = 2 * np.pi * k * (np.sqrt(2) - 1)
    a = np.sqrt(t) * np.exp(1j * phi1)
    b = np.sqrt(1 - t) * np.exp(1j * phi2)
    return a, b


def collar_inequality_check(r, psi, eta: float, delta: float, z, w, scheme: Optional[DiffScheme] = None,
                            n_ab: int = 64) -> dict:
    """Per-point checks at interior collar points.

    ``III_bound``: III < e^psi (eta - 1) |N(r)|^2 / (-2r).
    ``form_positive``: |a|^2 I + 2 Re(a conj(b) II) + |b|^2 III < 0 for all
    sampled (a, b), i.e. the candidate's Hessian is positive on them; the
    same is confirmed by the eigenvalues of the 2x2 matrix [[I, II], [conj II, III]].
    """
    z = np.asarray(z, complex).reshape(-1)
    w = np.asarray(w, complex).reshape(-1)
    Jr = jet2(_field(r), z, w, scheme=scheme)
    Jp = jet2(_field(psi), z, w, scheme=scheme)
    I, II, III, L, N = decompose_arrays(Jr, Jp, z, w, eta, delta)
    rv = np.asarray(Jr.val)
    Nr = np.sum(N * Jr.grad, axis=-1)
    bound = np.exp(np.asarray(Jp.val)) * (eta - 1.0) * np.abs(Nr) ** 2 / (-2.0 * rv)
    iii_ok = III < bound
    a, b = sphere_ab(n_ab)
    q = (np.abs(a) ** 2 * I[:, None] + 2 * (a * np.conj(b) * II[:, None]).real + np.abs(b) ** 2 * III[:, None])
    form_margin = -q.max(axis=1)
    Q = np.stack([np.stack([I, II], -1), np.stack([np.conj(II), III], -1)], -2)
    eig_margin = -np.linalg.eigvalsh(Q)[:, -1]
    return {
        "n": int(len(z)),
        "eta": eta,
        "delta": delta,
        "III_bound_pass": [bool(v) for v in iii_ok],
        "III_margin": [float(v) for v in bound - III],
        "form_margin": [float(v) for v in form_margin],
        "eig_margin": [float(v) for v in eig_margin],
        "worst_III_margin": float(np.min(bound - III)),
        "worst_form_margin": float(form_margin.min()),
        "worst_eig_margin": float(eig_margin.min()),
        "pass": bool(np.all(iii_ok) and np.all(form_margin > 0)),
    }
