"""Transport equation L u = h along a boundary curve transversal to Re L, Im L,
the obstruction right-hand side and the corrected defining function delta e^Phi.

Near a curve gamma every point is written as

    x = gamma(s3) + s1 Re L(gamma(s3)) + s2 Im L(gamma(s3)) + (normal part)

with s3 the nearest curve parameter and (s1, s2) the least-squares
components of x - gamma(s3) in the basis (Re L, Im L, gamma').  Then
u = h1(s3) s1 + h2(s3) s2 with h = h1 + i h2 vanishes on the curve and
satisfies (Re L) u = h1, (Im L) u = h2 there.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .cdiff import DiffScheme, ScalarField, jet2, to_real, from_real
from .domain import CurveSamples, DefiningFunction, frame_vectors, hess_form, realify, transversality_check
from .errors import DegenerateGradient, ProjectionAmbiguous, TransversalityError, TubeError
from .profiles import plateau

__all__ = [
    "SplineCurve",
    "TransportSolution",
    "obstruction_rhs",
    "obstruction_values",
    "solve_on_curve",
    "transport_residuals",
    "reach_estimate",
    "corrected_defining",
    "hess_LN_on_curve",
    "seam_check",
]


def _field(f):
    return f.field if isinstance(f, DefiningFunction) else f


# -- right-hand side ---------------------------------------------------------------

def obstruction_values(delta, z, w, normalized: bool = False, scheme: Optional[DiffScheme] = None,
                       grad_floor: float = 1e-8):
    """-Hess_delta(L, N) / conj(N)(delta) at arrays of points.

    conj(N)(delta) equals |d delta|.  With ``normalized`` the division is by
    the Euclidean gradient length |grad delta| = 2 |d delta| instead.
    """
    J = jet2(_field(delta), np.asarray(z, complex), np.asarray(w, complex), scheme=scheme)
    L, N, nrm = frame_vectors(J.grad, grad_floor)
    H = hess_form(J.mixed, L, N)
    Nb_delta = np.conj(np.sum(N * J.grad, axis=-1))
    den = 2.0 * nrm if normalized else Nb_delta
    return -H / den


def obstruction_rhs(delta, q, normalized: bool = False, scheme: Optional[DiffScheme] = None) -> complex:
    z, w = (q.z, q.w) if hasattr(q, "z") else q
    return complex(obstruction_values(delta, np.array([z]), np.array([w]), normalized, scheme)[0])


# -- curve representation ----------------------------------------------------------------

class SplineCurve:
    """Cubic spline through curve samples (periodic for closed curves).

    Open curves are extended linearly by ``margin`` of their parameter length
    on both ends.
    """

    def __init__(self, curve: CurveSamples, margin: float = 0.05, oversample: int = 8):
        x = curve.real
        n = len(x)
        self.closed = curve.closed
        if self.closed:
            t = 2 * np.pi * np.arange(n + 1) / n
            self.spline = CubicSpline(t, np.vstack([x, x[:1]]), bc_type="periodic")
            self.t0, self.t1 = 0.0, 2 * np.pi
        else:
            t = np.linspace(0.0, 1.0, n)
            self.spline = CubicSpline(t, x)
            self.t0, self.t1 = -margin, 1.0 + margin
            self._ends = (0.0, 1.0)
        self.period = self.t1 - self.t0
        m = oversample * n
        self.grid = np.linspace(self.t0, self.t1, m, endpoint=not self.closed)
        self.grid_pts = self(self.grid)
        self.spacing = float(np.median(np.linalg.norm(np.diff(self.grid_pts, axis=0), axis=-1)))

    def _wrap(self, s):
        if self.closed:
            return np.mod(s - self.t0, self.period) + self.t0
        return s

    def __call__(self, s, nu: int = 0):
        s = self._wrap(np.asarray(s, float))
        if self.closed:
            return self.spline(s, nu)
        lo, hi = self._ends
        inner = np.clip(s, lo, hi)
        out = self.spline(inner, nu)
        if nu == 0:
            out = out + (s - inner)[..., None] * self.spline(inner, 1)
        elif nu == 1:
            out = self.spline(inner, 1)
        else:
            out = np.where(((s < lo) | (s > hi))[..., None], 0.0, out)
        return out

    def nearest(self, x, tie_tol: float = 1e-9):
        """Nearest parameter for real points x (m, 4): grid, golden section, Newton polish."""
        x = np.atleast_2d(np.asarray(x, float))
        D = np.linalg.norm(x[:, None, :] - self.grid_pts[None, :, :], axis=-1)
        k = np.argmin(D, axis=1)
        m = len(self.grid)
        # competing minimum: another grid point far along the curve that is as close
        dmin = D[np.arange(len(x)), k]
        sep = np.abs(np.arange(m)[None, :] - k[:, None])
        if self.closed:
            sep = np.minimum(sep, m - sep)
        far = sep > max(4, m // 16)
        alt = np.where(far, D, np.inf).min(axis=1)
        amb = alt - dmin <= tie_tol * np.maximum(1.0, dmin) + 2 * self.spacing ** 2
        h = self.grid[1] - self.grid[0]
        a = self.grid[k] - h
        b = self.grid[k] + h
        gr = (np.sqrt(5) - 1) / 2
        c = b - gr * (b - a)
        d = a + gr * (b - a)

        def dist2(s):
            return np.sum((x - self(s)) ** 2, axis=-1)

        fc, fd = dist2(c), dist2(d)
        for _ in range(60):
            left = fc < fd
            b = np.where(left, d, b)
            a = np.where(left, a, c)
            c_new = b - gr * (b - a)
            d_new = a + gr * (b - a)
            c, d = c_new, d_new
            fc, fd = dist2(c), dist2(d)
        s = 0.5 * (a + b)
        for _ in range(3):
            g = self(s)
            g1 = self(s, 1)
            g2 = self(s, 2)
            r = x - g
            f = np.sum(r * g1, axis=-1)
            fp = np.sum(r * g2, axis=-1) - np.sum(g1 * g1, axis=-1)
            s = s - f / np.where(fp != 0, fp, 1.0)
        return self._wrap(s), amb, np.sqrt(dist2(s))

    def curvature(self, s):
        d1 = self(s, 1)
        d2 = self(s, 2)
        n1 = np.sum(d1 * d1, axis=-1)
        cross2 = np.maximum(n1 * np.sum(d2 * d2, axis=-1) - np.sum(d1 * d2, axis=-1) ** 2, 0.0)
        return np.sqrt(cross2) / n1 ** 1.5


def reach_estimate(curve: SplineCurve) -> dict:
    """min(1 / max curvature, half the smallest distance between far-apart curve points)."""
    s = curve.grid
    kmax = float(np.max(curve.curvature(s)))
    P = curve.grid_pts
    seg = np.linalg.norm(np.diff(P, axis=0), axis=-1)
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    total = arc[-1] + (np.linalg.norm(P[0] - P[-1]) if curve.closed else 0.0)
    A = np.abs(arc[:, None] - arc[None, :])
    if curve.closed:
        A = np.minimum(A, total - A)
    local = np.pi / max(kmax, 1e-12)
    D = np.linalg.norm(P[:, None, :] - P[None, :, :], axis=-1)
    far = A > local
    nonlocal_half = float(0.5 * D[far].min()) if np.any(far) else np.inf
    reach = min(1.0 / max(kmax, 1e-12), nonlocal_half)
    return {"reach": reach, "max_curvature": kmax, "nonlocal_half_distance": nonlocal_half}


# -- solver ---------------------------------------------------------------------------

@dataclass
class TransportSolution:
    u: ScalarField
    gamma: CurveSamples
    spline: SplineCurve
    h_curve: np.ndarray
    h_residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    transversality: dict = field(default_factory=dict)

    def coords(self, z, w):
        return self.u.meta["coords"](z, w)


def _frame_on_curve(rho, spline: SplineCurve, s, scheme):
    g = spline(s)
    zz, ww = from_real(g)
    J = jet2(_field(rho), zz, ww, scheme=scheme)
    L, N, nrm = frame_vectors(J.grad)
    reL, imL = realify(L)
    return g, reL, imL, zz, ww


def solve_on_curve(gamma: CurveSamples, rho: DefiningFunction, h: Optional[Callable] = None,
                   transv_floor: float = 0.1, scheme: Optional[DiffScheme] = None, h_const: Optional[complex] = None,
                   tie_tol: float = 1e-9) -> TransportSolution:
    """Real u near gamma with u = 0 on gamma and L u = h on gamma.

    ``h(z, w)`` returns complex values on the curve (or pass ``h_const``).
    """
    tc = transversality_check(gamma, rho, transv_floor, scheme)
    if not tc["transversal"]:
        raise TransversalityError(f"min singular value {tc['min_singular_value']:.3e} <= floor {transv_floor}")
    spline = SplineCurve(gamma)
    if h is None:
        c = complex(h_const if h_const is not None else 0.0)

        def h(z, w):
            return np.full(np.shape(z), c, dtype=complex)

    def coords(z, w):
        z = np.asarray(z, complex)
        w = np.asarray(w, complex)
        shape = np.broadcast(z, w).shape
        x = to_real(z, w).reshape(-1, 4)
        s, amb, dist = spline.nearest(x, tie_tol)
        if np.any(amb):
            raise ProjectionAmbiguous(f"{int(amb.sum())} point(s) have competing nearest curve parameters")
        g, reL, imL, gz, gw = _frame_on_curve(rho, spline, s, scheme)
        d1 = spline(s, 1)
        A = np.stack([reL, imL, d1], axis=-1)
        sol = np.linalg.solve(np.swapaxes(A, -1, -2) @ A, np.einsum("nij,ni->nj", A, x - g)[..., None])[..., 0]
        hv = np.asarray(h(gz, gw), complex)
        return s.reshape(shape), sol[:, 0].reshape(shape), sol[:, 1].reshape(shape), hv.reshape(shape), \
            dist.reshape(shape)

    def ev(z, w):
        _, s1, s2, hv, _ = coords(z, w)
        return hv.real * s1 + hv.imag * s2

    u = ScalarField(ev, name=f"u[{gamma.name}]", meta={"coords": coords, "kind": "transport"})
    hc = np.asarray(h(gamma.z, gamma.w), complex)
    sol = TransportSolution(u=u, gamma=gamma, spline=spline, h_curve=hc, transversality=tc)
    sol.h_residuals = transport_residuals(sol, rho, scheme=scheme)["residual"]
    return sol


def transport_residuals(sol: TransportSolution, rho: DefiningFunction, step: float = 1e-4,
                        scheme: Optional[DiffScheme] = None) -> dict:
    """Finite-difference (Re L) u + i (Im L) u - h at the curve samples."""
    z, w = sol.gamma.z, sol.gamma.w
    J = jet2(_field(rho), z, w, scheme=scheme)
    L, _, _ = frame_vectors(J.grad)
    reL, imL = realify(L)
    x = to_real(z, w)

    def dd(v):
        ests = []
        for hh in (step, step / 2):
            p = x + hh * v
            m = x - hh * v
            ests.append((sol.u(*from_real(p)) - sol.u(*from_real(m))) / (2 * hh))
        return (4 * ests[1] - ests[0]) / 3

    Lu = dd(reL) + 1j * dd(imL)
    res = Lu - sol.h_curve
    u_on = sol.u(z, w)
    return {"residual": res, "max_abs_residual": float(np.max(np.abs(res))),
            "max_abs_u_on_curve": float(np.max(np.abs(u_on)))}


# -- corrected defining function ---------------------------------------------------------

def corrected_defining(delta: DefiningFunction, gamma: CurveSamples, cutoff_spec: Optional[dict] = None,
                       scheme: Optional[DiffScheme] = None, normalized: bool = False) -> tuple:
    """delta e^Phi with Phi = chi u, u solving L u = -Hess_delta(L, N)/conj(N)(delta) on gamma.

    chi is a plateau bump of the distance to gamma: 1 inside radius r_in,
    0 beyond r_out.  Defaults r_in = reach/2, r_out = 3 reach/4.  Returns
    (DefiningFunction, info dict).
    """
    cutoff_spec = dict(cutoff_spec or {})
    spline = SplineCurve(gamma)
    rc = reach_estimate(spline)
    reach = rc["reach"]
    r_in = cutoff_spec.get("r_in", 0.5 * reach)
    r_out = cutoff_spec.get("r_out", 0.75 * reach)
    if not (0 < r_in < r_out) or r_out > reach:
        raise TubeError(f"tube radii r_in={r_in:.3g}, r_out={r_out:.3g} incompatible with reach {reach:.3g}")

    def h(z, w):
        return obstruction_values(delta, z, w, normalized, scheme)

    sol = solve_on_curve(gamma, delta, h, scheme=scheme)
    coords = sol.u.meta["coords"]
    df = _field(delta)

    def phi(z, w):
        z = np.asarray(z, complex)
        w = np.asarray(w, complex)
        z, w = np.broadcast_arrays(z, w)
        out = np.zeros(z.shape)
        # outside the outer tube Phi is exactly 0; the grid distance is an upper bound
        x = to_real(z, w).reshape(-1, 4)
        dgrid = np.linalg.norm(x[:, None, :] - spline.grid_pts[None, :, :], axis=-1).min(axis=1)
        near = (dgrid < r_out + 2 * spline.spacing).reshape(z.shape)
        if np.any(near):
            s, s1, s2, hv, dist = coords(z[near], w[near])
            out[near] = plateau(dist, r_in, r_out) * (hv.real * s1 + hv.imag * s2)
        return out

    def ev(z, w):
        return df(z, w) * np.exp(phi(z, w))

    f = ScalarField(ev, name=f"{df.name}*exp(Phi[{gamma.name}])", exclude=df.exclude, depth=df.depth,
                    meta={"r_in": r_in, "r_out": r_out})
    out = DefiningFunction(f, delta.bbox, name=f.name, center=delta.center, params=dict(delta.params),
                           provenance=delta.provenance)
    info = {"reach": rc, "r_in": r_in, "r_out": r_out, "transport": sol,
            "phi": ScalarField(phi, name="Phi")}
    return out, info


def hess_LN_on_curve(rho, gamma: CurveSamples, scheme: Optional[DiffScheme] = None) -> np.ndarray:
    """|Hess_rho(L, N)| at the curve samples, frame of rho itself."""
    J = jet2(_field(rho), gamma.z, gamma.w, scheme=scheme)
    L, N, _ = frame_vectors(J.grad)
    return np.abs(hess_form(J.mixed, L, N))


def seam_check(sol: TransportSolution, rho, offset: float = 1e-3, ds: float = 1e-7,
               scheme: Optional[DiffScheme] = None) -> dict:
    """Continuity of u across the parameter seam of a closed curve.

    u is evaluated at gamma(s) + offset Re L(gamma(s)) for s just below the
    end and just above the start of the parameter interval; the two values
    must agree up to O(ds).
    """
    sp = sol.spline
    if not sp.closed:
        return {"closed": False, "jump": 0.0}
    s = np.array([sp.t1 - ds, sp.t0 + ds])
    g, reL, imL, _, _ = _frame_on_curve(rho, sp, s, scheme)
    x = g + offset * reL / np.linalg.norm(reL, axis=-1, keepdims=True)
    u = sol.u(*from_real(x))
    return {"closed": True, "offset": offset, "ds": ds, "u_before": float(u[0]), "u_after": float(u[1]),
            "jump": float(abs(u[0] - u[1]))}
