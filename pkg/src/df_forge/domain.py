"""Defining functions, boundary sampling and projection, the unit frame (L, N),
Levi forms, Levi-flat scans and transversality checks.

Conventions: a holomorphic vector V = V[0] d/dz + V[1] d/dw is stored as a
complex 2-vector.  Its real and imaginary parts act on real functions as
the real 4-vectors (x, y, u, v)

    Re V = (Re V0, Im V0, Re V1, Im V1) / 2,   Im V = (Im V0, -Re V0, Im V1, -Re V1) / 2

so that V(f) = (Re V) f + i (Im V) f for real f.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree
from scipy.stats import qmc

from .cdiff import CPoint, DiffScheme, ScalarField, from_real, gradient, jet2, to_real
from .errors import DegenerateGradient, NoConvergence, SamplingError
from ._parallel import chunked_map

__all__ = [
    "DefiningFunction",
    "Frame",
    "CurveSamples",
    "ProjectionSettings",
    "real_gradient",
    "frame_vectors",
    "realify",
    "project_points",
    "project_to_boundary",
    "frame",
    "levi_form",
    "levi_values",
    "boundary_sample",
    "levi_flat_scan",
    "LeviScanReport",
    "transversality_check",
    "curve_from_function",
    "polyline_hausdorff",
]


@dataclass
class DefiningFunction:
    """A defining function rho with Omega = {rho < 0}.

    ``bbox`` is a pair of real 4-vectors (lo, hi) enclosing the closed domain;
    ``center`` an interior point used to cast sampling rays.
    """

    field: ScalarField
    bbox: tuple
    name: str = "rho"
    center: tuple = (0j, 0j)
    params: dict = field(default_factory=dict)
    provenance: str = "internal"

    def __post_init__(self):
        self.bbox = (np.asarray(self.bbox[0], float), np.asarray(self.bbox[1], float))

    def __call__(self, z, w):
        return self.field(z, w)

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.bbox[1] - self.bbox[0]))

    def scaled(self, c: float) -> "DefiningFunction":
        """The same domain defined by c * rho (c > 0)."""
        f = self.field
        ex = None
        if f.exact_jet is not None:
            def ex(z, w, _f=f):
                J = _f.exact_jet(z, w)
                return type(J)(**{k: c * np.asarray(v) for k, v in J.as_dict().items()})
        g = ScalarField(lambda z, w: c * f(z, w), name=f"{c}*{f.name}", bbox=f.bbox, exclude=f.exclude,
                        exact_jet=ex, depth=f.depth)
        return DefiningFunction(g, self.bbox, f"{c}*{self.name}", self.center, dict(self.params), self.provenance)


@dataclass
class Frame:
    """Unit holomorphic tangent L, unit complex normal N and |d rho|."""

    L: np.ndarray
    N: np.ndarray
    grad_norm: float
    rho_z: complex
    rho_w: complex


@dataclass
class CurveSamples:
    """Ordered boundary points of a curve with real-chart tangents (n, 4)."""

    z: np.ndarray
    w: np.ndarray
    tangents: np.ndarray
    closed: bool = True
    name: str = "curve"

    @property
    def real(self) -> np.ndarray:
        return to_real(self.z, self.w)

    def __len__(self):
        return len(self.z)


@dataclass(frozen=True)
class ProjectionSettings:
    grad_floor: float = 1e-8
    boundary_tol: float = 1e-9
    max_iter: int = 100
    max_step_frac: float = 0.1
    tie_step_frac: float = 1e-3


DEFAULT_PROJECTION = ProjectionSettings()


# -- frame algebra -----------------------------------------------------------

def real_gradient(grad) -> np.ndarray:
    """(rho_z, rho_w) -> the Euclidean gradient (rho_x, rho_y, rho_u, rho_v)."""
    g = np.asarray(grad)
    gz, gw = g[..., 0], g[..., 1]
    return np.stack([2 * gz.real, -2 * gz.imag, 2 * gw.real, -2 * gw.imag], axis=-1)


def frame_vectors(grad, grad_floor: float = 0.0):
    """L, N (..., 2) and |d rho| from the holomorphic gradient (..., 2)."""
    g = np.asarray(grad, dtype=complex)
    gz, gw = g[..., 0], g[..., 1]
    nrm = np.sqrt(np.abs(gz) ** 2 + np.abs(gw) ** 2)
    if np.any(nrm <= grad_floor):
        raise DegenerateGradient(f"|d rho| = {float(np.min(nrm)):.3e} below floor {grad_floor:.1e}")
    L = np.stack([gw, -gz], axis=-1) / nrm[..., None]
    N = np.stack([np.conj(gz), np.conj(gw)], axis=-1) / nrm[..., None]
    return L, N, nrm


def realify(V):
    """Real 4-vectors (Re V, Im V) of a holomorphic vector field V (..., 2)."""
    V = np.asarray(V, dtype=complex)
    a, b = V[..., 0], V[..., 1]
    re = 0.5 * np.stack([a.real, a.imag, b.real, b.imag], axis=-1)
    im = 0.5 * np.stack([a.imag, -a.real, b.imag, -b.real], axis=-1)
    return re, im


def hess_form(M, X, Y):
    """Hess(X, Y) = sum_ij M[i, j] X_i conj(Y_j)."""
    return np.einsum("...ij,...i,...j->...", M, X, np.conj(Y))


# -- projection ----------------------------------------------------------------

def project_points(rho: DefiningFunction, z, w, settings: ProjectionSettings = DEFAULT_PROJECTION,
                   scheme: Optional[DiffScheme] = None, max_iter: Optional[int] = None):
    """Damped Newton projection of many points onto {rho = 0}.

    Returns (z, w, converged, degenerate).  Each step moves along the
    Euclidean gradient by -rho g / |g|^2, capped in length and halved while
    |rho| does not decrease.
    """
    z = np.array(z, dtype=complex, copy=True).reshape(-1)
    w = np.array(w, dtype=complex, copy=True).reshape(-1)
    n = z.size
    x = to_real(z, w)
    diam = rho.diameter
    cap = settings.max_step_frac * diam
    conv = np.zeros(n, bool)
    degen = np.zeros(n, bool)
    tied = np.zeros(n, bool)
    active = np.ones(n, bool)
    iters = settings.max_iter if max_iter is None else max_iter
    for _ in range(iters):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        zz, ww = from_real(x[idx])
        val, grad = gradient(rho.field, zz, ww, scheme=scheme)
        gn = np.sqrt(np.sum(np.abs(grad) ** 2, axis=-1))
        done = np.abs(val) <= settings.boundary_tol * gn
        conv[idx[done]] = True
        bad = (gn < settings.grad_floor) & ~done
        # deterministic tie-break: one step along +x from a critical point
        first = bad & ~tied[idx]
        if np.any(first):
            x[idx[first], 0] += settings.tie_step_frac * diam
            tied[idx[first]] = True
        again = bad & ~first
        degen[idx[again]] = True
        go = ~done & ~bad
        active[idx[done | again]] = False
        if not np.any(go):
            continue
        gi = idx[go]
        g = real_gradient(grad[go])
        g2 = np.sum(g ** 2, axis=-1)
        step = -(val[go] / g2)[:, None] * g
        slen = np.linalg.norm(step, axis=-1)
        step *= np.minimum(1.0, cap / np.maximum(slen, 1e-300))[:, None]
        old = np.abs(val[go])
        t = np.ones(gi.size)
        pending = np.ones(gi.size, bool)
        for _k in range(30):
            if not np.any(pending):
                break
            cand = x[gi[pending]] + t[pending, None] * step[pending]
            cz, cw = from_real(cand)
            nv = np.abs(rho(cz, cw))
            ok = nv < old[pending]
            sel = np.nonzero(pending)[0]
            x[gi[sel[ok]]] = cand[ok]
            pending[sel[ok]] = False
            t[sel[~ok]] *= 0.5
        # accept the smallest trial anyway; stagnation shows up as non-convergence
        if np.any(pending):
            x[gi[pending]] += t[pending, None] * step[pending]
    zf, wf = from_real(x)
    return zf, wf, conv, degen


def project_to_boundary(rho: DefiningFunction, p, settings: ProjectionSettings = DEFAULT_PROJECTION,
                        scheme: Optional[DiffScheme] = None) -> CPoint:
    """Project a single point onto the boundary; raises on failure."""
    p = p if isinstance(p, CPoint) else CPoint(*p)
    z, w, conv, degen = project_points(rho, [p.z], [p.w], settings, scheme)
    if degen[0]:
        raise DegenerateGradient(f"{rho.name}: gradient vanished while projecting {p}")
    if not conv[0]:
        raise NoConvergence(f"{rho.name}: projection of {p} did not converge in {settings.max_iter} steps")
    return CPoint(z[0], w[0])


# -- frame and Levi form ---------------------------------------------------------

def frame(rho: DefiningFunction, q, grad_floor: float = DEFAULT_PROJECTION.grad_floor,
          scheme: Optional[DiffScheme] = None) -> Frame:
    q = q if isinstance(q, CPoint) else CPoint(*q)
    _, g = gradient(rho.field, q, scheme=scheme)
    L, N, nrm = frame_vectors(g, grad_floor)
    return Frame(L=np.asarray(L), N=np.asarray(N), grad_norm=float(nrm), rho_z=complex(g[0]), rho_w=complex(g[1]))


def levi_values(rho, z, w, scheme: Optional[DiffScheme] = None, grad_floor: float = 0.0):
    """Normalized and unnormalized Levi forms at arrays of points.

    normalized   = Hess(L, L) / |d rho| with the unit L,
    unnormalized = Hess(Lt, Lt) with Lt = rho_w d/dz - rho_z d/dw.
    The normalized value is unchanged when rho is multiplied by a positive
    constant.
    """
    f = rho.field if isinstance(rho, DefiningFunction) else rho
    J = jet2(f, np.asarray(z, complex), np.asarray(w, complex), scheme=scheme)
    g = J.grad
    M = J.mixed
    gz, gw = g[..., 0], g[..., 1]
    Lt = np.stack([gw, -gz], axis=-1)
    un = hess_form(M, Lt, Lt).real
    n2 = np.abs(gz) ** 2 + np.abs(gw) ** 2
    if np.any(np.sqrt(n2) <= grad_floor):
        raise DegenerateGradient("gradient below floor in Levi form evaluation")
    with np.errstate(divide="ignore", invalid="ignore"):
        nrm = un / (n2 * np.sqrt(n2))
    return nrm, un


def levi_form(rho: DefiningFunction, q, normalized: bool = True, scheme: Optional[DiffScheme] = None) -> float:
    q = q if isinstance(q, CPoint) else CPoint(*q)
    n, u = levi_values(rho, np.array([q.z]), np.array([q.w]), scheme=scheme,
                       grad_floor=DEFAULT_PROJECTION.grad_floor)
    return float(n[0] if normalized else u[0])


# -- boundary sampling -----------------------------------------------------------

def sphere_seeds(n: int, seed: int, center, radius: float):
    """Quasi-uniform points on a 3-sphere (scrambled Sobol through Hopf coordinates)."""
    m = max(1, math.ceil(math.log2(max(n, 2))))
    U = qmc.Sobol(d=3, scramble=True, seed=seed).random_base2(m)[:n]
    a = np.sqrt(U[:, 0])
    b = np.sqrt(1.0 - U[:, 0])
    z = center[0] + radius * a * np.exp(2j * np.pi * U[:, 1])
    w = center[1] + radius * b * np.exp(2j * np.pi * U[:, 2])
    return z, w


def boundary_sample(rho: DefiningFunction, n: int, seed: int = 0, settings: ProjectionSettings = DEFAULT_PROJECTION,
                    n_ray: int = 48, threads=None, scheme: Optional[DiffScheme] = None):
    """Boundary points obtained by casting rays from ``rho.center`` to sphere seeds.

    The outermost sign change along each ray is bracketed, bisected and
    polished with Newton projection.  Returns (z, w) of the converged points
    in seed order.
    """
    c = (complex(rho.center[0]), complex(rho.center[1]))
    lo, hi = rho.bbox
    R = 0.5 * float(np.linalg.norm(hi - lo)) * 1.05
    sz, sw = sphere_seeds(n, seed, c, R)

    def work(sl):
        z0, w0 = sz[sl], sw[sl]
        m = z0.size
        t = np.linspace(1.0, 0.0, n_ray + 1)
        Z = c[0] + t[None, :] * (z0 - c[0])[:, None]
        W = c[1] + t[None, :] * (w0 - c[1])[:, None]
        V = rho(Z, W)
        inside = V < 0
        k = np.argmax(inside, axis=1)
        has = inside[np.arange(m), k] & (k > 0)
        t_out = t[np.maximum(k - 1, 0)]
        t_in = t[k]
        for _ in range(60):
            tm = 0.5 * (t_out + t_in)
            vm = rho(c[0] + tm * (z0 - c[0]), c[1] + tm * (w0 - c[1]))
            o = vm >= 0
            t_out = np.where(o, tm, t_out)
            t_in = np.where(o, t_in, tm)
        tb = 0.5 * (t_out + t_in)
        zb = np.where(has, c[0] + tb * (z0 - c[0]), z0)
        wb = np.where(has, c[1] + tb * (w0 - c[1]), w0)
        pz, pw, conv, degen = project_points(rho, zb, wb, settings, scheme)
        return pz, pw, conv & ~degen

    parts = chunked_map(work, n, threads)
    z = np.concatenate([p[0] for p in parts]) if parts else np.zeros(0, complex)
    w = np.concatenate([p[1] for p in parts]) if parts else np.zeros(0, complex)
    ok = np.concatenate([p[2] for p in parts]) if parts else np.zeros(0, bool)
    if ok.sum() < n / 2:
        raise SamplingError(f"{rho.name}: only {int(ok.sum())} of {n} projections converged")
    z, w = z[ok], w[ok]
    _, g = gradient(rho.field, z, w, scheme=scheme)
    gn = np.sqrt(np.sum(np.abs(g) ** 2, axis=-1))
    if gn.size and gn.min() <= settings.grad_floor:
        raise DegenerateGradient(f"{rho.name}: |d rho| = {gn.min():.2e} on a boundary sample")
    return z, w


def sample_resolution(x: np.ndarray) -> float:
    """Median nearest-neighbour distance of a real point cloud (n, 4)."""
    if len(x) < 2:
        return 0.0
    d, _ = cKDTree(x).query(x, k=2)
    return float(np.median(d[:, 1]))


# -- Levi-flat scan --------------------------------------------------------------

def tangent_directions(rho, z, w, scheme=None):
    """Unit real tangent directions (Re L, Im L, characteristic) at boundary points."""
    _, g = gradient(rho.field, z, w, scheme=scheme)
    L, N, _ = frame_vectors(g)
    reL, imL = realify(L)
    n = real_gradient(g)
    n = n / np.linalg.norm(n, axis=-1, keepdims=True)
    reL = reL / np.linalg.norm(reL, axis=-1, keepdims=True)
    imL = imL / np.linalg.norm(imL, axis=-1, keepdims=True)
    # the fourth direction completes an orthonormal basis with n, Re L, Im L
    B = np.stack([n, reL, imL], axis=-1)
    e = np.eye(4)[None, :, :].repeat(len(n), 0)
    P = e - B @ np.swapaxes(B, -1, -2)
    col = np.argmax(np.linalg.norm(P, axis=-2), axis=-1)
    T = P[np.arange(len(n)), :, col]
    T = T / np.linalg.norm(T, axis=-1, keepdims=True)
    return [reL, imL, T]


def _flat_at(rho, x, flat_tol, settings, scheme):
    z, w = from_real(x)
    pz, pw, conv, degen = project_points(rho, z, w, settings, scheme, max_iter=40)
    nl, _ = levi_values(rho, pz, pw, scheme=scheme)
    ok = conv & ~degen & np.isfinite(nl)
    return ok & (nl < flat_tol), to_real(pz, pw)


def refine_to_core(rho, x, flat_tol, cap, settings=DEFAULT_PROJECTION, scheme=None, rounds: int = 4,
                   grid: int = 16, bisect: int = 20):
    """Move flagged points to the core of their flat set.

    Along each boundary tangent direction the flat interval through the point
    is located (grid search then bisection on both sides) and the point is
    moved to the interval midpoint.  Directions in which the flat set extends
    beyond ``cap`` (e.g. along a flat curve) are left alone.
    """
    x = np.array(x, float, copy=True)
    for _ in range(rounds):
        moved = 0.0
        z, w = from_real(x)
        dirs = tangent_directions(rho, z, w, scheme)
        for d in dirs:
            ends = []
            found = np.ones(len(x), bool)
            for sgn in (1.0, -1.0):
                ts = cap * np.arange(1, grid + 1) / grid
                lo = np.zeros(len(x))
                hi = np.full(len(x), np.nan)
                for t in ts:
                    open_ = np.isnan(hi)
                    if not np.any(open_):
                        break
                    fl, _ = _flat_at(rho, x[open_] + sgn * t * d[open_], flat_tol, settings, scheme)
                    sel = np.nonzero(open_)[0]
                    hi[sel[~fl]] = t
                    lo[sel[fl]] = t
                has = ~np.isnan(hi)
                found &= has
                a, b = lo.copy(), np.where(has, hi, lo)
                sel = np.nonzero(has)[0]
                for _k in range(bisect):
                    if sel.size == 0:
                        break
                    m = 0.5 * (a[sel] + b[sel])
                    fl, _ = _flat_at(rho, x[sel] + sgn * m[:, None] * d[sel], flat_tol, settings, scheme)
                    a[sel] = np.where(fl, m, a[sel])
                    b[sel] = np.where(fl, b[sel], m)
                ends.append(0.5 * (a + b))
            mid = 0.5 * (ends[0] - ends[1])
            mid = np.where(found, mid, 0.0)
            if np.any(mid != 0):
                sel = np.nonzero(mid != 0)[0]
                cand = x[sel] + mid[sel, None] * d[sel]
                cz, cw = from_real(cand)
                pz, pw, conv, degen = project_points(rho, cz, cw, settings, scheme)
                good = conv & ~degen
                x[sel[good]] = to_real(pz[good], pw[good])
                moved = max(moved, float(np.max(np.abs(mid[sel[good]]), initial=0.0)))
        if moved < 1e-10 * max(1.0, cap):
            break
    return x


def _components(x: np.ndarray, link: float):
    n = len(x)
    if n == 0:
        return np.zeros(0, int), 0
    pairs = cKDTree(x).query_pairs(link, output_type="ndarray")
    A = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n)) if len(pairs) else \
        coo_matrix((n, n))
    k, lab = connected_components(A, directed=False)
    # relabel by first occurrence so the numbering is schedule independent
    order = {}
    for l in lab:
        if l not in order:
            order[l] = len(order)
    return np.array([order[l] for l in lab]), k


def _local_pca_ratio(x: np.ndarray, k: int = 16, max_points: int = 400) -> float:
    n = len(x)
    if n < 4:
        return 0.0
    k = min(k, n - 1)
    step = max(1, n // max_points)
    q = x[::step]
    _, nb = cKDTree(x).query(q, k=k + 1)
    ratios = []
    for row in nb:
        P = x[row] - x[row].mean(axis=0)
        ev = np.sort(np.linalg.eigvalsh(P.T @ P))[::-1]
        ratios.append(ev[0] / max(ev[1], 1e-300))
    return float(np.median(ratios))


def order_polyline(x: np.ndarray):
    """Order curve-like points; returns (ordered points, closed flag)."""
    c = x.mean(axis=0)
    P = x - c
    _, _, Vt = np.linalg.svd(P, full_matrices=False)
    a = P @ Vt[0]
    b = P @ Vt[1] if Vt.shape[0] > 1 else np.zeros_like(a)
    ang = np.arctan2(b, a)
    rad = np.hypot(a, b)
    srt = np.sort(ang)
    gaps = np.diff(np.concatenate([srt, [srt[0] + 2 * np.pi]]))
    closed = bool(gaps.max() < np.pi / 4 and rad.min() > 0.3 * np.mean(rad))
    if closed:
        return x[np.argsort(ang)], True
    return x[np.argsort(a)], False


def _densify(poly: np.ndarray, closed: bool, spacing: float):
    if len(poly) < 2:
        return poly
    pts = np.vstack([poly, poly[:1]]) if closed else poly
    out = [pts[:1]]
    for p, q in zip(pts[:-1], pts[1:]):
        k = max(1, int(math.ceil(np.linalg.norm(q - p) / spacing)))
        t = np.arange(1, k + 1)[:, None] / k
        out.append(p + t * (q - p))
    return np.vstack(out)


def polyline_hausdorff(poly: np.ndarray, closed: bool, ref: np.ndarray, spacing: float = 1e-4) -> float:
    """Hausdorff distance between a polyline (real points) and a dense reference sample."""
    dense = _densify(np.asarray(poly, float), closed, spacing)
    d1, _ = cKDTree(ref).query(dense)
    d2, _ = cKDTree(dense).query(ref)
    return float(max(d1.max(), d2.max()))


@dataclass
class LeviScanReport:
    domain: str
    n_samples: int
    flat_tol: float
    n_converged: int
    resolution: float
    n_flagged: int
    components: list
    min_grad_norm: float
    levi_min: float
    levi_max: float

    def to_dict(self) -> dict:
        return {
            "domain": self.domain,
            "n_samples": self.n_samples,
            "flat_tol": self.flat_tol,
            "n_converged": self.n_converged,
            "resolution": self.resolution,
            "n_flagged": self.n_flagged,
            "min_grad_norm": self.min_grad_norm,
            "levi_min": self.levi_min,
            "levi_max": self.levi_max,
            "components": self.components,
        }


def _point_list(x):
    return [[float(v) for v in row] for row in x]


def levi_flat_scan(rho: DefiningFunction, n_samples: int, flat_tol: float = 1e-8, seed: int = 0,
                   settings: ProjectionSettings = DEFAULT_PROJECTION, threads=None, refine: bool = True,
                   refine_max: int = 4000, cap_frac: float = 0.1, link_factor: float = 3.0,
                   curve_ratio: float = 25.0, point_factor: float = 3.0, reference: Optional[Callable] = None,
                   scheme: Optional[DiffScheme] = None, keep_points: int = 2000) -> LeviScanReport:
    """Locate boundary points whose normalized Levi form is below ``flat_tol``.

    Flagged samples are moved to the core of their flat set, clustered by a
    distance threshold and classified by local PCA as isolated-point-like,
    curve-like or other.  ``reference(n)`` may return a dense real sample of a
    known flat curve; curve-like components then report their Hausdorff
    distance to it.
    """
    z, w = boundary_sample(rho, n_samples, seed, settings, threads=threads, scheme=scheme)
    x = to_real(z, w)
    res = sample_resolution(x)

    def lev(sl):
        return levi_values(rho, z[sl], w[sl], scheme=scheme)[0]

    nl = np.concatenate(chunked_map(lev, len(z), threads))
    _, g = gradient(rho.field, z, w, scheme=scheme)
    gmin = float(np.sqrt(np.sum(np.abs(g) ** 2, axis=-1)).min())
    flagged = np.nonzero(nl < flat_tol)[0]
    xf = x[flagged]
    if refine and len(xf):
        if len(xf) > refine_max:
            xf = xf[np.linspace(0, len(xf) - 1, refine_max).round().astype(int)]
        cap = cap_frac * rho.diameter
        parts = chunked_map(lambda sl: refine_to_core(rho, xf[sl], flat_tol, cap, settings, scheme),
                            len(xf), threads, chunk=512)
        xf = np.concatenate(parts)
    lab, k = _components(xf, link_factor * res)
    comps = []
    for c in range(k):
        P = xf[lab == c]
        cen = P.mean(axis=0)
        ext = float(np.max(np.linalg.norm(P - cen, axis=-1)))
        ratio = _local_pca_ratio(P)
        if ext <= point_factor * res:
            cls = "isolated-point-like"
        elif ratio > curve_ratio:
            cls = "curve-like"
        else:
            cls = "other"
        entry = {
            "centroid": [float(v) for v in cen],
            "extent": ext,
            "size": int(len(P)),
            "pca_ratio": ratio,
            "classification": cls,
        }
        if cls == "curve-like":
            poly, closed = order_polyline(P)
            entry["closed"] = closed
            if reference is not None:
                entry["hausdorff_to_reference"] = polyline_hausdorff(poly, closed, reference(200000))
            P = poly
        step = max(1, len(P) // keep_points)
        entry["points"] = _point_list(P[::step])
        comps.append(entry)
    return LeviScanReport(
        domain=rho.name,
        n_samples=int(n_samples),
        flat_tol=float(flat_tol),
        n_converged=int(len(z)),
        resolution=res,
        n_flagged=int(len(flagged)),
        components=comps,
        min_grad_norm=gmin,
        levi_min=float(np.nanmin(nl)) if len(nl) else float("nan"),
        levi_max=float(np.nanmax(nl)) if len(nl) else float("nan"),
    )


# -- curves and transversality -----------------------------------------------------

def curve_from_function(gamma: Callable, n: int, closed: bool = True, t0: float = 0.0, t1: float = 2 * np.pi,
                        name: str = "curve") -> CurveSamples:
    """Sample t -> (z(t), w(t)); tangents by central differences in the real chart."""
    if closed:
        t = t0 + (t1 - t0) * np.arange(n) / n
    else:
        t = np.linspace(t0, t1, n)
    z, w = gamma(t)
    z = np.asarray(z, complex) * np.ones(n)
    w = np.asarray(w, complex) * np.ones(n)
    x = to_real(z, w)
    if closed:
        tan = (np.roll(x, -1, 0) - np.roll(x, 1, 0)) / (2 * (t1 - t0) / n)
    else:
        tan = np.gradient(x, t, axis=0)
    return CurveSamples(z=z, w=w, tangents=tan, closed=closed, name=name)


def transversality_check(curve: CurveSamples, rho: DefiningFunction, transv_floor: float = 0.1,
                         scheme: Optional[DiffScheme] = None) -> dict:
    """Smallest singular value of [gamma', Re L, Im L] (unit columns) along the curve."""
    _, g = gradient(rho.field, curve.z, curve.w, scheme=scheme)
    L, _, _ = frame_vectors(g)
    reL, imL = realify(L)
    cols = [curve.tangents, reL, imL]
    A = np.stack([c / np.linalg.norm(c, axis=-1, keepdims=True) for c in cols], axis=-1)
    sv = np.linalg.svd(A, compute_uv=False)[:, -1]
    return {
        "curve": curve.name,
        "domain": rho.name,
        "n": int(len(sv)),
        "min_singular_value": float(sv.min()),
        "per_point": [float(s) for s in sv],
        "transv_floor": transv_floor,
        "transversal": bool(sv.min() > transv_floor),
    }
