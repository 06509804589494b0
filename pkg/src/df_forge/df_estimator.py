"""Empirical Diederich-Fornaess exponents from collar scans.

For a defining function rho the exponent threshold at an interior point p is
the largest eta in (0, 1] with a semidefinite complex Hessian of
-(-rho)^eta at p (``hessian_frame.psd_eta_max``).  The estimate over a collar
is the minimum of these thresholds.  A weighted candidate
-(-r e^psi)^eta exp(-delta eta |z|^2) equals -(-rho~)^eta with
rho~ = r exp(psi - delta |z|^2), so weighted recipes are scanned through rho~.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .cdiff import DiffScheme, ScalarField, gradient, jet2, nested_field
from .domain import DefiningFunction, boundary_sample, real_gradient, ProjectionSettings, DEFAULT_PROJECTION
from .errors import SamplingError
from .hessian_frame import eta_bisect, eta_threshold, min_eig
from .weight import fh_weight
from ._parallel import chunked_map

__all__ = ["CollarSpec", "DFEstimate", "collar_points", "weighted_rho", "estimate_exponent", "estimate_index",
           "Recipe", "parse_family"]


@dataclass(frozen=True)
class CollarSpec:
    n_boundary: int = 2000
    depths: tuple = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)   # fractions of the bbox diameter
    seed: int = 0
    bisect_tol: float = 1e-4
    psd_tol: float = 1e-12

    def as_dict(self):
        return {"n_boundary": self.n_boundary, "depths": list(self.depths), "seed": self.seed,
                "bisect_tol": self.bisect_tol, "psd_tol": self.psd_tol}


def collar_points(rho: DefiningFunction, spec: CollarSpec, threads=None, scheme: Optional[DiffScheme] = None,
                  boundary=None):
    """Interior points at the listed depths along inward unit normals.

    Returns (z, w, depth_index, boundary_index); points that do not land
    strictly inside are dropped.
    """
    if boundary is None:
        bz, bw = boundary_sample(rho, spec.n_boundary, spec.seed, threads=threads, scheme=scheme)
    else:
        bz, bw = boundary
    _, g = gradient(rho.field, bz, bw, scheme=scheme)
    n = real_gradient(g)
    n = n / np.linalg.norm(n, axis=-1, keepdims=True)
    x = np.stack([bz.real, bz.imag, bw.real, bw.imag], axis=-1)
    D = rho.diameter
    Z, W, DI, BI = [], [], [], []
    for k, d in enumerate(spec.depths):
        y = x - d * D * n
        z = y[:, 0] + 1j * y[:, 1]
        w = y[:, 2] + 1j * y[:, 3]
        Z.append(z)
        W.append(w)
        DI.append(np.full(len(z), k))
        BI.append(np.arange(len(z)))
    z, w, di, bi = (np.concatenate(a) for a in (Z, W, DI, BI))
    inside = rho(z, w) < 0
    if inside.sum() == 0:
        raise SamplingError(f"{rho.name}: no collar point is interior")
    return z[inside], w[inside], di[inside], bi[inside]


def weighted_rho(r: DefiningFunction, C: float, delta: float, scheme: Optional[DiffScheme] = None) -> DefiningFunction:
    """r exp(psi - delta |z|^2) with psi = -C |Hess_r(L_r, N_r)|^2."""
    if C == 0 and delta == 0:
        return r
    psi = fh_weight(r, C, scheme)
    rf = r.field

    def ev(z, w):
        return rf(z, w) * np.exp(psi(z, w) - delta * (np.abs(z) ** 2 + np.abs(w) ** 2))

    f = nested_field(ev, (rf, psi), name=f"{rf.name}*exp(psi[C={C:g}]-{delta:g}|z|^2)")
    f.exclude = rf.exclude
    return DefiningFunction(f, r.bbox, name=f.name, center=r.center, params={**r.params, "C": C, "delta": delta},
                            provenance=r.provenance)


@dataclass
class DFEstimate:
    defining_function: str
    eta_hat: float
    bisect_eta: float
    max_pointwise_disagreement: float
    fail_witness: Optional[dict]
    collar_spec: dict
    per_depth: list
    n_points: int
    empirical: bool = True
    per_point: dict = field(default_factory=dict)

    def to_dict(self, include_points: bool = False) -> dict:
        d = {
            "defining_function": self.defining_function,
            "eta_hat": self.eta_hat,
            "bisect_eta": self.bisect_eta,
            "max_pointwise_disagreement": self.max_pointwise_disagreement,
            "fail_witness": self.fail_witness,
            "collar_spec": self.collar_spec,
            "per_depth": self.per_depth,
            "n_points": self.n_points,
            "empirical": self.empirical,
        }
        if include_points:
            d["per_point"] = self.per_point
        return d


def _thresholds(rho: DefiningFunction, z, w, spec: CollarSpec, scheme, threads):
    def work(sl):
        J = jet2(rho.field, z[sl], w[sl], scheme=scheme)
        val = np.asarray(J.val)
        A = (-val)[:, None, None] * J.mixed
        g = J.grad
        t_closed = eta_threshold(A, g, spec.psd_tol)
        t_bis = eta_bisect(A, g, tol=1e-10, psd_tol=spec.psd_tol)
        return t_closed, t_bis, A, g

    parts = chunked_map(work, len(z), threads, chunk=1024)
    t = np.concatenate([p[0] for p in parts])
    tb = np.concatenate([p[1] for p in parts])
    A = np.concatenate([p[2] for p in parts])
    g = np.concatenate([p[3] for p in parts])
    return t, tb, A, g


def estimate_exponent(rho: DefiningFunction, spec: CollarSpec = CollarSpec(), threads=None,
                      scheme: Optional[DiffScheme] = None, boundary=None) -> DFEstimate:
    """Minimum over the collar of the per-point exponent thresholds (capped at 1).

    Cross-checks: per point, the closed-form threshold against bisection on
    the smallest eigenvalue; globally, bisection on the predicate
    "min-eig of the pencil is >= 0 at every collar point".
    """
    z, w, di, bi = collar_points(rho, spec, threads, scheme, boundary)
    t, tb, A, g = _thresholds(rho, z, w, spec, scheme, threads)
    eta_hat = float(np.min(t))
    scale = np.maximum(np.max(np.abs(np.linalg.eigvalsh(A)), axis=-1), 1e-300)

    def all_ok(eta):
        M = A + (1.0 - eta) * g[:, :, None] * np.conj(g)[:, None, :]
        return bool(np.all(min_eig(M) >= -spec.psd_tol * scale))

    lo, hi = 0.0, 1.0
    if all_ok(1.0):
        lo = 1.0
    else:
        while hi - lo > spec.bisect_tol / 4:
            mid = 0.5 * (lo + hi)
            if all_ok(mid):
                lo = mid
            else:
                hi = mid
    k = int(np.argmin(t))
    witness = None
    if eta_hat < 1.0:
        eta_w = min(1.0, eta_hat + spec.bisect_tol)
        M = A[k] + (1.0 - eta_w) * np.outer(g[k], np.conj(g[k]))
        me = float(min_eig(M))
        witness = {"point": [float(z[k].real), float(z[k].imag), float(w[k].real), float(w[k].imag)],
                   "eta": eta_w, "min_eigenvalue": me, "depth_fraction": float(spec.depths[di[k]]),
                   "rho": float(rho(z[k:k + 1], w[k:k + 1])[0])}
    per_depth = []
    for j, d in enumerate(spec.depths):
        sel = di == j
        per_depth.append({"depth_fraction": float(d), "n": int(sel.sum()),
                          "eta_min": float(t[sel].min()) if sel.any() else None})
    return DFEstimate(
        defining_function=rho.name,
        eta_hat=eta_hat,
        bisect_eta=float(lo),
        max_pointwise_disagreement=float(np.max(np.abs(t - tb))),
        fail_witness=witness,
        collar_spec=spec.as_dict(),
        per_depth=per_depth,
        n_points=int(len(z)),
        per_point={"eta": [float(v) for v in t], "depth_index": [int(v) for v in di],
                   "boundary_index": [int(v) for v in bi]},
    )


@dataclass(frozen=True)
class Recipe:
    """A member of a defining-function family: raw (C = delta = 0) or weighted."""

    C: float = 0.0
    delta: float = 0.0

    @property
    def label(self):
        return "raw" if self.C == 0 and self.delta == 0 else f"fh(C={self.C:g},delta={self.delta:g})"


def parse_family(spec: str) -> list:
    """'raw', 'fh:C=1,delta=0.1', 'grid:C=0.5|1|5,delta=0.01|0.1' joined by ';'."""
    out = []
    for part in (spec or "raw").split(";"):
        part = part.strip()
        if not part:
            continue
        if part == "raw":
            out.append(Recipe())
            continue
        kind, _, args = part.partition(":")
        kv = {}
        for item in args.split(","):
            if item.strip():
                k, _, v = item.partition("=")
                kv[k.strip()] = [float(x) for x in v.split("|")]
        Cs = kv.get("C", [0.0])
        ds = kv.get("delta", [0.0])
        if kind == "fh":
            out.append(Recipe(Cs[0], ds[0]))
        elif kind == "grid":
            out.extend(Recipe(c, d) for c in Cs for d in ds)
        else:
            raise ValueError(f"unknown family member {part!r}")
    return out


def estimate_index(rho: DefiningFunction, family: Sequence[Recipe], spec: CollarSpec = CollarSpec(), threads=None,
                   scheme: Optional[DiffScheme] = None) -> dict:
    """Best empirical exponent over a family of defining functions of the same domain.

    All members are scanned on the collar built from the raw function so the
    comparison is paired.
    """
    if not family:
        raise ValueError("family must be nonempty")
    bz, bw = boundary_sample(rho, spec.n_boundary, spec.seed, threads=threads, scheme=scheme)
    results = []
    for rec in family:
        f = weighted_rho(rho, rec.C, rec.delta, scheme)
        est = estimate_exponent(f, spec, threads, scheme, boundary=(bz, bw))
        results.append({"recipe": rec.label, "C": rec.C, "delta": rec.delta, **est.to_dict()})
    k = int(np.argmax([r["eta_hat"] for r in results]))
    return {"domain": rho.name, "index_estimate": results[k]["eta_hat"], "argmax_recipe": results[k]["recipe"],
            "members": results, "empirical": True}
