"""The Behrens hypersurface rho_H = v + R(z, w) with an exact polynomial jet,
and an empirical scan for the radius of its punctured strongly pseudoconvex
neighbourhood of the origin."""
from __future__ import annotations

import numpy as np

from ..cdiff import Jet2, ScalarField
from ..domain import DefiningFunction, levi_values
from .base import CatalogEntry, KnownFact

__all__ = ["Poly", "behrens_poly", "make_behrens", "behrens_tau_scan"]


class Poly:
    """Real polynomial sum c z^a zbar^b u^k v^m (w = u + iv) with exact Wirtinger jets."""

    def __init__(self, terms):
        self.terms = [(complex(c), int(a), int(b), int(k), int(m)) for c, a, b, k, m in terms if c != 0]
        d = self._d
        dz, dzb, dw, dwb = d(self.terms, "z"), d(self.terms, "zb"), d(self.terms, "w"), d(self.terms, "wb")
        self.parts = {
            "val": self.terms, "dz": dz, "dw": dw,
            "dzzb": d(dz, "zb"), "dzwb": d(dz, "wb"), "dwzb": d(dw, "zb"), "dwwb": d(dw, "wb"),
            "dzz": d(dz, "z"), "dzw": d(dz, "w"), "dww": d(dw, "w"),
        }

    @staticmethod
    def _d(terms, var):
        out = []
        for c, a, b, k, m in terms:
            if var == "z" and a:
                out.append((c * a, a - 1, b, k, m))
            elif var == "zb" and b:
                out.append((c * b, a, b - 1, k, m))
            elif var in ("w", "wb"):
                if k:
                    out.append((0.5 * c * k, a, b, k - 1, m))
                if m:
                    s = -0.5j if var == "w" else 0.5j
                    out.append((s * c * m, a, b, k, m - 1))
        return out

    @staticmethod
    def _eval(terms, z, w):
        z, w = np.broadcast_arrays(z, w)
        zb = np.conj(z)
        u, v = w.real, w.imag
        cache = {}

        def pw(key, base, e):
            if (key, e) not in cache:
                cache[(key, e)] = np.ones_like(base) if e == 0 else pw(key, base, e - 1) * base
            return cache[(key, e)]

        out = np.zeros(z.shape, complex)
        for c, a, b, k, m in terms:
            out += c * (pw("z", z, a) * pw("zb", zb, b)) * (pw("u", u, k) * pw("v", v, m))
        return out

    def __call__(self, z, w):
        return self._eval(self.parts["val"], np.asarray(z, complex), np.asarray(w, complex)).real

    def jet(self, z, w) -> Jet2:
        z = np.asarray(z, complex)
        w = np.asarray(w, complex)
        vals = {k: self._eval(t, z, w) for k, t in self.parts.items()}
        vals["val"] = vals["val"].real
        return Jet2(**vals)


def behrens_poly() -> Poly:
    """v + P6 + 2u Q4 + |z|^2 u^2 + |z|^2 u^4 + |z|^10 + |z|^6 u^2."""
    t = [
        (1.0, 0, 0, 0, 1),                   # v
        (0.5, 3, 3, 0, 0),                   # P6: |z|^6 / 2
        (-0.05, 1, 5, 0, 0),                 #     2 Re(-zbar^5 z / 20)
        (-0.05, 5, 1, 0, 0),
        (0.25j, 2, 4, 0, 0),                 #     2 Re(i zbar^4 z^2 / 4)
        (-0.25j, 4, 2, 0, 0),
        (1.0, 2, 2, 1, 0),                   # 2u Q4: u |z|^4
        (-1j / 3, 3, 1, 1, 0),               #        -(i/3) u z^3 zbar
        (1j / 3, 1, 3, 1, 0),                #        +(i/3) u zbar^3 z
        (1.0, 1, 1, 2, 0),                   # |z|^2 u^2
        (1.0, 1, 1, 4, 0),                   # |z|^2 u^4
        (1.0, 5, 5, 0, 0),                   # |z|^10
        (1.0, 3, 3, 2, 0),                   # |z|^6 u^2
    ]
    return Poly(t)


def _shell_points(n, r_lo, r_hi, seed):
    """Points (z, u) with log-uniform norm in [r_lo, r_hi]; w = u - i R so rho_H = 0."""
    rng = np.random.default_rng(seed)
    d = rng.normal(size=(n, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = np.exp(rng.uniform(np.log(r_lo), np.log(r_hi), size=n))
    x = d * r[:, None]
    return x[:, 0] + 1j * x[:, 1], x[:, 2]


def boundary_point(P: Poly, z, u):
    """The point of {rho_H = 0} above (z, u): v = -R(z, u) (R does not involve v)."""
    z = np.asarray(z, complex)
    u = np.asarray(u, float)
    R = P(z, u + 0j)
    return z, u - 1j * R


def behrens_tau_scan(rho: DefiningFunction = None, n: int = 1000, r_min: float = 1e-4,
                     taus=None, seed: int = 0) -> dict:
    """Largest tau in a geometric grid such that the Levi form is > 0 at n sampled
    boundary points with r_min <= |(z, u)| <= tau.

    Each candidate shell gets its own n samples; tau_hat is the last grid value
    before the first shell containing a non-positive Levi value.
    """
    P = behrens_poly()
    if rho is None:
        rho = make_behrens(scan=False).rho
    taus = np.geomspace(1e-3, 2.0, 34) if taus is None else np.asarray(taus, float)
    tau_hat = None
    rows = []
    for j, tau in enumerate(taus):
        z, u = _shell_points(n, r_min, tau, seed + j)
        zz, ww = boundary_point(P, z, u)
        lev, _ = levi_values(rho, zz, ww)
        mn = float(lev.min())
        rows.append({"tau": float(tau), "levi_min": mn, "n": n})
        if mn > 0:
            tau_hat = float(tau)
        else:
            break
    return {"tau_hat": tau_hat, "r_min": r_min, "grid": [float(t) for t in taus],
            "resolution": float(taus[1] / taus[0]) if len(taus) > 1 else None, "shells": rows}


def make_behrens(scan: bool = True, n_scan: int = 1000, seed: int = 0) -> CatalogEntry:
    """Hypersurface entry {rho_H < 0} restricted to a box around the origin."""
    P = behrens_poly()
    f = ScalarField(P, name="behrens", exact_jet=P.jet)
    m = 2.0
    rho = DefiningFunction(f, ((-m,) * 4, (m,) * 4), name="behrens", center=(0j, -0.5j))
    extras = {"poly": P}
    facts = [
        KnownFact("rho_at_origin", 0.0, 0.0, lambda: float(P(np.array(0j), np.array(0j)))),
        KnownFact("levi_at_origin", 0.0, 1e-15, lambda: float(levi_values(rho, np.array([0j]), np.array([0j]))[1][0])),
    ]
    entry = CatalogEntry("behrens", rho, {}, facts, provenance="internal",
                         description="Behrens hypersurface v + R(z, w); only the origin is non-strongly pseudoconvex near 0",
                         extras=extras)
    if scan:
        sc = behrens_tau_scan(rho, n=n_scan, seed=seed)
        extras["tau_scan"] = sc
        tau = sc["tau_hat"]

        def levi_min_in_ball():
            z, u = _shell_points(n_scan, 1e-4, tau, seed + 10_000)
            zz, ww = boundary_point(P, z, u)
            return float(levi_values(rho, zz, ww)[0].min() > 0)

        facts.append(KnownFact("levi_positive_in_punctured_ball", 1.0, 0.0, levi_min_in_ball, source="scan"))
    return entry
