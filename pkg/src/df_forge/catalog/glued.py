"""The glued domain {K chi1(T) + chi2(-(-rho_H)^eta) < 0}: an exponentially flat
piece soldered to the Behrens hypersurface near the origin.

Concrete cutoffs:

* chi1(t) = c G((t - (1 - eps0)) / eps0) with G the second antiderivative of
  exp(-1/s); chi1 vanishes for t <= 1 - eps0, is strictly convex after, and c
  is fixed by chi1(1) = 1 (so the fixed point t0 is found by bisection at 1).
* chi2'(t) = S(x) + kappa B(x), x = (t + d) / (d / 2), d = delta^eta, with S a
  symmetric smooth step and B a bump; kappa makes the transition integral
  equal d / 2 so chi2 = -d below -d and chi2(t) = t above -d / 2.  chi2 is
  integrated with Gauss-Legendre.

The global formula is not differentiable on the Behrens part of
the boundary ((-rho_H)^eta there).  Differentiation therefore goes through two
smooth local representatives of the same zero set:

* near H (rho_H > -2^(-1/eta) delta / 2): rho_H + (K chi1(T))^(1/eta);
* elsewhere: the global formula, smooth where rho_H < 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..cdiff import Jet2, ScalarField, jet_apply, jet_linear
from ..domain import DefiningFunction, real_gradient, gradient, boundary_sample, levi_values, sample_resolution
from ..errors import ParamError, PlacementError
from ..profiles import G, G1, G2, bump, flat_exp, smoothstep
from .base import CatalogEntry, KnownFact
from .behrens import behrens_poly, behrens_tau_scan
from .exp_flat import exp_flat_jet, flat_term, north_height

__all__ = ["Chi1", "Chi2", "GluedParams", "GluedFunctions", "DEFAULT_PLACEMENT", "default_v0", "make_glued", "placement_check", "placement_search", "classify_boundary", "cap_sample",
           "glue_verify"]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)


class Chi1:
    """chi1(t) = c G((t - t_lo) / eps0), t_lo = 1 - eps0."""

    def __init__(self, eps0: float):
        self.eps0 = eps0
        self.t_lo = 1.0 - eps0
        self.c = 1.0 / float(G(np.array(1.0)))

    def _s(self, t):
        return (np.asarray(t, float) - self.t_lo) / self.eps0

    def __call__(self, t):
        return self.c * G(self._s(t))

    def d1(self, t):
        return self.c / self.eps0 * G1(self._s(t))

    def d2(self, t):
        return self.c / self.eps0 ** 2 * G2(self._s(t))

    def fixed_point(self) -> float:
        return brentq(lambda t: float(self(t)) - t, self.t_lo + 1e-12 * self.eps0, 1.0 + self.eps0, xtol=1e-15)

    def inverse(self, y: float) -> float:
        return brentq(lambda t: float(self(t)) - y, self.t_lo, 1.0 + self.eps0, xtol=1e-15)


def _S_prime(x):
    x = np.asarray(x, float)
    a, b = flat_exp(x), flat_exp(1.0 - x)
    out = np.zeros_like(x)
    m = (x > 0) & (x < 1)
    xm = x[m]
    out[m] = a[m] * b[m] * (1 / xm ** 2 + 1 / (1 - xm) ** 2) / (a[m] + b[m]) ** 2
    return out


def _B_prime(x):
    x = np.asarray(x, float)
    y = 2 * x - 1
    out = np.zeros_like(x)
    m = np.abs(y) < 1
    ym = y[m]
    out[m] = bump(x[m]) * (-4 * ym / (1 - ym ** 2) ** 2)
    return out


class Chi2:
    """Smooth increasing chi2 with chi2 = -d for t <= -d and chi2(t) = t for t >= -d/2."""

    def __init__(self, d: float):
        self.d = d
        self.kappa = 0.5 / float(np.sum(_GL_W * bump(0.5 * (_GL_X + 1))) * 0.5)

    def _x(self, t):
        return (np.asarray(t, float) + self.d) / (0.5 * self.d)

    def _dens(self, x):
        return smoothstep(x) + self.kappa * bump(x)

    def __call__(self, t):
        t = np.asarray(t, float)
        x = np.clip(self._x(t), 0.0, 1.0)
        nodes = 0.5 * (_GL_X + 1)[None, :] * x.reshape(-1, 1)
        integ = (0.5 * x.reshape(-1) * np.sum(_GL_W[None, :] * self._dens(nodes), axis=1)).reshape(t.shape)
        mid = -self.d + 0.5 * self.d * integ
        return np.where(t <= -self.d, -self.d, np.where(t >= -0.5 * self.d, t, mid))

    def d1(self, t):
        t = np.asarray(t, float)
        x = self._x(t)
        return np.where(t <= -self.d, 0.0, np.where(t >= -0.5 * self.d, 1.0, self._dens(np.clip(x, 0, 1))))

    def d2(self, t):
        t = np.asarray(t, float)
        x = np.clip(self._x(t), 0, 1)
        inner = (t > -self.d) & (t < -0.5 * self.d)
        return np.where(inner, (_S_prime(x) + self.kappa * _B_prime(x)) / (0.5 * self.d), 0.0)


@dataclass(frozen=True)
class GluedParams:
    K: float = 3.0
    eta: float = 0.5
    delta: float = 0.01
    a: float = 4.0
    z0: complex = 0j
    v0: float = -1.18
    eps0: float = 0.05

    def as_dict(self):
        return {"K": self.K, "eta": self.eta, "delta": self.delta, "a": self.a,
                "z0": [self.z0.real, self.z0.imag], "v0": self.v0, "eps0": self.eps0}


def _T(P: GluedParams, z, w):
    zp = np.asarray(z, complex) - P.z0
    return P.a * (zp.real ** 2 + zp.imag ** 2) + flat_term(np.asarray(w, complex) - 1j * P.v0)[0]


def _odd_power(x, eta):
    return np.sign(x) * np.abs(x) ** eta


class GluedFunctions:
    """Global value, the two smooth charts and the chart selector."""

    def __init__(self, P: GluedParams):
        self.P = P
        self.H = behrens_poly()
        self.chi1 = Chi1(P.eps0)
        self.chi2 = Chi2(P.delta ** P.eta)
        self.r_valid = 2.0 ** (-1.0 / P.eta) * P.delta      # chi2(s) = s for -rho_H < r_valid
        self.r_switch = 0.5 * self.r_valid

    def T(self, z, w):
        return _T(self.P, z, w)

    def global_value(self, z, w):
        P = self.P
        s = -_odd_power(-self.H(z, w), P.eta)
        return P.K * self.chi1(self.T(z, w)) + self.chi2(s)

    def near_value(self, z, w):
        q = self.P.K * self.chi1(self.T(z, w))
        return self.H(z, w) + q ** (1.0 / self.P.eta)

    def chart_index(self, z, w):
        return np.where(self.H(z, w) > -self.r_switch, 0, 1)

    def value(self, z, w):
        z, w = np.broadcast_arrays(np.asarray(z, complex), np.asarray(w, complex))
        idx = self.chart_index(z, w)
        return np.where(idx == 0, self.near_value(z, w), self.global_value(z, w))

    def _JT(self, z, w):
        P = self.P
        return exp_flat_jet(z, w, P.a, 0.0, P.z0, P.v0)

    def global_jet(self, z, w) -> Jet2:
        P = self.P
        JT = self._JT(z, w)
        t = np.asarray(JT.val)
        J1 = jet_apply(JT, P.K * self.chi1(t), P.K * self.chi1.d1(t), P.K * self.chi1.d2(t))
        JH = self.H.jet(z, w)
        r = -np.asarray(JH.val)
        with np.errstate(divide="ignore", invalid="ignore"):
            s0 = -r ** P.eta
            s1 = P.eta * r ** (P.eta - 1)
            s2 = -P.eta * (P.eta - 1) * r ** (P.eta - 2)
        Js = jet_apply(JH, s0, s1, s2)
        s = np.asarray(Js.val)
        J2 = jet_apply(Js, self.chi2(s), self.chi2.d1(s), self.chi2.d2(s))
        return jet_linear((1.0, J1), (1.0, J2))

    def near_jet(self, z, w) -> Jet2:
        P = self.P
        p = 1.0 / P.eta
        JT = self._JT(z, w)
        t = np.asarray(JT.val)
        q = P.K * self.chi1(t)
        q1 = P.K * self.chi1.d1(t)
        q2 = P.K * self.chi1.d2(t)
        live = q > 1e-250
        qs = np.where(live, q, 1.0)
        f0 = np.where(live, qs ** p, 0.0)
        f1 = np.where(live, p * qs ** (p - 1) * q1, 0.0)
        f2 = np.where(live, p * (p - 1) * qs ** (p - 2) * q1 ** 2 + p * qs ** (p - 1) * q2, 0.0)
        return jet_linear((1.0, self.H.jet(z, w)), (1.0, jet_apply(JT, f0, f1, f2)))


# -- placement -----------------------------------------------------------------------------

def _sheet_intersection(P: GluedParams, Hpoly, b: float, n_dirs: int = 400):
    """Points of H on the upper sheet of {T = b}, one per ray direction in (x, y, u).

    Returns real points (m, 4) (empty when the sheet's top lies below H).
    """
    h = north_height(b)
    k = np.arange(n_dirs) + 0.5
    phi = np.arccos(1 - 2 * k / n_dirs)
    th = np.pi * (1 + 5 ** 0.5) * k
    d = np.stack([np.sin(phi) * np.cos(th), np.sin(phi) * np.sin(th), np.cos(phi)], axis=-1)
    sx = 1.0 / math.sqrt(P.a)

    def sheet(r):
        x = d * r[:, None]
        z = P.z0 + sx * (x[:, 0] + 1j * x[:, 1])
        u = x[:, 2]
        beta = b - P.a * np.abs(z - P.z0) ** 2
        hh = np.where(beta > 0, 1.0 / np.sqrt(np.log(2.0) - np.log(np.maximum(beta, 1e-300))), 0.0)
        inside = (beta > 0) & (np.abs(u) < hh)
        v = P.v0 + np.sqrt(np.maximum(hh ** 2 - u ** 2, 0.0))
        w = u + 1j * v
        return z, w, inside

    # r_max: where the sheet ends along each ray
    lo = np.zeros(n_dirs)
    hi = np.full(n_dirs, 2.0 * max(h, math.sqrt(b)))
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        _, _, ins = sheet(mid)
        lo = np.where(ins, mid, lo)
        hi = np.where(ins, hi, mid)
    rmax = lo
    z0s, w0s, _ = sheet(np.zeros(n_dirs))
    if Hpoly(z0s[:1], w0s[:1])[0] <= 0:
        return np.zeros((0, 4)), np.zeros((0, 4))
    z1, w1, _ = sheet(rmax)
    f1 = Hpoly(z1, w1)
    ok = f1 < 0
    lo = np.zeros(n_dirs)
    hi = rmax.copy()
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        zz, ww, _ = sheet(mid)
        pos = Hpoly(zz, ww) > 0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    zz, ww, _ = sheet(0.5 * (lo + hi))
    zz, ww = zz[ok], ww[ok]
    pts = np.stack([zz.real, zz.imag, ww.real, ww.imag], axis=-1)
    # transversality: angle between the real gradients of T and rho_H
    JT = exp_flat_jet(zz, ww, P.a, b, P.z0, P.v0)
    JH = Hpoly.jet(zz, ww)
    gT = real_gradient(np.stack([JT.dz, JT.dw], axis=-1))
    gH = real_gradient(np.stack([JH.dz, JH.dw], axis=-1))
    gT /= np.linalg.norm(gT, axis=-1, keepdims=True)
    gH /= np.linalg.norm(gH, axis=-1, keepdims=True)
    c = np.sum(gT * gH, axis=-1)
    sin = np.sqrt(np.maximum(1 - c ** 2, 0.0))
    return pts, sin


def _sample_exp_domain(P: GluedParams, b: float, n: int, seed: int):
    """Uniform points of {T < b} by rejection from its bounding box."""
    h = north_height(b)
    R = math.sqrt(b / P.a)
    rng = np.random.default_rng(seed)
    out_z, out_w, total = [], [], 0
    while total < n:
        x = rng.uniform(-1, 1, size=(4 * n, 4)) * np.array([R, R, h, h])
        z = P.z0 + x[:, 0] + 1j * x[:, 1]
        w = x[:, 2] + 1j * (P.v0 + x[:, 3])
        keep = _T(P, z, w) < b
        out_z.append(z[keep])
        out_w.append(w[keep])
        total += int(keep.sum())
    return np.concatenate(out_z)[:n], np.concatenate(out_w)[:n]


def placement_check(P: GluedParams, tau_hat: float, n_dirs: int = 400, n_minus: int = 20000, seed: int = 0,
                    transv_floor: float = 1e-3, n_b: int = 9) -> dict:
    """Numerical checks of the placement constraints.

    * ``origin_in_B1``: T(origin) < 1 - eps0 (the Behrens point lies on the H part);
    * ``level1_meets_H`` / ``level1_transversal``: the level T = 1 crosses H with
      the angle between normals bounded below;
    * ``intersections_in_ball``: H meets {T = b} inside B(0, tau_hat) for b on a
      grid of [1 - eps0, 1 + eps0];
    * ``minus_part_below``: every sampled point of {T < 1 + eps0} outside the
      ball B(N, eps_cap) around its north pole has rho_H < -delta, where eps_cap
      is 0.45 times the distance from N to the flat circle;
    * ``b_star``: the B2 level chi1^{-1}(delta^eta / K) lies in (1 - eps0, t0) and below 2.
    """
    Hp = behrens_poly()
    chi1 = Chi1(P.eps0)
    out = {"params": P.as_dict(), "tau_hat": tau_hat}
    T0 = float(_T(P, np.array(0j), np.array(0j)))
    out["T_at_origin"] = T0
    out["origin_in_B1"] = bool(T0 < 1 - P.eps0)
    pts, sin = _sheet_intersection(P, Hp, 1.0, n_dirs)
    out["level1_meets_H"] = bool(len(pts) > 0)
    out["level1_min_sin_angle"] = float(sin.min()) if len(pts) else None
    out["level1_transversal"] = bool(len(pts) > 0 and sin.min() > transv_floor)
    radii = []
    for b in np.linspace(1 - P.eps0, 1 + P.eps0, n_b):
        pb, _ = _sheet_intersection(P, Hp, float(b), n_dirs)
        radii.append(float(np.linalg.norm(pb, axis=-1).max()) if len(pb) else 0.0)
    out["intersection_radii"] = radii
    out["intersections_in_ball"] = bool(max(radii) < tau_hat)
    bb = 1 + P.eps0
    hN = north_height(bb)
    N = (P.z0, 1j * (P.v0 + hN))
    eps_cap = 0.45 * math.sqrt(bb / P.a + hN ** 2)
    z, w = _sample_exp_domain(P, bb, n_minus, seed)
    far = np.sqrt(np.abs(z - N[0]) ** 2 + np.abs(w - N[1]) ** 2) > eps_cap
    mx = float(Hp(z[far], w[far]).max()) if far.any() else -np.inf
    out["eps_cap"] = eps_cap
    out["minus_part_max_rho_H"] = mx
    out["minus_part_below"] = bool(mx < -P.delta)
    t0 = chi1.fixed_point()
    d = P.delta ** P.eta
    b_star = chi1.inverse(d / P.K)
    out["t0"] = t0
    out["b_star"] = b_star
    out["b_star_ok"] = bool(1 - P.eps0 < b_star < t0 and b_star < 2)
    out["K_gap"] = P.K * t0 - d
    out["K_ok"] = bool(P.K > 2 and P.K * t0 - d > 0)
    keys = ["origin_in_B1", "level1_meets_H", "level1_transversal", "intersections_in_ball", "minus_part_below",
            "b_star_ok", "K_ok"]
    out["pass"] = all(out[k] for k in keys)
    out["failed"] = [k for k in keys if not out[k]]
    return out


def placement_search(K: float = 3.0, eta: float = 0.5, delta: float = 0.01, tau_hat: float = None,
                     eps0_grid=(0.25, 0.2, 0.15, 0.1, 0.05, 0.02, 0.01), a_grid=(4.0, 16.0, 1.0, 64.0),
                     m_fracs=(0.5, 0.25, 0.75), **kw) -> dict:
    """First (eps0, a, v0) on the grids that passes ``placement_check``.

    z0 = 0.  v0 = -(h(1 - eps0) - m) puts the north pole of {T = 1 - eps0} at
    height m > 0 above the origin, so the origin is in the B1 part and every
    level in [1 - eps0, 1 + eps0] crosses H; m is a fraction of
    h(1) - h(1 - eps0).  Raises PlacementError when nothing passes.
    """
    if tau_hat is None:
        tau_hat = behrens_tau_scan()["tau_hat"]
    log = []
    h1 = north_height(1.0)
    for eps0 in eps0_grid:
        h_lo = north_height(1 - eps0)
        gap = h1 - h_lo
        for a in a_grid:
            for mf in m_fracs:
                P = GluedParams(K=K, eta=eta, delta=delta, a=a, z0=0j, v0=-(h_lo - mf * gap), eps0=eps0)
                chk = placement_check(P, tau_hat, **kw)
                log.append({"eps0": eps0, "a": a, "m_frac": mf, "v0": P.v0, "pass": chk["pass"],
                            "failed": chk["failed"]})
                if chk["pass"]:
                    return {"params": P, "check": chk, "log": log}
    raise PlacementError(f"no placement passed on the search grid ({len(log)} candidates)")


# -- entry ------------------------------------------------------------------------------

def classify_boundary(F: GluedFunctions, z, w) -> dict:
    """Membership of boundary points in B1, B2, B3 by their defining inequalities."""
    P = F.P
    T = F.T(z, w)
    rH = F.H(z, w)
    B1 = T < 1 - P.eps0
    B2 = rH < -P.delta
    B3 = (T >= 1 - P.eps0) & (rH > -P.delta)
    count = B1.astype(int) + B2.astype(int) + B3.astype(int)
    return {"B1": B1, "B2": B2, "B3": B3, "count": count,
            "n": {"B1": int(B1.sum()), "B2": int(B2.sum()), "B3": int(B3.sum()),
                  "none": int((count == 0).sum()), "multiple": int((count > 1).sum())},
            "exact_partition": bool(np.all(count == 1))}


# Result of placement_search() with K = 3, eta = 0.5, delta = 0.01: the first
# passing grid point is eps0 = 0.05, a = 4, m_frac = 0.5.
DEFAULT_PLACEMENT = {"eps0": 0.05, "a": 4.0, "m_frac": 0.5}


def default_v0(eps0: float, m_frac: float = 0.5) -> float:
    h_lo = north_height(1 - eps0)
    return -(h_lo - m_frac * (north_height(1.0) - h_lo))


def make_glued(K: float = 3.0, eta: float = 0.5, delta: float = 0.01, a: float = None, z0: complex = 0j,
               v0: float = None, eps0: float = None, tau_hat: float = None, check: bool = True,
               search: bool = False) -> CatalogEntry:
    """Glued domain entry.

    Missing placement parameters come from DEFAULT_PLACEMENT, or from a fresh
    ``placement_search`` when ``search`` is set.
    """
    if not K > 2:
        raise ParamError("K must exceed 2")
    if not 0 < eta < 1:
        raise ParamError("eta must lie in (0, 1)")
    if not 0 < delta < 1:
        raise ParamError("delta must lie in (0, 1)")
    if tau_hat is None:
        tau_hat = behrens_tau_scan()["tau_hat"]
    if not search:
        eps0 = DEFAULT_PLACEMENT["eps0"] if eps0 is None else eps0
        a = DEFAULT_PLACEMENT["a"] if a is None else a
        v0 = default_v0(eps0, DEFAULT_PLACEMENT["m_frac"]) if v0 is None else v0
    search = None
    if a is None or v0 is None or eps0 is None:
        search = placement_search(K, eta, delta, tau_hat)
        P = search["params"]
        chk = search["check"]
    else:
        if not (0 < eps0 < 0.5 and a > 0):
            raise ParamError("need 0 < eps0 < 1/2 and a > 0")
        P = GluedParams(K, eta, delta, a, complex(z0), v0, eps0)
        chk = placement_check(P, tau_hat) if check else None
        if chk is not None and not chk["pass"]:
            raise PlacementError(f"placement constraints fail: {chk['failed']}")
    F = GluedFunctions(P)
    b_star = F.chi1.inverse(P.delta ** P.eta / P.K)
    hb = north_height(b_star)
    Rb = math.sqrt(b_star / P.a)
    m = 1.05
    lo = (P.z0.real - m * Rb, P.z0.imag - m * Rb, -m * hb, P.v0 - m * hb)
    hi = (P.z0.real + m * Rb, P.z0.imag + m * Rb, m * hb, P.v0 + m * hb)
    near = ScalarField(F.near_value, "glued[near H]", exact_jet=F.near_jet)
    glob = ScalarField(F.global_value, "glued[global form]", exact_jet=F.global_jet)
    label = f"glued:K={P.K:g},eta={P.eta:g},delta={P.delta:g},a={P.a:g},v0={P.v0:.6g},eps0={P.eps0:g}"
    fld = ScalarField(F.value, label, charts=[near, glob], chart_index=F.chart_index)
    rho = DefiningFunction(fld, (lo, hi), name=label, center=(P.z0, 1j * P.v0), params=P.as_dict())

    def circle_ref(n):
        t = 2 * np.pi * np.arange(n) / n
        zz = P.z0 + Rb * np.exp(1j * t)
        return np.stack([zz.real, zz.imag, 0 * t, P.v0 + 0 * t], axis=-1)

    facts = [
        KnownFact("chi1_fixed_point", 1.0, 1e-12, F.chi1.fixed_point),
        KnownFact("chi2_identity_at_half", -0.5 * P.delta ** P.eta, 1e-12,
                  lambda: float(F.chi2(np.array(-0.5 * P.delta ** P.eta)))),
        KnownFact("chi2_constant_below", -P.delta ** P.eta, 0.0,
                  lambda: float(F.chi2(np.array(-1.5 * P.delta ** P.eta)))),
        KnownFact("origin_on_boundary", 0.0, 1e-15, lambda: float(F.value(np.array(0j), np.array(0j)))),
    ]
    if chk is not None:
        facts.append(KnownFact("placement", 1.0, 0.0, lambda: float(chk["pass"]), source="sampling"))
    extras = {"functions": F, "placement": chk, "search_log": search["log"] if search else None,
              "b_star": b_star, "flat_radius": Rb, "tau_hat": tau_hat, "glued_params": P}
    return CatalogEntry(label, rho, P.as_dict(), facts, flat_reference=circle_ref,
                        description="exponentially flat piece soldered to the Behrens hypersurface",
                        extras=extras)


def cap_sample(F: GluedFunctions, b_star: float, n: int, seed: int = 0):
    """Boundary points over the part of the boundary near H, by vertical bisection.

    (z, u) is drawn uniformly from the box around the cap and kept when the
    point of H above it lies in {T < b_star}; the boundary point on that
    vertical line is bracketed between H and 0.5 below it.
    """
    P = F.P
    R = math.sqrt(b_star / P.a)
    hb = north_height(b_star)
    rng = np.random.default_rng(seed)
    zs, us = [], []
    got = 0
    while got < n:
        x = rng.uniform(-1, 1, size=(8 * n, 3)) * np.array([R, R, hb])
        z = P.z0 + x[:, 0] + 1j * x[:, 1]
        u = x[:, 2]
        vH = -F.H(z, u + 0j)
        keep = F.T(z, u + 1j * vH) < b_star
        zs.append(z[keep])
        us.append(u[keep])
        got += int(keep.sum())
    z = np.concatenate(zs)[:n]
    u = np.concatenate(us)[:n]
    hi = -F.H(z, u + 0j)
    lo = hi - 0.5
    on_H = F.value(z, u + 1j * hi) <= 0
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        neg = F.value(z, u + 1j * mid) < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    v = np.where(on_H, -F.H(z, u + 0j), hi)
    return z, u + 1j * v


def glue_verify(entry: CatalogEntry, n_boundary: int = 10000, n_scan: int = 100000, n_cap: int = 20000,
                seed: int = 0, flat_tol: float = 1e-8, threads=None) -> dict:
    """Placement, gradient floor, B1/B2/B3 partition and the Levi-flat locus.

    Rays from the centre rarely reach the small part of the boundary near H,
    so the boundary sample and the flat-locus check are complemented by
    ``n_cap`` points placed there directly (``cap_sample``).
    """
    from ..domain import levi_flat_scan

    F: GluedFunctions = entry.extras["functions"]
    P = F.P
    rho = entry.rho
    bz, bw = boundary_sample(rho, n_boundary, seed, threads=threads)
    cz, cw = cap_sample(F, entry.extras["b_star"], n_cap, seed)
    bz = np.concatenate([bz, cz])
    bw = np.concatenate([bw, cw])
    _, g = gradient(rho.field, bz, bw)
    gn = np.linalg.norm(real_gradient(g), axis=-1)
    part = classify_boundary(F, bz, bw)
    lev, _ = levi_values(rho, bz, bw)
    scan = levi_flat_scan(rho, n_scan, flat_tol=flat_tol, seed=seed, reference=entry.flat_reference,
                          threads=threads)
    res = scan.resolution
    origin_radius = 10.0 * res
    comps = []
    confined = True
    for c in scan.components:
        pts = np.asarray(c["points"]) if c.get("points") is not None else None
        ctr = np.asarray(c["centroid"])
        d_origin = float(np.linalg.norm(ctr))
        extent_origin = float(np.linalg.norm(pts, axis=-1).max()) if pts is not None and len(pts) else d_origin
        near_origin = extent_origin <= origin_radius
        on_circle = (c["classification"] == "curve-like" and c.get("hausdorff_to_reference") is not None
                     and c["hausdorff_to_reference"] <= 1e-3)
        kind = "origin" if near_origin else ("B2-circle" if on_circle else "unexpected")
        confined &= kind != "unexpected"
        comps.append({"kind": kind, "classification": c["classification"], "size": c["size"],
                      "centroid": c["centroid"], "max_distance_to_origin": extent_origin,
                      "hausdorff_to_reference": c.get("hausdorff_to_reference")})
    has_circle = any(c["kind"] == "B2-circle" for c in comps)
    # cap points: flat ones must sit within the origin radius of the cap sample's resolution
    xc = np.stack([cz.real, cz.imag, cw.real, cw.imag], axis=-1)
    cap_res = sample_resolution(xc)
    lev_cap = lev[-len(cz):]
    flag = np.abs(lev_cap) < flat_tol
    cap_far = float(np.linalg.norm(xc[flag], axis=-1).max()) if flag.any() else 0.0
    cap = {"n": int(len(cz)), "resolution": cap_res, "n_flagged": int(flag.sum()),
           "flagged_max_distance_to_origin": cap_far, "origin_radius": 10.0 * cap_res,
           "levi_min": float(lev_cap.min()), "confined": bool(cap_far <= 10.0 * cap_res)}
    confined &= cap["confined"]
    out = {
        "domain": entry.name,
        "placement": entry.extras["placement"],
        "n_boundary": int(len(bz)),
        "min_grad_norm": float(gn.min()),
        "grad_ok": bool(gn.min() > 0),
        "partition": part["n"],
        "partition_exact": part["exact_partition"],
        "levi_min_boundary": float(lev.min()),
        "levi_min_by_part": {k: (float(lev[part[k]].min()) if part[k].any() else None) for k in ("B1", "B2", "B3")},
        "scan_resolution": res,
        "origin_radius": origin_radius,
        "flat_components": comps,
        "cap_scan": cap,
        "flat_locus_confined": bool(confined and has_circle),
    }
    pl = entry.extras["placement"]
    out["pass"] = bool((pl is None or pl["pass"]) and out["grad_ok"] and out["partition_exact"]
                       and out["flat_locus_confined"])
    return out
