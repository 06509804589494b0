"""The exponentially flat family a|z - z0|^2 + 2 exp(-1/|w - i v0|^2) < b."""
from __future__ import annotations

import math

import numpy as np

from ..cdiff import Jet2, ScalarField
from ..domain import DefiningFunction, levi_form, curve_from_function
from ..errors import ParamError
from .base import CatalogEntry, KnownFact

_S_MAX = 700.0  # exp(-700) ~ 1e-304; beyond that every term is 0 in double precision


def flat_term(wp):
    """Value and w-derivatives (f, f_w, f_wwbar, f_ww) of f = 2 exp(-1/|w|^2).

    All of them vanish to infinite order at w = 0, where they are set to 0.
    """
    wp = np.asarray(wp, dtype=complex)
    r2 = wp.real ** 2 + wp.imag ** 2
    live = r2 > 1.0 / _S_MAX
    safe_w = np.where(live, wp, 1.0)
    s = np.where(live, 1.0 / np.where(live, r2, 1.0), 0.0)
    e = np.where(live, 2.0 * np.exp(-s), 0.0)
    wi = 1.0 / safe_w
    wbi = np.conj(wi)
    f = e
    fw = e * wi ** 2 * wbi
    fwwb = e * (s ** 3 - s ** 2)
    fww = e * (wi ** 4 * wbi ** 2 - 2.0 * wi ** 3 * wbi)
    zero = np.zeros_like(r2)
    return (np.where(live, f, zero), np.where(live, fw, 0j), np.where(live, fwwb, 0j), np.where(live, fww, 0j))


def exp_flat_jet(z, w, a, b, z0, v0) -> Jet2:
    z = np.asarray(z, complex)
    w = np.asarray(w, complex)
    zp = z - z0
    f, fw, fwwb, fww = flat_term(w - 1j * v0)
    zero = np.zeros(np.broadcast(z, w).shape, complex)
    return Jet2(
        val=(a * (zp.real ** 2 + zp.imag ** 2) + f - b) + zero.real,
        dz=a * np.conj(zp) + zero,
        dw=fw + zero,
        dzzb=a + zero,
        dzwb=zero,
        dwzb=zero.copy(),
        dwwb=fwwb + zero,
        dzz=zero.copy(),
        dzw=zero.copy(),
        dww=fww + zero,
    )


def north_height(b: float) -> float:
    """Largest |w - i v0| on the closed domain: 2 exp(-1/h^2) = b."""
    return 1.0 / math.sqrt(math.log(2.0) - math.log(b))


def make_exp_flat(a: float = 1.0, b: float = 1.0, z0: complex = 0j, v0: float = 0.0, name=None) -> CatalogEntry:
    """Catalog entry for a|z - z0|^2 + 2 exp(-1/|w - i v0|^2) < b.

    ``v0`` shifts the imaginary part of w, so the flat circle is
    {|z - z0| = sqrt(b/a), w = i v0}.
    """
    if not a > 0:
        raise ParamError(f"a must be positive, got {a}")
    if not 0 < b < 2:
        raise ParamError(f"b must lie in (0, 2), got {b}")
    z0 = complex(z0)
    v0 = float(v0)
    R = math.sqrt(b / a)
    h = north_height(b)
    m = 1.05
    lo = (z0.real - m * R, z0.imag - m * R, -m * h, v0 - m * h)
    hi = (z0.real + m * R, z0.imag + m * R, m * h, v0 + m * h)

    def fn(z, w):
        zp = z - z0
        return a * (zp.real ** 2 + zp.imag ** 2) + flat_term(w - 1j * v0)[0] - b

    label = name or f"exp_flat:a={a:g},b={b:g},z0={z0.real:g}{z0.imag:+g}j,v0={v0:g}"
    field = ScalarField(fn, name=label, exact_jet=lambda z, w: exp_flat_jet(z, w, a, b, z0, v0))
    rho = DefiningFunction(field, (lo, hi), name=label, center=(z0, 1j * v0),
                           params={"a": a, "b": b, "z0": [z0.real, z0.imag], "v0": v0})

    def circle(t):
        return z0 + R * np.exp(1j * t), 1j * v0 + 0 * t

    def reference(n):
        t = 2 * np.pi * np.arange(n) / n
        zz, ww = circle(t)
        return np.stack([zz.real, zz.imag, ww.real, ww.imag], axis=-1)

    north = (z0, 1j * (v0 + h))
    tstar = math.log(b / 2.0)
    facts = [
        KnownFact("flat_circle_radius", R, 1e-12, lambda: abs(circle(np.array([0.3]))[0][0] - z0)),
        KnownFact("levi_on_flat_circle", 0.0, 1e-12,
                  lambda: max(abs(levi_form(rho, (complex(zz), complex(ww))))
                              for zz, ww in zip(*circle(np.linspace(0, 2 * np.pi, 16, endpoint=False))))),
        KnownFact("rho_at_north_pole", 0.0, 1e-12, lambda: float(fn(np.array(north[0]), np.array(north[1])))),
        KnownFact("north_pole_v", v0 + h, 1e-12, lambda: north[1].imag),
        KnownFact("root_check_min", b * math.log(2.0 / b), 1e-9, lambda: no_extra_flat_root_check(b)["min_value"]),
        KnownFact("root_check_argmin", tstar, 1e-9, lambda: no_extra_flat_root_check(b)["t_star"]),
    ]
    return CatalogEntry(
        name=label,
        defining_function=rho,
        parameters={"a": a, "b": b, "z0": z0, "v0": v0},
        known_facts=facts,
        curves={"gamma": lambda n: curve_from_function(circle, n, closed=True, name="gamma")},
        flat_reference=reference,
        description="exponentially flat domain; Levi-flat exactly on the circle |z - z0| = sqrt(b/a), w = i v0",
        extras={"north_pole": north, "flat_radius": R},
    )


def _g(t, b):
    return -b * t - b + 2.0 * np.exp(t)


def no_extra_flat_root_check(b: float = 1.0, t_min: float = -50.0, n_grid: int = 200001) -> dict:
    """Positivity of g(t) = -b t - b + 2 e^t on [t_min, 0).

    On the boundary the Levi form equals 2 a e^{-s} s^2 g(-s) with
    s = 1/|w - i v0|^2, so g > 0 for t < 0 means the only flat points are
    at w = i v0.  For b = 1 this is g(t) = -t - 1 + 2 e^t.  The minimum is
    at t* = ln(b/2) with value b ln(2/b); a dense grid confirms it.
    """
    tstar = math.log(b / 2.0)
    gmin = float(_g(tstar, b))
    t = np.linspace(t_min, 0.0, n_grid, endpoint=False)
    gv = _g(t, b)
    k = int(np.argmin(gv))
    return {
        "b": b,
        "t_star": tstar,
        "min_value": gmin,
        "closed_form_min": b * math.log(2.0 / b),
        "grid_min": float(gv[k]),
        "grid_argmin": float(t[k]),
        "grid_spacing": float(t[1] - t[0]),
        "g_at_t_min": float(_g(t_min, b)),
        "g_limit_at_0": float(_g(0.0, b)),
        "positive": bool(gmin > 0 and gv.min() > 0),
    }
