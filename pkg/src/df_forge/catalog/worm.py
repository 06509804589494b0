"""The worm domain |z + exp(i log|w|^2)|^2 < 1 - phi(log|w|^2).

The formula is the classical one from the literature (it is cited, not
reprinted, by the geometric construction this package implements); the
entry is marked with external provenance.  phi vanishes on [-a, a] with
a = beta - pi/2 and grows like K_w G(|t| - a) outside, G the flat convex
profile of ``df_forge.profiles``.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from ..cdiff import Jet2, ScalarField
from ..domain import DefiningFunction
from ..errors import ParamError
from ..profiles import G, G1, G2
from .base import CatalogEntry, KnownFact


def worm_bound(beta: float) -> float:
    return math.pi / (2.0 * beta - math.pi)


def make_worm(beta: float = 1.5 * math.pi, K_w: float = 50.0) -> CatalogEntry:
    if not beta > math.pi / 2:
        raise ParamError("beta must exceed pi/2")
    if not K_w > 0:
        raise ParamError("K_w must be positive")
    a = beta - math.pi / 2

    def phi(t):
        s = np.abs(t) - a
        return K_w * G(s), K_w * np.sign(t) * G1(s), K_w * G2(s)

    # |t| beyond which phi > 1, so the domain is bounded in log|w|^2
    t_max = a + brentq(lambda s: K_w * float(G(np.array([s]))[0]) - 1.0, 1e-6, 50.0)
    w_lo, w_hi = math.exp(-t_max / 2), math.exp(t_max / 2)

    def fn(z, w):
        z = np.asarray(z, complex)
        w = np.asarray(w, complex)
        r2 = w.real ** 2 + w.imag ** 2
        with np.errstate(divide="ignore"):
            ell = np.log(r2)
        E = np.exp(1j * ell)
        A = z + E
        out = A.real ** 2 + A.imag ** 2 - 1.0 + phi(ell)[0]
        return np.where(r2 > 0, out, np.inf)

    def jet(z, w):
        z = np.asarray(z, complex)
        w = np.asarray(w, complex)
        z, w = np.broadcast_arrays(z, w)
        ell = np.log(w.real ** 2 + w.imag ** 2)
        E = np.exp(1j * ell)
        Eb = np.conj(E)
        zb, wb = np.conj(z), np.conj(w)
        p0, p1, p2 = phi(ell)
        A = z + E
        val = A.real ** 2 + A.imag ** 2 - 1.0 + p0
        cross = E * zb + Eb * z          # 2 Re(E zbar)
        dz = zb + Eb
        dw = (1j * (E * zb - Eb * z) + p1) / w
        dzzb = np.ones_like(z)
        dzwb = -1j * Eb / wb
        dwzb = 1j * E / w
        dwwb = (p2 - cross) / (w * wb)
        dzz = np.zeros_like(z)
        dzw = -1j * Eb / w
        dww = (-1j * (E * zb - Eb * z) - p1 - cross + p2) / w ** 2
        return Jet2(val=val, dz=dz, dw=dw, dzzb=dzzb, dzwb=dzwb, dwzb=dwzb, dwwb=dwwb + 0j, dzz=dzz, dzw=dzw,
                    dww=dww)

    def exclude(z, w):
        return np.abs(np.asarray(w)) < 0.5 * w_lo

    m = 1.05
    label = f"worm:beta={beta:.6g}"
    field = ScalarField(fn, label, exclude=exclude, exact_jet=jet)
    rho = DefiningFunction(field, ((-2 * m, -2 * m, -w_hi * m, -w_hi * m), (2 * m, 2 * m, w_hi * m, w_hi * m)),
                           name=label, center=(-1.0 + 0j, 1.0 + 0j), params={"beta": beta, "K_w": K_w},
                           provenance="external")
    bound = worm_bound(beta)
    facts = [
        KnownFact("index_upper_bound", bound, 1e-15, lambda: worm_bound(beta), source="literature bound"),
    ]
    return CatalogEntry(label, rho, {"beta": beta, "K_w": K_w}, facts, provenance="external",
                        description="worm domain with the classical defining function (literature formula)",
                        extras={"bound": bound, "flat_interval": a, "t_max": t_max, "w_range": (w_lo, w_hi)})
