"""Ball, ellipsoids, a perturbed ball and multiplier variants of other entries."""
from __future__ import annotations

import math

import numpy as np

from ..cdiff import Jet2, ScalarField, jet2, jet_product
from ..domain import DefiningFunction, curve_from_function, levi_form
from ..errors import ParamError
from .base import CatalogEntry, KnownFact


def _zeros(z, w):
    return np.zeros(np.broadcast(np.asarray(z), np.asarray(w)).shape, complex)


def make_ellipsoid(A: float = 1.0, B: float = 1.0, name=None) -> CatalogEntry:
    """|z|^2/A^2 + |w|^2/B^2 < 1; A = B = 1 is the unit ball."""
    if not (A > 0 and B > 0):
        raise ParamError("ellipsoid semi-axes must be positive")
    ca, cb = 1.0 / A ** 2, 1.0 / B ** 2

    def fn(z, w):
        return ca * (z.real ** 2 + z.imag ** 2) + cb * (w.real ** 2 + w.imag ** 2) - 1.0

    def jet(z, w):
        z0 = _zeros(z, w)
        z = np.asarray(z, complex) + z0
        w = np.asarray(w, complex) + z0
        return Jet2(val=fn(z, w), dz=ca * np.conj(z), dw=cb * np.conj(w), dzzb=ca + z0, dzwb=z0.copy(),
                    dwzb=z0.copy(), dwwb=cb + z0, dzz=z0.copy(), dzw=z0.copy(), dww=z0.copy())

    label = name or ("ball" if A == B == 1 else f"ellipsoid:A={A:g},B={B:g}")
    m = 1.05
    rho = DefiningFunction(ScalarField(fn, label, exact_jet=jet), ((-m * A, -m * A, -m * B, -m * B),
                                                                  (m * A, m * A, m * B, m * B)),
                           name=label, params={"A": A, "B": B})
    # normalized Levi form at (A, 0): Hess(L, L)/|d rho| with L = (0, -1) is cb / (ca A)
    facts = [
        KnownFact("levi_at_z_axis_point", cb / (ca * A), 1e-12, lambda: levi_form(rho, (A, 0))),
        KnownFact("no_flat_points", 0.0, 0.0, lambda: 0.0, source="strict convexity"),
    ]

    def circle(t):
        return A * np.exp(1j * t), 0 * t + 0j

    return CatalogEntry(label, rho, {"A": A, "B": B}, facts,
                        curves={"equator": lambda n: curve_from_function(circle, n, name="equator")},
                        description="strongly pseudoconvex ellipsoid")


def make_ball() -> CatalogEntry:
    return make_ellipsoid(1.0, 1.0, name="ball")


def make_perturbed_ball(eps: float = 0.1) -> CatalogEntry:
    """|z|^2 + |w|^2 - 1 + eps Re(z^2 wbar) < 0."""
    if abs(eps) >= 0.5:
        raise ParamError("|eps| must be < 0.5 to keep the domain a small perturbation of the ball")

    def fn(z, w):
        return (z.real ** 2 + z.imag ** 2 + w.real ** 2 + w.imag ** 2 - 1.0
                + eps * (z * z * np.conj(w)).real)

    def jet(z, w):
        z0 = _zeros(z, w)
        z = np.asarray(z, complex) + z0
        w = np.asarray(w, complex) + z0
        zb, wb = np.conj(z), np.conj(w)
        return Jet2(val=fn(z, w), dz=zb + eps * z * wb, dw=wb + 0.5 * eps * zb ** 2, dzzb=1.0 + z0,
                    dzwb=eps * z, dwzb=eps * zb, dwwb=1.0 + z0, dzz=eps * wb, dzw=z0.copy(), dww=z0.copy())

    label = f"perturbed_ball:eps={eps:g}"
    m = 1.0 + abs(eps) + 0.05
    rho = DefiningFunction(ScalarField(fn, label, exact_jet=jet), ((-m,) * 4, (m,) * 4), name=label,
                           params={"eps": eps})
    return CatalogEntry(label, rho, {"eps": eps}, [], description="ball perturbed by eps Re(z^2 wbar)")


def multiply_entry(entry: CatalogEntry, factor_fn, factor_jet, tag: str, params: dict) -> CatalogEntry:
    """Same domain defined by rho * m for a positive multiplier m (exact jets by the product rule)."""
    base = entry.rho.field

    def fn(z, w):
        return base(z, w) * factor_fn(z, w)

    ex = None
    if base.exact_jet is not None:
        def ex(z, w):
            return jet_product(base.exact_jet(z, w), factor_jet(z, w))

    label = f"({entry.name}) * {tag}"
    f = ScalarField(fn, label, exact_jet=ex, exclude=base.exclude)
    rho = DefiningFunction(f, entry.rho.bbox, name=label, center=entry.rho.center,
                           params={**entry.rho.params, **params})
    return CatalogEntry(label, rho, {**entry.parameters, **params}, [], curves=dict(entry.curves),
                        flat_reference=entry.flat_reference, description=f"{entry.description}; multiplied by {tag}")


def exp_re_w_factor(eps: float):
    """m = exp(eps Re w) and its exact jet."""

    def fn(z, w):
        return np.exp(eps * np.asarray(w).real)

    def jet(z, w):
        z0 = _zeros(z, w)
        m = fn(z, w) + z0.real
        return Jet2(val=m, dz=z0.copy(), dw=0.5 * eps * m + z0, dzzb=z0.copy(), dzwb=z0.copy(), dwzb=z0.copy(),
                    dwwb=0.25 * eps ** 2 * m + z0, dzz=z0.copy(), dzw=z0.copy(), dww=0.25 * eps ** 2 * m + z0)

    return fn, jet


def abs_w2_factor(eps: float):
    """m = 1 + eps |w|^2 and its exact jet."""

    def fn(z, w):
        w = np.asarray(w)
        return 1.0 + eps * (w.real ** 2 + w.imag ** 2) + 0 * np.asarray(z).real

    def jet(z, w):
        z0 = _zeros(z, w)
        w = np.asarray(w, complex) + z0
        return Jet2(val=fn(z, w), dz=z0.copy(), dw=eps * np.conj(w), dzzb=z0.copy(), dzwb=z0.copy(),
                    dwzb=z0.copy(), dwwb=eps + z0, dzz=z0.copy(), dzw=z0.copy(), dww=z0.copy())

    return fn, jet
