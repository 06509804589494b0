"""Catalog of domains addressable as ``name`` or ``name:key=value,key=value``."""
from __future__ import annotations

import math
from typing import Callable

from ..errors import ParamError
from .base import CatalogEntry, KnownFact, jet_selftest, random_box_points
from .basic import abs_w2_factor, exp_re_w_factor, make_ball, make_ellipsoid, make_perturbed_ball, multiply_entry
from .behrens import make_behrens
from .exp_flat import make_exp_flat, no_extra_flat_root_check
from .glued import glue_verify, make_glued
from .worm import make_worm, worm_bound

__all__ = [
    "CatalogEntry",
    "KnownFact",
    "REGISTRY",
    "parse_name",
    "get",
    "list_entries",
    "selftest",
    "jet_selftest",
    "make_ball",
    "make_ellipsoid",
    "make_perturbed_ball",
    "make_exp_flat",
    "make_exp_flat_perturbed",
    "make_exp_flat_tilted",
    "make_behrens",
    "make_glued",
    "make_worm",
    "worm_bound",
    "glue_verify",
    "no_extra_flat_root_check",
]


def make_exp_flat_perturbed(eps: float = 0.3, a: float = 1.0, b: float = 1.0) -> CatalogEntry:
    """Same domain as exp_flat, defined by rho exp(eps Re w); Hess(L, N) = -eps zbar / 2 on the flat circle."""
    fn, jet = exp_re_w_factor(eps)
    return multiply_entry(make_exp_flat(a, b), fn, jet, f"exp({eps:g}Re w)", {"eps": eps})


def make_exp_flat_tilted(eps: float = 0.7, a: float = 1.0, b: float = 1.0) -> CatalogEntry:
    """Same domain as exp_flat, defined by rho (1 + eps |w|^2)."""
    fn, jet = abs_w2_factor(eps)
    return multiply_entry(make_exp_flat(a, b), fn, jet, f"(1+{eps:g}|w|^2)", {"eps": eps})


def _complex(v) -> complex:
    return complex(str(v).replace(" ", ""))


# name -> (factory, {param: converter}, one-line summary)
REGISTRY: dict = {
    "ball": (make_ball, {}, "unit ball |z|^2 + |w|^2 < 1"),
    "ellipsoid": (make_ellipsoid, {"A": float, "B": float}, "|z|^2/A^2 + |w|^2/B^2 < 1"),
    "perturbed_ball": (make_perturbed_ball, {"eps": float}, "ball perturbed by eps Re(z^2 wbar)"),
    "exp_flat": (make_exp_flat, {"a": float, "b": float, "z0": _complex, "v0": float},
                 "a|z - z0|^2 + 2 exp(-1/|w - i v0|^2) < b"),
    "exp_flat_perturbed": (make_exp_flat_perturbed, {"eps": float, "a": float, "b": float},
                           "exp_flat defined by rho exp(eps Re w)"),
    "exp_flat_tilted": (make_exp_flat_tilted, {"eps": float, "a": float, "b": float},
                        "exp_flat defined by rho (1 + eps |w|^2)"),
    "behrens": (make_behrens, {}, "Behrens hypersurface v + R(z, w)"),
    "glued": (make_glued, {"K": float, "eta": float, "delta": float, "a": float, "v0": float, "eps0": float,
                           "z0": _complex, "tau_hat": float},
              "exponentially flat piece soldered to the Behrens hypersurface"),
    "worm": (make_worm, {"beta": lambda v: _angle(v), "K_w": float}, "worm domain (external formula)"),
}


def _angle(v) -> float:
    """Floats, with 'pi' allowed: '1.5pi', '3pi/2', 'pi'."""
    s = str(v).replace(" ", "").replace("*", "")
    if "pi" not in s:
        return float(s)
    num, _, den = s.partition("/")
    coef = num.replace("pi", "")
    c = float(coef) if coef not in ("", "+") else 1.0
    return c * math.pi / (float(den) if den else 1.0)


def parse_name(spec: str):
    """'exp_flat:a=1,b=1' -> ('exp_flat', {'a': 1.0, 'b': 1.0})."""
    name, _, args = spec.strip().partition(":")
    if name not in REGISTRY:
        raise ParamError(f"unknown catalog entry {name!r}; known: {', '.join(sorted(REGISTRY))}")
    conv = REGISTRY[name][1]
    params = {}
    for item in filter(None, (a.strip() for a in args.split(","))):
        k, eq, v = item.partition("=")
        k = k.strip()
        if not eq or k not in conv:
            raise ParamError(f"bad parameter {item!r} for {name}; allowed: {', '.join(conv) or 'none'}")
        try:
            params[k] = conv[k](v.strip())
        except ValueError as exc:
            raise ParamError(f"cannot parse {k}={v!r}: {exc}") from None
    return name, params


def get(spec: str) -> CatalogEntry:
    name, params = parse_name(spec)
    factory: Callable = REGISTRY[name][0]
    return factory(**params)


def list_entries() -> list:
    return [{"name": k, "parameters": sorted(v[1]), "summary": v[2]} for k, v in REGISTRY.items()]


def selftest(spec: str, n: int = 100, seed: int = 0) -> dict:
    """Known facts plus the exact-vs-numeric jet comparison."""
    e = get(spec)
    facts = e.check_facts()
    jt = jet_selftest(e, n=n, seed=seed)
    return {"entry": e.name, "facts": facts, "jet_selftest": jt,
            "pass": bool(all(f["pass"] for f in facts) and jt["pass"])}
