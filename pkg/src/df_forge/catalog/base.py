"""Catalog entry type, known facts and the exact-vs-numeric self test."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..cdiff import DiffScheme, Jet2, jet2
from ..domain import DefiningFunction


@dataclass
class KnownFact:
    """A checkable geometric fact: ``measure()`` returns the observed value."""

    fact_id: str
    expected: float
    tol: float
    measure: Callable[[], float]
    source: str = "closed form"

    def check(self) -> dict:
        got = float(self.measure())
        return {
            "fact": self.fact_id,
            "expected": float(self.expected),
            "observed": got,
            "tol": float(self.tol),
            "source": self.source,
            "pass": bool(abs(got - self.expected) <= self.tol),
        }


@dataclass
class CatalogEntry:
    name: str
    defining_function: DefiningFunction
    parameters: dict
    known_facts: list = field(default_factory=list)
    curves: dict = field(default_factory=dict)
    flat_reference: Optional[Callable] = None
    provenance: str = "internal"
    description: str = ""
    extras: dict = field(default_factory=dict)

    @property
    def rho(self) -> DefiningFunction:
        return self.defining_function

    def describe(self) -> dict:
        return {
            "name": self.name,
            "parameters": {k: (v if not isinstance(v, complex) else [v.real, v.imag])
                           for k, v in self.parameters.items()},
            "provenance": self.provenance,
            "description": self.description,
            "bbox": [list(map(float, self.rho.bbox[0])), list(map(float, self.rho.bbox[1]))],
            "exact_jet": self.rho.field.exact_jet is not None,
            "known_facts": [f.fact_id for f in self.known_facts],
            "curves": sorted(self.curves),
        }

    def check_facts(self) -> list:
        return [f.check() for f in self.known_facts]


def random_box_points(bbox, n: int, seed: int = 0, shrink: float = 1.0, exclude=None):
    lo, hi = (np.asarray(b, float) for b in bbox)
    c = 0.5 * (lo + hi)
    r = 0.5 * (hi - lo) * shrink
    rng = np.random.default_rng(seed)
    pts = []
    while sum(len(p) for p in pts) < n:
        x = c + r * rng.uniform(-1, 1, size=(2 * n, 4))
        z = x[:, 0] + 1j * x[:, 1]
        w = x[:, 2] + 1j * x[:, 3]
        if exclude is not None:
            keep = ~np.asarray(exclude(z, w), bool)
            z, w = z[keep], w[keep]
        pts.append(np.stack([z, w], axis=-1))
    P = np.concatenate(pts)[:n]
    return P[:, 0], P[:, 1]


def jet_selftest(entry: CatalogEntry, n: int = 100, seed: int = 0, tol: float = 1e-6,
                 scheme: Optional[DiffScheme] = None, points=None) -> dict:
    """Compare the exact jet with the finite-difference jet at random points.

    The error of each entry is measured relative to max(1, largest entry
    magnitude at that point).
    """
    f = entry.rho.field
    if points is None:
        z, w = random_box_points(entry.rho.bbox, n, seed, shrink=0.95, exclude=f.exclude)
    else:
        z, w = points
    if f.charts:
        idx = np.asarray(f.chart_index(z, w), int)
        parts = [(ch, idx == k) for k, ch in enumerate(f.charts) if ch.exact_jet is not None and np.any(idx == k)]
    elif f.exact_jet is not None:
        parts = [(f, np.ones(len(z), bool))]
    else:
        parts = []
    if not parts:
        return {"entry": entry.name, "skipped": "no exact jet", "pass": True}
    base = scheme or DiffScheme()
    num_scheme = DiffScheme(**{**base.as_dict(), "use_exact": False, "consistency_tol": 1e9})
    rels = []
    for g, sel in parts:
        num = jet2(g, z[sel], w[sel], scheme=num_scheme)
        ex = jet2(g, z[sel], w[sel], scheme=base)
        E, Nm = ex.as_dict(), num.as_dict()
        err = np.max([np.abs(np.asarray(E[k]) - np.asarray(Nm[k])) for k in E], axis=0)
        scale = np.maximum(1.0, np.max([np.abs(np.asarray(E[k])) for k in E], axis=0))
        rels.append(err / scale)
    rel = np.concatenate(rels)
    return {"entry": entry.name, "n": int(len(rel)), "max_rel_error": float(rel.max()), "tol": tol,
            "pass": bool(rel.max() <= tol)}
