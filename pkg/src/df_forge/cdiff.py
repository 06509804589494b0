"""Wirtinger-derivative engine for real scalar fields on C^2.

Fields are vectorised evaluators ``f(z, w) -> ndarray`` taking complex
arrays of any (broadcastable) shape.  Derivatives are taken on the real
chart (x, y, u, v) with z = x + iy, w = u + iv by central differences and
Richardson extrapolation, then recombined into Wirtinger form:

    f_z = (f_x - i f_y) / 2,    f_{z zbar} = (f_xx + f_yy) / 4,  ...

Fields may carry a hand-coded exact jet (catalog domains do); it is used
whenever ``DiffScheme.use_exact`` is set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, NumericalError, RegionError

__all__ = [
    "CPoint",
    "Jet2",
    "DiffScheme",
    "ScalarField",
    "jet2",
    "gradient",
    "third_derivative",
    "wirtinger",
    "apply_vector",
    "nested_field",
    "compose",
    "power_field",
    "exp_product",
    "to_real",
    "from_real",
    "jet_product",
    "jet_apply",
    "jet_exp",
    "jet_linear",
]


@dataclass(frozen=True)
class CPoint:
    """A point (z, w) of C^2."""

    z: complex
    w: complex

    def __post_init__(self):
        for c in (self.z, self.w):
            if not (math.isfinite(complex(c).real) and math.isfinite(complex(c).imag)):
                raise ValueError(f"non-finite coordinate in CPoint: {self.z!r}, {self.w!r}")
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "w", complex(self.w))

    def as_real(self) -> np.ndarray:
        return np.array([self.z.real, self.z.imag, self.w.real, self.w.imag])

    @classmethod
    def from_real(cls, x) -> "CPoint":
        x = np.asarray(x, dtype=float)
        return cls(complex(x[0], x[1]), complex(x[2], x[3]))

    def norm(self) -> float:
        return math.hypot(abs(self.z), abs(self.w))


def to_real(z, w) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    z, w = np.broadcast_arrays(z, w)
    return np.stack([z.real, z.imag, w.real, w.imag], axis=-1)


def from_real(x):
    x = np.asarray(x, dtype=float)
    return x[..., 0] + 1j * x[..., 1], x[..., 2] + 1j * x[..., 3]


def _as_points(p, w=None):
    """Normalise (CPoint | z-array, w-array) input; returns z, w, scalar flag."""
    if isinstance(p, CPoint):
        return np.asarray(p.z, dtype=complex), np.asarray(p.w, dtype=complex), True
    if w is None:
        raise TypeError("pass a CPoint or both z and w")
    z = np.asarray(p, dtype=complex)
    w = np.asarray(w, dtype=complex)
    z, w = np.broadcast_arrays(z, w)
    return z, w, False


@dataclass
class Jet2:
    """Second-order Wirtinger jet of a real field.

    ``dzzb`` is f_{z zbar}, ``dzwb`` is f_{z wbar}, ``dwzb`` is f_{w zbar}
    and so on.  Every attribute is an array with the shape of the query
    points (0-d for a single CPoint).
    """

    val: np.ndarray
    dz: np.ndarray
    dw: np.ndarray
    dzzb: np.ndarray
    dzwb: np.ndarray
    dwzb: np.ndarray
    dwwb: np.ndarray
    dzz: np.ndarray
    dzw: np.ndarray
    dww: np.ndarray

    @property
    def grad(self) -> np.ndarray:
        """(f_z, f_w) stacked on the last axis."""
        return np.stack([self.dz, self.dw], axis=-1)

    @property
    def mixed(self) -> np.ndarray:
        """Complex Hessian M[i, j] = d_i d_jbar f, shape (..., 2, 2)."""
        row0 = np.stack([self.dzzb, self.dzwb], axis=-1)
        row1 = np.stack([self.dwzb, self.dwwb], axis=-1)
        return np.stack([row0, row1], axis=-2)

    @property
    def holo(self) -> np.ndarray:
        row0 = np.stack([self.dzz, self.dzw], axis=-1)
        row1 = np.stack([self.dzw, self.dww], axis=-1)
        return np.stack([row0, row1], axis=-2)

    def take(self, index) -> "Jet2":
        return Jet2(**{f.name: np.asarray(getattr(self, f.name))[index] for f in fields(self)})

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def max_abs(self) -> np.ndarray:
        return np.max(np.stack([np.abs(getattr(self, f.name)) for f in fields(self)]), axis=0)

    @classmethod
    def from_real(cls, val, g, H) -> "Jet2":
        """Build from the real gradient g[..., 4] and Hessian H[..., 4, 4]."""
        fx, fy, fu, fv = (g[..., k] for k in range(4))
        h = lambda i, j: H[..., i, j]  # noqa: E731
        dzzb = 0.25 * (h(0, 0) + h(1, 1))
        dwwb = 0.25 * (h(2, 2) + h(3, 3))
        dzwb = 0.25 * (h(0, 2) + h(1, 3) + 1j * (h(0, 3) - h(1, 2)))
        dwzb = 0.25 * (h(2, 0) + h(3, 1) + 1j * (h(2, 1) - h(3, 0)))
        dzz = 0.25 * (h(0, 0) - h(1, 1) - 2j * h(0, 1))
        dww = 0.25 * (h(2, 2) - h(3, 3) - 2j * h(2, 3))
        dzw = 0.25 * (h(0, 2) - h(1, 3) - 1j * (h(0, 3) + h(1, 2)))
        return cls(
            val=np.asarray(val, dtype=float),
            dz=0.5 * (fx - 1j * fy),
            dw=0.5 * (fu - 1j * fv),
            dzzb=dzzb + 0j,
            dzwb=dzwb,
            dwzb=dwzb,
            dwwb=dwwb + 0j,
            dzz=dzz,
            dzw=dzw,
            dww=dww,
        )

    def _scalarize(self) -> "Jet2":
        out = {}
        for f in fields(self):
            a = np.asarray(getattr(self, f.name))
            out[f.name] = a.item() if a.ndim == 0 else a
        return Jet2(**out)


@dataclass(frozen=True)
class DiffScheme:
    """Finite-difference settings.

    The step at a point p is ``base_step * max(1, |p|) * nest_step_factor**depth``
    where ``depth`` counts how many finite-difference layers sit inside the
    field being differentiated.
    """

    base_step: float = 1e-3
    richardson_levels: int = 2
    consistency_tol: float = 1e-3
    nest_step_factor: float = 10.0
    third_step: float = 2e-3
    tol_hermitian: float = 1e-6
    tol_nest: float = 1e-4
    use_exact: bool = True
    adapt_tol: float = 1e-4
    max_refine: int = 8

    def step(self, z, w, depth: int = 0) -> np.ndarray:
        nrm = np.sqrt(np.abs(z) ** 2 + np.abs(w) ** 2)
        return self.base_step * np.maximum(1.0, nrm) * self.nest_step_factor ** depth

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_SCHEME = DiffScheme()


class ScalarField:
    """A pure, vectorised evaluator of a smooth real function on C^2.

    ``bbox`` is ((lo_x, lo_y, lo_u, lo_v), (hi_x, ...)) describing the smooth
    region; ``exclude`` an optional predicate ``(z, w) -> bool array`` marking
    excluded points.  ``exact_jet(z, w) -> Jet2`` is an optional closed form.
    ``charts``/``chart_index`` let a field delegate differentiation to local
    smooth representatives of the same zero set (used for the glued domain).
    """

    def __init__(
        self,
        fn: Callable,
        name: str = "field",
        bbox=None,
        exclude: Optional[Callable] = None,
        exact_jet: Optional[Callable] = None,
        depth: int = 0,
        charts: Optional[Sequence["ScalarField"]] = None,
        chart_index: Optional[Callable] = None,
        meta: Optional[dict] = None,
    ):
        self.fn = fn
        self.name = name
        self.bbox = None if bbox is None else (np.asarray(bbox[0], float), np.asarray(bbox[1], float))
        self.exclude = exclude
        self.exact_jet = exact_jet
        self.depth = depth
        self.charts = list(charts) if charts else None
        self.chart_index = chart_index
        self.meta = dict(meta or {})

    def __call__(self, z, w):
        return np.asarray(self.fn(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex)), dtype=float)

    def __repr__(self):
        return f"ScalarField({self.name!r}, depth={self.depth})"

    def in_region(self, z, w) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        ok = np.ones(np.broadcast(z, w).shape, dtype=bool)
        if self.bbox is not None:
            x = to_real(z, w)
            ok &= np.all((x >= self.bbox[0]) & (x <= self.bbox[1]), axis=-1)
        if self.exclude is not None:
            ok &= ~np.asarray(self.exclude(z, w), dtype=bool)
        return ok


def _check_region(f: ScalarField, z, w):
    if f.bbox is None and f.exclude is None:
        return
    ok = f.in_region(z, w)
    if not np.all(ok):
        bad = np.argwhere(~np.atleast_1d(ok))[0]
        raise RegionError(f"{f.name}: point {bad} outside the declared smooth region")


# Unit offsets of the 33-point stencil: centre, +-e_i, and the four corners of
# each coordinate pair.
_PAIRS = [(i, j) for i in range(4) for j in range(i + 1, 4)]


def _build_offsets() -> np.ndarray:
    offs = [np.zeros(4)]
    for i in range(4):
        for s in (1.0, -1.0):
            e = np.zeros(4)
            e[i] = s
            offs.append(e)
    for i, j in _PAIRS:
        for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            e = np.zeros(4)
            e[i] = si
            e[j] = sj
            offs.append(e)
    return np.array(offs)


_OFFSETS = _build_offsets()


def _richardson(levels: Sequence[np.ndarray], order: int = 2):
    """Extrapolate estimates taken at steps h, h/2, h/4 ...; returns (value, error estimate)."""
    table = [np.asarray(a) for a in levels]
    if len(table) == 1:
        return table[0], np.zeros_like(np.abs(table[0]))
    finest = table[-1]
    k = order
    while len(table) > 1:
        fac = 2.0 ** k
        table = [(fac * table[i + 1] - table[i]) / (fac - 1.0) for i in range(len(table) - 1)]
        k += 2
    return table[0], np.abs(table[0] - finest)


def _fd_real_jet(f: ScalarField, z, w, scheme: DiffScheme, shrink=None):
    """Real value, gradient (...,4), Hessian (...,4,4) and an error estimate."""
    shape = z.shape
    zf = z.reshape(-1)
    wf = w.reshape(-1)
    x0 = to_real(zf, wf)
    h0 = scheme.step(zf, wf, f.depth)
    if shrink is not None:
        h0 = h0 * shrink
    n = x0.shape[0]
    val = f(zf, wf)
    grads, hesss = [], []
    for lev in range(scheme.richardson_levels):
        h = h0 / 2 ** lev
        pts = x0[:, None, :] + h[:, None, None] * _OFFSETS[None, :, :]
        zz, ww = from_real(pts)
        F = f(zz, ww)
        F0 = F[:, 0]
        g = np.empty((n, 4))
        H = np.empty((n, 4, 4))
        for i in range(4):
            fp = F[:, 1 + 2 * i]
            fm = F[:, 2 + 2 * i]
            g[:, i] = (fp - fm) / (2 * h)
            H[:, i, i] = (fp - 2 * F0 + fm) / h ** 2
        for k, (i, j) in enumerate(_PAIRS):
            b = 9 + 4 * k
            hij = (F[:, b] - F[:, b + 1] - F[:, b + 2] + F[:, b + 3]) / (4 * h ** 2)
            H[:, i, j] = hij
            H[:, j, i] = hij
        grads.append(g)
        hesss.append(H)
    g, gerr = _richardson(grads)
    H, herr = _richardson(hesss)
    err = np.maximum(gerr.max(axis=-1), herr.max(axis=(-2, -1)))
    return (
        val.reshape(shape),
        g.reshape(shape + (4,)),
        H.reshape(shape + (4, 4)),
        err.reshape(shape),
    )


def _jet_scale(g, H):
    return np.maximum(np.max(np.abs(g), axis=-1), np.max(np.abs(H), axis=(-2, -1)))


def _fd_adaptive(f: ScalarField, z, w, scheme: DiffScheme):
    """FD jet with local step refinement.

    Fields that vary on a length scale much shorter than the base step (the
    exponentially flat terms near their flat set) show a large Richardson
    discrepancy relative to their own derivative scale; those points are
    recomputed with the step divided by 4 until the discrepancy drops below
    ``adapt_tol`` or ``max_refine`` is reached.
    """
    val, g, H, err = _fd_real_jet(f, z, w, scheme)
    if scheme.richardson_levels < 2 or scheme.max_refine <= 0 or z.size == 0:
        return val, g, H, err
    shrink = np.ones(z.shape)
    for _ in range(scheme.max_refine):
        bad = err > scheme.adapt_tol * _jet_scale(g, H)
        if not np.any(bad):
            break
        shrink[bad] /= 4.0
        v2, g2, H2, e2 = _fd_real_jet(f, z[bad], w[bad], scheme, shrink=shrink[bad])
        better = e2 < err[bad]
        idx = tuple(a[better] for a in np.nonzero(bad))
        g[idx], H[idx], err[idx] = g2[better], H2[better], e2[better]
        if not np.any(better):
            break
    return val, g, H, err


def jet2(f: ScalarField, p, w=None, scheme: Optional[DiffScheme] = None) -> Jet2:
    """Second-order Wirtinger jet of ``f`` at a CPoint or at arrays (z, w)."""
    scheme = scheme or DEFAULT_SCHEME
    z, w, scalar = _as_points(p, w)
    if f.charts:
        idx = np.asarray(f.chart_index(z, w), dtype=int)
        idx = np.broadcast_to(idx, z.shape)
        parts = {}
        out = None
        for k in np.unique(idx):
            sel = idx == k
            J = jet2(f.charts[k], z[sel], w[sel], scheme=scheme)
            parts[k] = (sel, J)
        out = {name.name: np.zeros(z.shape, dtype=(float if name.name == "val" else complex))
               for name in fields(Jet2)}
        for k, (sel, J) in parts.items():
            for name in out:
                out[name][sel] = getattr(J, name)
        J = Jet2(**out)
        return J._scalarize() if scalar else J
    _check_region(f, z, w)
    if scheme.use_exact and f.exact_jet is not None:
        J = f.exact_jet(z, w)
        return J._scalarize() if scalar else J
    val, g, H, err = _fd_adaptive(f, z, w, scheme)
    J = Jet2.from_real(val, g, H)
    scale = np.maximum(1.0, _jet_scale(g, H))
    if scheme.richardson_levels > 1 and np.any(err > scheme.consistency_tol * scale):
        worst = float(np.max(err / scale))
        raise NumericalError(f"{f.name}: Richardson levels disagree (relative {worst:.2e})")
    return J._scalarize() if scalar else J


def gradient(f: ScalarField, p, w=None, scheme: Optional[DiffScheme] = None):
    """Holomorphic gradient (f_z, f_w) and value; cheaper than a full jet."""
    scheme = scheme or DEFAULT_SCHEME
    z, w, scalar = _as_points(p, w)
    if f.charts or (scheme.use_exact and f.exact_jet is not None):
        J = jet2(f, z, w, scheme=scheme)
        return np.asarray(J.val), np.stack([np.asarray(J.dz), np.asarray(J.dw)], axis=-1)
    _check_region(f, z, w)
    x0 = to_real(z, w)
    h0 = scheme.step(z, w, f.depth)
    ests = []
    for lev in range(scheme.richardson_levels):
        h = (h0 / 2 ** lev)[..., None]
        g = np.empty(x0.shape)
        for i in range(4):
            e = np.zeros(4)
            e[i] = 1.0
            zp, wp = from_real(x0 + h * e)
            zm, wm = from_real(x0 - h * e)
            g[..., i] = (f(zp, wp) - f(zm, wm)) / (2 * h[..., 0])
        ests.append(g)
    g, _ = _richardson(ests)
    val = f(z, w)
    grad = np.stack([0.5 * (g[..., 0] - 1j * g[..., 1]), 0.5 * (g[..., 2] - 1j * g[..., 3])], axis=-1)
    return val, grad


def wirtinger(fn: Callable, z, w, step, levels: int = 2):
    """First Wirtinger derivatives of a (possibly complex-valued) evaluator.

    Returns (d_z, d_zbar, d_w, d_wbar), each with the shape of ``z``.
    ``step`` may be a scalar or an array matching ``z``.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    z, w = np.broadcast_arrays(z, w)
    step = np.broadcast_to(np.asarray(step, dtype=float), z.shape)
    ests = []
    for lev in range(levels):
        h = step / 2 ** lev
        dx = (np.asarray(fn(z + h, w)) - np.asarray(fn(z - h, w))) / (2 * h)
        dy = (np.asarray(fn(z + 1j * h, w)) - np.asarray(fn(z - 1j * h, w))) / (2 * h)
        du = (np.asarray(fn(z, w + h)) - np.asarray(fn(z, w - h))) / (2 * h)
        dv = (np.asarray(fn(z, w + 1j * h)) - np.asarray(fn(z, w - 1j * h))) / (2 * h)
        ests.append(np.stack([dx, dy, du, dv]))
    d, _ = _richardson(ests)
    dx, dy, du, dv = d
    return 0.5 * (dx - 1j * dy), 0.5 * (dx + 1j * dy), 0.5 * (du - 1j * dv), 0.5 * (du + 1j * dv)


def apply_vector(fn: Callable, z, w, V, step, conj: bool = False, levels: int = 2):
    """Apply the (1,0) vector field V = V[0] d_z + V[1] d_w to ``fn``.

    With ``conj=True`` applies Vbar = conj(V[0]) d_zbar + conj(V[1]) d_wbar.
    """
    fz, fzb, fw, fwb = wirtinger(fn, z, w, step, levels)
    V = np.asarray(V)
    if conj:
        return np.conj(V[..., 0]) * fzb + np.conj(V[..., 1]) * fwb
    return V[..., 0] * fz + V[..., 1] * fw


_SYMBOLS = ("z", "zb", "w", "wb")


def _entry(J: Jet2, a: str, b: str):
    key = tuple(sorted((a, b), key=_SYMBOLS.index))
    table = {
        ("z", "z"): J.dzz,
        ("z", "zb"): J.dzzb,
        ("z", "w"): J.dzw,
        ("z", "wb"): J.dzwb,
        ("zb", "zb"): np.conj(J.dzz),
        ("zb", "w"): J.dwzb,
        ("zb", "wb"): np.conj(J.dzw),
        ("w", "w"): J.dww,
        ("w", "wb"): J.dwwb,
        ("wb", "wb"): np.conj(J.dww),
    }
    return np.asarray(table[key])


def third_derivative(f: ScalarField, p, triple, w=None, scheme: Optional[DiffScheme] = None):
    """A third Wirtinger derivative, e.g. ``triple=("z", "z", "wb")``.

    Computed as one central difference (with Richardson) of second-order jets.
    """
    scheme = scheme or DEFAULT_SCHEME
    z, w, scalar = _as_points(p, w)
    a, b, c = triple
    for s in triple:
        if s not in _SYMBOLS:
            raise ValueError(f"unknown derivative symbol {s!r}")
    h0 = scheme.third_step * np.maximum(1.0, np.sqrt(np.abs(z) ** 2 + np.abs(w) ** 2))
    h0 = h0 * scheme.nest_step_factor ** f.depth

    def entry(zz, ww):
        return _entry(jet2(f, zz, ww, scheme=scheme), a, b)

    fz, fzb, fw, fwb = wirtinger(entry, z, w, h0, scheme.richardson_levels)
    out = {"z": fz, "zb": fzb, "w": fw, "wb": fwb}[c]
    return complex(out) if scalar else out


def nested_field(
    fn: Callable,
    inputs: Sequence[ScalarField] = (),
    differentiates: bool = False,
    name: str = "nested",
    meta: Optional[dict] = None,
) -> ScalarField:
    """Wrap a composite evaluator as a differentiable ScalarField.

    ``fn(z, w)`` may evaluate the ``inputs`` and, if ``differentiates`` is
    set, take their jets.  Each finite-difference layer inside the field
    increases its ``depth`` and with it the outer step size; a layer backed
    by an exact jet costs nothing.
    """
    depth = max((f.depth for f in inputs), default=0)
    if differentiates and not all(f.exact_jet is not None for f in inputs):
        depth += 1
    info = {"depth": depth, "inputs": [f.name for f in inputs]}
    if depth:
        info["accuracy_note"] = f"{depth} finite-difference layer(s) inside; expect ~1e-{max(2, 9 - 3 * depth)} relative jets"
    info.update(meta or {})
    return ScalarField(fn, name=name, depth=depth, meta=info)


def compose(fn: Callable, *inputs: ScalarField, name: str = "composite") -> ScalarField:
    """Pointwise composition ``fn(f1(z,w), f2(z,w), ..., z=z, w=w)``."""

    def ev(z, w):
        return fn(*(f(z, w) for f in inputs))

    return nested_field(ev, inputs, differentiates=False, name=name)


def power_field(rho: ScalarField, eta: float, name: Optional[str] = None) -> ScalarField:
    """The field -(-rho)^eta; raises DomainError where rho >= 0."""

    def ev(z, w):
        r = rho(z, w)
        if np.any(r >= 0):
            raise DomainError(f"-(-{rho.name})^{eta} evaluated where {rho.name} >= 0")
        return -((-r) ** eta)

    return nested_field(ev, (rho,), name=name or f"-(-{rho.name})^{eta}")


def exp_product(r: ScalarField, psi: ScalarField, name: Optional[str] = None) -> ScalarField:
    """The field r * exp(psi)."""

    def ev(z, w):
        return r(z, w) * np.exp(psi(z, w))

    return nested_field(ev, (r, psi), name=name or f"{r.name}*exp({psi.name})")


def with_scheme(scheme: Optional[DiffScheme], **changes) -> DiffScheme:
    return replace(scheme or DEFAULT_SCHEME, **changes)


# -- exact jet algebra (product and chain rules) -----------------------------------

def _jet_from_blocks(val, g, M, Hh) -> Jet2:
    return Jet2(val=np.asarray(val, float), dz=g[..., 0], dw=g[..., 1],
                dzzb=M[..., 0, 0], dzwb=M[..., 0, 1], dwzb=M[..., 1, 0], dwwb=M[..., 1, 1],
                dzz=Hh[..., 0, 0], dzw=Hh[..., 0, 1], dww=Hh[..., 1, 1])


def jet_product(A: Jet2, B: Jet2) -> Jet2:
    """Jet of the product of two real fields."""
    a, b = np.asarray(A.val), np.asarray(B.val)
    ga, gb = A.grad, B.grad
    g = ga * b[..., None] + a[..., None] * gb
    M = (A.mixed * b[..., None, None] + a[..., None, None] * B.mixed
         + ga[..., :, None] * np.conj(gb)[..., None, :] + gb[..., :, None] * np.conj(ga)[..., None, :])
    Hh = (A.holo * b[..., None, None] + a[..., None, None] * B.holo
          + ga[..., :, None] * gb[..., None, :] + gb[..., :, None] * ga[..., None, :])
    return _jet_from_blocks(a * b, g, M, Hh)


def jet_apply(J: Jet2, f0, f1, f2) -> Jet2:
    """Jet of phi(f) given phi, phi', phi'' evaluated at f (arrays)."""
    g = J.grad
    f1 = np.asarray(f1)[..., None]
    f2m = np.asarray(f2)[..., None, None]
    M = f1[..., None] * J.mixed + f2m * g[..., :, None] * np.conj(g)[..., None, :]
    Hh = f1[..., None] * J.holo + f2m * g[..., :, None] * g[..., None, :]
    return _jet_from_blocks(f0, f1 * g, M, Hh)


def jet_exp(J: Jet2) -> Jet2:
    e = np.exp(np.asarray(J.val))
    return jet_apply(J, e, e, e)


def jet_linear(*terms) -> Jet2:
    """Linear combination sum c_k J_k of jets; ``terms`` are (c, J) pairs."""
    out = None
    for c, J in terms:
        d = {k: c * np.asarray(v) for k, v in J.as_dict().items()}
        out = d if out is None else {k: out[k] + d[k] for k in out}
    out["val"] = np.asarray(out["val"]).real
    return Jet2(**out)
