"""Symbolic Wirtinger derivatives with sympy, used as an independent oracle."""
import numpy as np
import sympy as sp

x, y, u, v = sp.symbols("x y u v", real=True)
Z = x + sp.I * y
W = u + sp.I * v


def dz(e):
    return (sp.diff(e, x) - sp.I * sp.diff(e, y)) / 2


def dzb(e):
    return (sp.diff(e, x) + sp.I * sp.diff(e, y)) / 2


def dw(e):
    return (sp.diff(e, u) - sp.I * sp.diff(e, v)) / 2


def dwb(e):
    return (sp.diff(e, u) + sp.I * sp.diff(e, v)) / 2


OPS = {"z": dz, "zb": dzb, "w": dw, "wb": dwb}


def derivative(expr, ops):
    """Apply Wirtinger derivatives in order, e.g. ("z", "z", "wb")."""
    for o in ops:
        expr = OPS[o](expr)
    return expr


JET_KEYS = {
    "val": (), "dz": ("z",), "dw": ("w",),
    "dzzb": ("z", "zb"), "dzwb": ("z", "wb"), "dwzb": ("w", "zb"), "dwwb": ("w", "wb"),
    "dzz": ("z", "z"), "dzw": ("z", "w"), "dww": ("w", "w"),
}


def lambdify(expr):
    f = sp.lambdify((x, y, u, v), expr, "numpy")

    def ev(z, w):
        z = np.asarray(z, complex)
        w = np.asarray(w, complex)
        out = f(z.real, z.imag, w.real, w.imag)
        return np.broadcast_to(np.asarray(out, complex), np.broadcast(z, w).shape)
    return ev


def jet(expr):
    """Dict of numpy evaluators for the ten jet entries of a real expression."""
    return {k: lambdify(sp.simplify(derivative(expr, ops))) for k, ops in JET_KEYS.items()}
