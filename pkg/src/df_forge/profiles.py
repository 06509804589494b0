"""Smooth one-variable profiles built from exp(-1/t)."""
from __future__ import annotations

import numpy as np
from scipy.special import exp1

__all__ = ["flat_exp", "smoothstep", "plateau", "G", "G1", "G2", "bump"]


def flat_exp(t):
    """beta(t) = exp(-1/t) for t > 0 and 0 otherwise (C-infinity, flat at 0)."""
    t = np.asarray(t, float)
    pos = t > 0
    out = np.zeros_like(t)
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smoothstep(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, float)
    a = flat_exp(t)
    b = flat_exp(1.0 - t)
    return a / (a + b)


def plateau(d, r_in, r_out):
    """1 for d <= r_in, 0 for d >= r_out, smooth and monotone in between."""
    d = np.asarray(d, float)
    a = flat_exp(r_out - d)
    b = flat_exp(d - r_in)
    return a / (a + b)


def bump(t):
    """exp(1 - 1/(1 - 4 (t - 1/2)^2)) supported on (0, 1), peak 1 at t = 1/2."""
    t = np.asarray(t, float)
    x = 2.0 * t - 1.0
    inside = np.abs(x) < 1
    out = np.zeros_like(t)
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
    return out


def G2(s):
    """exp(-1/s) for s > 0, else 0."""
    return flat_exp(s)


def G1(s):
    """Antiderivative of G2 vanishing at 0: s exp(-1/s) - E1(1/s)."""
    s = np.asarray(s, float)
    out = np.zeros_like(s)
    p = s > 0
    sp = s[p]
    out[p] = sp * np.exp(-1.0 / sp) - exp1(1.0 / sp)
    return out


def G(s):
    """Second antiderivative of G2 vanishing to infinite order at 0 (convex, increasing for s > 0)."""
    s = np.asarray(s, float)
    out = np.zeros_like(s)
    p = s > 0
    sp = s[p]
    e = np.exp(-1.0 / sp)
    out[p] = 0.5 * sp * sp * e + 0.5 * sp * e - (sp + 0.5) * exp1(1.0 / sp)
    return out
