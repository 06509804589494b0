"""Hand-derived Wirtinger jets used as the independent oracle for cdiff.

Each entry maps a name to (field, jet) where ``field(z, w)`` evaluates the
function and ``jet(z, w)`` returns a dict with keys val, dz, dw, dzzb, dzwb,
dwzb, dwwb, dzz, dzw, dww computed from closed-form derivatives written out
by hand (no finite differences, no engine code).
"""
import numpy as np

KEYS = ("val", "dz", "dw", "dzzb", "dzwb", "dwzb", "dwwb", "dzz", "dzw", "dww")


def _jet(val, dz=0, dw=0, dzzb=0, dzwb=0, dwzb=0, dwwb=0, dzz=0, dzw=0, dww=0):
    out = dict(val=val, dz=dz, dw=dw, dzzb=dzzb, dzwb=dzwb, dwzb=dwzb, dwwb=dwwb, dzz=dzz, dzw=dzw, dww=dww)
    shape = np.broadcast(*[np.asarray(v) for v in out.values()]).shape
    return {k: np.broadcast_to(np.asarray(v, dtype=complex), shape) for k, v in out.items()}


def _ab2(z):
    return (z * np.conj(z)).real


# -- exponentially flat term 2 exp(-1/|w|^2) and its partials --------------

def _flat_parts(w):
    """Value and w-derivatives of 2 exp(-1/|w|^2); all vanish at w = 0."""
    w = np.asarray(w, dtype=complex)
    r2 = _ab2(w)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        s = np.where(r2 > 0, 1.0 / np.where(r2 > 0, r2, 1.0), np.inf)
        e = np.where(s < 740, 2.0 * np.exp(-np.minimum(s, 740)), 0.0)
        wi = np.where(r2 > 0, 1.0 / np.where(r2 > 0, w, 1.0), 0.0)
        wbi = np.conj(wi)
        val = e
        dw = e * wi ** 2 * wbi                       # 2e^{-s} / (w^2 wbar)
        dwwb = e * (s ** 3 - s ** 2)                 # 2e^{-s}(1/|w|^6 - 1/|w|^4)
        dww = e * (wi ** 4 * wbi ** 2 - 2 * wi ** 3 * wbi)
    z0 = np.zeros_like(r2)
    return [np.where(e > 0, x, z0) for x in (val, dw, dwwb, dww)]


def f_sec5(z, w):
    return _ab2(z) + _flat_parts(w)[0] - 1.0


def j_sec5(z, w):
    v, dw, dwwb, dww = _flat_parts(w)
    return _jet(_ab2(z) + v - 1.0, dz=np.conj(z), dw=dw, dzzb=1.0, dwwb=dwwb, dww=dww)


def make_exp_flat(a, b, z0, v0):
    c = 1j * v0

    def f(z, w):
        return a * _ab2(z - z0) + _flat_parts(w - c)[0] - b

    def j(z, w):
        v, dw, dwwb, dww = _flat_parts(w - c)
        return _jet(a * _ab2(z - z0) + v - b, dz=a * np.conj(z - z0), dw=dw, dzzb=a, dwwb=dwwb, dww=dww)

    return f, j


ORACLES = {}


def oracle(name):
    def deco(fn):
        f, j = fn()
        ORACLES[name] = (f, j)
        return fn
    return deco


@oracle("ball")
def _():
    return (lambda z, w: _ab2(z) + _ab2(w) - 1,
            lambda z, w: _jet(_ab2(z) + _ab2(w) - 1, np.conj(z), np.conj(w), 1, 0, 0, 1))


@oracle("ellipsoid_1_4")
def _():
    return (lambda z, w: _ab2(z) + 4 * _ab2(w) - 1,
            lambda z, w: _jet(_ab2(z) + 4 * _ab2(w) - 1, np.conj(z), 4 * np.conj(w), 1, 0, 0, 4))


@oracle("re_z")
def _():
    return (lambda z, w: z.real + 0 * w.real,
            lambda z, w: _jet(z.real + 0 * w.real, 0.5))


@oracle("v_plus_re_z")
def _():
    return (lambda z, w: w.imag + z.real,
            lambda z, w: _jet(w.imag + z.real, 0.5, -0.5j))


@oracle("abs_z_4")
def _():
    return (lambda z, w: _ab2(z) ** 2 + 0 * w.real,
            lambda z, w: _jet(_ab2(z) ** 2, dz=2 * np.conj(z) ** 2 * z, dzzb=4 * _ab2(z),
                              dzz=2 * np.conj(z) ** 2) )


@oracle("re_z2w")
def _():
    return (lambda z, w: (z ** 2 * w).real,
            lambda z, w: _jet((z ** 2 * w).real, dz=z * w, dw=z ** 2 / 2, dzz=w, dzw=z))


@oracle("im_z_wbar")
def _():
    return (lambda z, w: (z * np.conj(w)).imag,
            lambda z, w: _jet((z * np.conj(w)).imag, dz=np.conj(w) / 2j, dw=-np.conj(z) / 2j,
                              dzwb=-0.5j, dwzb=0.5j))


@oracle("abs_z2_abs_w2")
def _():
    return (lambda z, w: _ab2(z) * _ab2(w),
            lambda z, w: _jet(_ab2(z) * _ab2(w), np.conj(z) * _ab2(w), np.conj(w) * _ab2(z),
                              _ab2(w), np.conj(z) * w, z * np.conj(w), _ab2(z), 0, np.conj(z) * np.conj(w), 0))


@oracle("exp_abs_z2")
def _():
    def j(z, w):
        e = np.exp(_ab2(z))
        return _jet(e, dz=np.conj(z) * e, dzzb=e * (1 + _ab2(z)), dzz=np.conj(z) ** 2 * e)
    return (lambda z, w: np.exp(_ab2(z)) + 0 * w.real, j)


@oracle("exp_re_z")
def _():
    def j(z, w):
        e = np.exp(z.real)
        return _jet(e, dz=e / 2, dzzb=e / 4, dzz=e / 4)
    return (lambda z, w: np.exp(z.real) + 0 * w.real, j)


@oracle("flat_w")
def _():
    def j(z, w):
        v, dw, dwwb, dww = _flat_parts(w)
        return _jet(v, dw=dw, dwwb=dwwb, dww=dww)
    return (lambda z, w: _flat_parts(w)[0] + 0 * z.real, j)


@oracle("sec5")
def _():
    return f_sec5, j_sec5


@oracle("exp_flat_a2_shifted")
def _():
    return make_exp_flat(2.0, 1.0, 0.3 + 0.1j, 0.2)


@oracle("exp_flat_a05_b15")
def _():
    return make_exp_flat(0.5, 1.5, -0.2j, -0.1)


@oracle("abs_z2_u")
def _():
    def j(z, w):
        u = w.real
        return _jet(_ab2(z) * u, dz=np.conj(z) * u, dw=_ab2(z) / 2, dzzb=u, dzwb=np.conj(z) / 2,
                    dwzb=z / 2, dzw=np.conj(z) / 2)
    return (lambda z, w: _ab2(z) * w.real, j)


@oracle("half_abs_z6")
def _():
    def j(z, w):
        zb = np.conj(z)
        return _jet(0.5 * _ab2(z) ** 3, dz=1.5 * z ** 2 * zb ** 3, dzzb=4.5 * _ab2(z) ** 2, dzz=3 * z * zb ** 3)
    return (lambda z, w: 0.5 * _ab2(z) ** 3 + 0 * w.real, j)


@oracle("p6_term_a")
def _():
    # 2 Re(-(1/20) zbar^5 z)
    def j(z, w):
        zb = np.conj(z)
        val = (-(1 / 20) * (zb ** 5 * z + z ** 5 * zb)).real
        return _jet(val, dz=-(zb ** 5 + 5 * z ** 4 * zb) / 20, dzzb=-(z ** 4 + zb ** 4) / 4, dzz=-z ** 3 * zb)
    return (lambda z, w: 2 * (-(1 / 20) * np.conj(z) ** 5 * z).real + 0 * w.real, j)


@oracle("p6_term_b")
def _():
    # 2 Re((i/4) zbar^4 z^2)
    def j(z, w):
        zb = np.conj(z)
        val = 2 * (0.25j * zb ** 4 * z ** 2).real
        return _jet(val, dz=0.5j * z * zb ** 4 - 1j * z ** 3 * zb ** 2,
                    dzzb=2j * z * zb ** 3 - 2j * z ** 3 * zb, dzz=0.5j * zb ** 4 - 3j * z ** 2 * zb ** 2)
    return (lambda z, w: 2 * (0.25j * np.conj(z) ** 4 * z ** 2).real + 0 * w.real, j)


@oracle("abs_z2_u2")
def _():
    def j(z, w):
        u = w.real
        return _jet(_ab2(z) * u ** 2, dz=np.conj(z) * u ** 2, dw=_ab2(z) * u, dzzb=u ** 2,
                    dzwb=np.conj(z) * u, dwzb=z * u, dwwb=_ab2(z) / 2, dzw=np.conj(z) * u, dww=_ab2(z) / 2)
    return (lambda z, w: _ab2(z) * w.real ** 2, j)


@oracle("log_1_plus_norm2")
def _():
    def j(z, w):
        S = 1 + _ab2(z) + _ab2(w)
        zb, wb = np.conj(z), np.conj(w)
        return _jet(np.log(S), zb / S, wb / S, 1 / S - _ab2(z) / S ** 2, -zb * w / S ** 2,
                    -z * wb / S ** 2, 1 / S - _ab2(w) / S ** 2, -zb ** 2 / S ** 2, -zb * wb / S ** 2,
                    -wb ** 2 / S ** 2)
    return (lambda z, w: np.log(1 + _ab2(z) + _ab2(w)), j)


@oracle("abs_z_plus_w_2")
def _():
    return (lambda z, w: _ab2(z + w),
            lambda z, w: _jet(_ab2(z + w), np.conj(z + w), np.conj(z + w), 1, 1, 1, 1))


@oracle("product_norms")
def _():
    def j(z, w):
        A, B = _ab2(z) + 1, _ab2(w) + 1
        zb, wb = np.conj(z), np.conj(w)
        return _jet(A * B, zb * B, wb * A, B, zb * w, z * wb, A, 0, zb * wb, 0)
    return (lambda z, w: (_ab2(z) + 1) * (_ab2(w) + 1), j)


@oracle("two_re_zbar2_w")
def _():
    def j(z, w):
        zb, wb = np.conj(z), np.conj(w)
        return _jet(2 * (zb ** 2 * w).real, dz=2 * z * wb, dw=zb ** 2, dzwb=2 * z, dwzb=2 * zb, dzz=2 * wb)
    return (lambda z, w: 2 * (np.conj(z) ** 2 * w).real, j)


@oracle("perturbed_ball")
def _():
    eps = 0.1

    def j(z, w):
        zb, wb = np.conj(z), np.conj(w)
        # eps Re(z^2 wbar) = eps (z^2 wbar + zbar^2 w) / 2
        return _jet(_ab2(z) + _ab2(w) - 1 + eps * (z ** 2 * wb).real,
                    dz=zb + eps * z * wb, dw=wb + eps * zb ** 2 / 2,
                    dzzb=1, dzwb=eps * z, dwzb=eps * zb, dwwb=1, dzz=eps * wb)
    return (lambda z, w: _ab2(z) + _ab2(w) - 1 + eps * (z ** 2 * np.conj(w)).real, j)
