"""df-forge command line.

Exit codes: 0 success, 2 a verification ran and failed, 1 usage or runtime error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional

import numpy as np

from . import catalog
from .cdiff import DiffScheme, to_real
from .df_estimator import CollarSpec, estimate_exponent, estimate_index, parse_family
from .domain import CurveSamples, curve_from_function, levi_flat_scan, levi_values, transversality_check
from .errors import DFForgeError, HypothesisError, ParamError
from .report import RunConfig, emit_plot_data, load_config, make_report, write_report

__all__ = ["main", "run", "build_parser"]

# per-command defaults; a config file section [<command>] and then CLI flags override them
DEFAULTS = {
    "levi-scan": {"domain": "exp_flat", "n": 20000, "flat_tol": 1e-8, "curve_points": 256},
    "df-estimate": {"domain": "ball", "family": "raw", "collar": ""},
    "decompose-check": {"domain": "exp_flat", "n": 200, "eta": 0.5, "delta": 0.1, "C": 1.0, "n_ab": 64,
                        "tol": 1e-4},
    "lemma33-check": {"domain": "exp_flat", "C": "0.5,1,5", "n": 64, "tol": 1e-5},
    "transport-solve": {"domain": "exp_flat", "curve": "gamma", "n": 128, "rhs": "obstruction", "tol": 1e-5,
                        "correction_tol": 1e-5},
    "glue-verify": {"domain": "glued", "n_boundary": 10000, "n_scan": 100000, "n_cap": 20000},
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="TOML config file")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="report path (JSON)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker threads (fallback: DF_FORGE_THREADS)")
    common.add_argument("--csv", action="append", default=argparse.SUPPRESS, metavar="KIND:PATH",
                        help="also write a plot-data CSV series (repeatable)")
    p = _Parser(prog="df-forge", description="Levi-flat scans, exponent estimates and transport checks on C^2 domains",
                parents=[common])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    c = sub.add_parser("catalog", parents=[common], help="list, describe or self-test catalog entries")
    c.add_argument("action", choices=["list", "describe", "selftest"])
    c.add_argument("name", nargs="?")

    s = sub.add_parser("levi-scan", parents=[common], help="locate Levi-flat boundary points")
    s.add_argument("--domain")
    s.add_argument("--n", type=int)
    s.add_argument("--flat-tol", dest="flat_tol", type=float)

    d = sub.add_parser("df-estimate", parents=[common], help="empirical exponent over a collar")
    d.add_argument("--domain")
    d.add_argument("--family", help="e.g. 'raw;grid:C=0.5|1|5,delta=0.01|0.1'")
    d.add_argument("--collar", help="e.g. 'n=2000,depths=1e-2|1e-3,bisect_tol=1e-4'")

    k = sub.add_parser("decompose-check", parents=[common], help="assembled I/II/III form vs direct Hessian")
    k.add_argument("--domain")
    k.add_argument("--n", type=int)
    k.add_argument("--eta", type=float)
    k.add_argument("--delta", type=float)
    k.add_argument("--C", type=float)
    k.add_argument("--n-ab", dest="n_ab", type=int)
    k.add_argument("--tol", type=float)

    m = sub.add_parser("lemma33-check", parents=[common], help="weight identities on the flat curve")
    m.add_argument("--domain")
    m.add_argument("--C", help="comma separated list")
    m.add_argument("--n", type=int)
    m.add_argument("--tol", type=float)

    t = sub.add_parser("transport-solve", parents=[common], help="solve L u = h along a boundary curve")
    t.add_argument("--domain")
    t.add_argument("--curve", help="named catalog curve or a JSON file of [x, y, u, v] rows")
    t.add_argument("--n", type=int, help="samples for a named curve")
    t.add_argument("--rhs", help="obstruction | const:VALUE | file:PATH (JSON list of [re, im])")
    t.add_argument("--normalized", action="store_true", default=None)
    t.add_argument("--correct", action="store_true", default=None,
                   help="also build delta e^Phi and compare |Hess(L, N)| on the curve")
    t.add_argument("--tol", type=float)

    g = sub.add_parser("glue-verify", parents=[common], help="checks of the glued domain")
    g.add_argument("--domain")
    g.add_argument("--n-boundary", dest="n_boundary", type=int)
    g.add_argument("--n-scan", dest="n_scan", type=int)
    g.add_argument("--n-cap", dest="n_cap", type=int)
    g.add_argument("--search", action="store_true", default=None, help="rerun the placement search")
    return p


# -- helpers -------------------------------------------------------------------------------

def _parse_collar(spec: str, seed: int, base: dict) -> CollarSpec:
    kw = dict(base)
    for item in filter(None, (s.strip() for s in (spec or "").split(","))):
        key, _, v = item.partition("=")
        key = {"n": "n_boundary"}.get(key.strip(), key.strip())
        if key == "depths":
            kw["depths"] = tuple(float(x) for x in v.split("|"))
        elif key == "n_boundary":
            kw[key] = int(v)
        elif key in ("bisect_tol", "psd_tol"):
            kw[key] = float(v)
        else:
            raise ParamError(f"unknown collar key {key!r}")
    if "depths" in kw:
        kw["depths"] = tuple(float(x) for x in kw["depths"])
    kw["seed"] = seed
    return CollarSpec(**kw)


def _interior_points(rho, n: int, seed: int, margin: float = 1e-3):
    from .catalog.base import random_box_points

    zs, ws = [], []
    got, k = 0, 0
    while got < n:
        z, w = random_box_points(rho.bbox, 4 * n, seed + k, shrink=0.98, exclude=rho.field.exclude)
        keep = rho(z, w) < -margin
        zs.append(z[keep])
        ws.append(w[keep])
        got += int(keep.sum())
        k += 1
        if k > 50:
            raise DFForgeError("could not find interior points")
    return np.concatenate(zs)[:n], np.concatenate(ws)[:n]


def _named_curve(entry, name: str, n: int) -> CurveSamples:
    if name in entry.curves:
        return entry.curves[name](n)
    try:
        with open(name) as fh:
            data = json.load(fh)
    except OSError:
        raise ParamError(f"{entry.name} has no curve {name!r} (known: {', '.join(sorted(entry.curves)) or 'none'})")
    closed = True
    if isinstance(data, dict):
        closed = bool(data.get("closed", True))
        data = data["points"]
    x = np.asarray(data, float)
    z, w = x[:, 0] + 1j * x[:, 1], x[:, 2] + 1j * x[:, 3]
    if closed:
        tan = (np.roll(x, -1, 0) - np.roll(x, 1, 0)) / 2
    else:
        tan = np.gradient(x, axis=0)
    return CurveSamples(z=z, w=w, tangents=tan, closed=closed, name=name)


def _curve_levi_series(entry, n: int, scheme):
    if not entry.curves:
        return None
    name = "gamma" if "gamma" in entry.curves else sorted(entry.curves)[0]
    cv = entry.curves[name](n)
    lev, _ = levi_values(entry.rho, cv.z, cv.w, scheme=scheme)
    x = cv.real
    seg = np.linalg.norm(np.diff(x, axis=0), axis=-1)
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    theta = 2 * np.pi * np.arange(n) / n if cv.closed else np.linspace(0, 1, n)
    return {"curve": name, "theta": theta.tolist(), "arc_length": arc.tolist(), "levi": lev.tolist()}


# -- commands ---------------------------------------------------------------------------

def cmd_catalog(a, P, cfg, scheme, threads):
    if a.action == "list":
        return {"entries": catalog.list_entries()}, [], None
    if not a.name:
        raise ParamError(f"catalog {a.action} needs an entry name")
    if a.action == "describe":
        e = catalog.get(a.name)
        d = e.describe()
        d["known_fact_values"] = e.check_facts()
        return d, ([f"{e.name}: provenance external"] if e.provenance == "external" else []), None
    res = catalog.selftest(a.name, seed=cfg.seed)
    return res, [], res["pass"]


def cmd_levi_scan(a, P, cfg, scheme, threads):
    e = catalog.get(P["domain"])
    rep = levi_flat_scan(e.rho, int(P["n"]), flat_tol=float(P["flat_tol"]), seed=cfg.seed, threads=threads,
                         reference=e.flat_reference, scheme=scheme)
    res = rep.to_dict()
    series = {}
    s = _curve_levi_series(e, int(P["curve_points"]), scheme)
    if s:
        series["levi_along_curve"] = s
    res["series"] = series
    counts = {}
    for c in rep.components:
        counts[c["classification"]] = counts.get(c["classification"], 0) + 1
    res["component_counts"] = counts
    return res, [], None


def cmd_df_estimate(a, P, cfg, scheme, threads):
    e = catalog.get(P["domain"])
    spec = _parse_collar(P["collar"], cfg.seed, cfg.collar)
    fam = parse_family(P["family"])
    warnings = []
    if e.provenance == "external":
        warnings.append(f"{e.name}: defining function imported from the literature (provenance external)")
    if len(fam) == 1 and fam[0].label == "raw":
        est = estimate_exponent(e.rho, spec, threads, scheme)
        res = est.to_dict()
        agree = abs(est.bisect_eta - est.eta_hat) <= spec.bisect_tol and \
            est.max_pointwise_disagreement <= spec.bisect_tol
    else:
        res = estimate_index(e.rho, fam, spec, threads, scheme)
        agree = all(abs(m["bisect_eta"] - m["eta_hat"]) <= spec.bisect_tol
                    and m["max_pointwise_disagreement"] <= spec.bisect_tol for m in res["members"])
    res["cross_check_agrees"] = bool(agree)
    if "bound" in e.extras:
        b = e.extras["bound"]
        eta = res.get("eta_hat", res.get("index_estimate"))
        res["literature_bound"] = {"bound": b, "alternative_bound": 2 * b, "eta_hat_minus_bound": eta - b}
        warnings.append(f"worm bound: pi/(2 beta - pi) = {b:.6g} is used; 2 pi/(2 beta - pi) = {2 * b:.6g} "
                        "is also quoted for the same domain")
    return res, warnings, bool(agree)


def cmd_decompose_check(a, P, cfg, scheme, threads):
    from .weight import decomposition_identity_check

    e = catalog.get(P["domain"])
    z, w = _interior_points(e.rho, int(P["n"]), cfg.seed)
    res = decomposition_identity_check(e.rho, float(P["C"]), float(P["eta"]), float(P["delta"]), z, w,
                                       int(P["n_ab"]), scheme)
    res["domain"] = e.name
    res["tol"] = float(P["tol"])
    res["pass"] = bool(res["max_rel_error"] <= res["tol"])
    return res, [], res["pass"]


def cmd_lemma33(a, P, cfg, scheme, threads):
    from .weight import check_lemma33

    e = catalog.get(P["domain"])
    if "gamma" not in e.curves:
        raise ParamError(f"{e.name} has no flat curve 'gamma'")
    cv = e.curves["gamma"](int(P["n"]))
    Cs = [float(c) for c in str(P["C"]).split(",") if c.strip()]
    runs = []
    try:
        for C in Cs:
            r = check_lemma33(e.rho, C, cv, tol=float(P["tol"]), scheme=scheme)
            for key in ("L_psi", "hess_gap", "third_order"):
                r.pop(key)
            runs.append(r)
    except HypothesisError as exc:
        return {"domain": e.name, "hypothesis_error": str(exc), "pass": False}, [str(exc)], False
    ok = all(r["pass"] for r in runs)
    return {"domain": e.name, "runs": runs, "pass": ok}, [], ok


def cmd_transport(a, P, cfg, scheme, threads):
    from .transport import (corrected_defining, hess_LN_on_curve, obstruction_values, seam_check,
                            solve_on_curve, transport_residuals)

    e = catalog.get(P["domain"])
    cv = _named_curve(e, P["curve"], int(P["n"]))
    rhs = str(P["rhs"])
    normalized = bool(P.get("normalized"))
    if rhs == "obstruction":
        def h(z, w):
            return obstruction_values(e.rho, z, w, normalized, scheme)
    elif rhs.startswith("const:"):
        c = complex(rhs[6:].replace(" ", ""))

        def h(z, w):
            return np.full(np.shape(z), c, dtype=complex)
    elif rhs.startswith("file:"):
        with open(rhs[5:]) as fh:
            vals = np.asarray(json.load(fh), float)
        hv = vals[:, 0] + 1j * vals[:, 1]
        if len(hv) != len(cv.z):
            raise ParamError("rhs file must give one value per curve sample")
        from scipy.spatial import cKDTree

        tree = cKDTree(cv.real)

        def h(z, w):
            _, idx = tree.query(to_real(z, w).reshape(-1, 4))
            return hv[idx].reshape(np.shape(z))
    else:
        raise ParamError(f"unknown rhs {rhs!r}")
    tc = transversality_check(cv, e.rho, scheme=scheme)
    sol = solve_on_curve(cv, e.rho, h, scheme=scheme)
    tr = transport_residuals(sol, e.rho, scheme=scheme)
    tol = float(P["tol"])
    res = {
        "domain": e.name,
        "curve": cv.name,
        "n_curve": int(len(cv.z)),
        "rhs": rhs,
        "normalized": normalized,
        "transversality": {k: v for k, v in tc.items() if k != "per_point"},
        "max_abs_residual": tr["max_abs_residual"],
        "max_abs_u_on_curve": tr["max_abs_u_on_curve"],
        "max_abs_h": float(np.max(np.abs(sol.h_curve))),
        "seam": seam_check(sol, e.rho, scheme=scheme),
        "transport_tol": tol,
        "series": {"transport_residual": np.abs(tr["residual"]).tolist()},
    }
    ok = tr["max_abs_residual"] <= tol and tr["max_abs_u_on_curve"] <= 1e-10
    if P.get("correct"):
        ctol = float(P["correction_tol"])
        before = hess_LN_on_curve(e.rho, cv, scheme)
        cd, info = corrected_defining(e.rho, cv, scheme=scheme, normalized=normalized)
        after = hess_LN_on_curve(cd, cv, scheme)
        res["correction"] = {
            "reach": info["reach"], "r_in": info["r_in"], "r_out": info["r_out"],
            "max_hess_LN_before": float(before.max()), "max_hess_LN_after": float(after.max()),
            "reduction": float(before.max() / after.max()) if after.max() > 0 else "inf",
            "correction_tol": ctol,
        }
        res["series"]["hess_LN"] = {"before": before.tolist(), "after": after.tolist()}
        ok = ok and after.max() <= ctol
    res["pass"] = bool(ok)
    return res, [], res["pass"]


def cmd_glue_verify(a, P, cfg, scheme, threads):
    name, params = catalog.parse_name(P["domain"])
    if name != "glued":
        raise ParamError("glue-verify needs a glued:... domain")
    if P.get("search"):
        params["search"] = True
    e = catalog.make_glued(**params)
    r = glue_verify(e, int(P["n_boundary"]), int(P["n_scan"]), int(P["n_cap"]), seed=cfg.seed, threads=threads)
    r["search_log"] = e.extras.get("search_log")
    return r, [], r["pass"]


from .catalog import glue_verify  # noqa: E402

COMMANDS = {
    "catalog": cmd_catalog,
    "levi-scan": cmd_levi_scan,
    "df-estimate": cmd_df_estimate,
    "decompose-check": cmd_decompose_check,
    "lemma33-check": cmd_lemma33,
    "transport-solve": cmd_transport,
    "glue-verify": cmd_glue_verify,
}


def _resolve(a, file_cfg: dict):
    run = file_cfg.get("run", {})
    seed = getattr(a, "seed", None)
    seed = int(run.get("seed", 0)) if seed is None else seed
    threads = getattr(a, "threads", None)
    threads = run.get("threads") if threads is None else threads
    out = getattr(a, "out", None) or run.get("out")
    P = dict(DEFAULTS.get(a.command, {}))
    P.update({k.replace("-", "_"): v for k, v in file_cfg.get(a.command, {}).items()})
    for k in list(P) + ["normalized", "correct", "search"]:
        v = getattr(a, k, None)
        if v is not None:
            P[k] = v
    if a.command == "catalog":
        P = {"action": a.action, "name": a.name}
    cfg = RunConfig(command=a.command, seed=seed, threads=threads, out=out,
                    scheme=dict(file_cfg.get("scheme", {})), collar=dict(file_cfg.get("collar", {})),
                    tolerances=dict(file_cfg.get("tolerances", {})), params=P)
    return cfg, P


def run(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg, P = _resolve(a, load_config(getattr(a, "config", None)))
        scheme = DiffScheme(**cfg.scheme) if cfg.scheme else None
        results, warnings, passed = COMMANDS[a.command](a, P, cfg, scheme, cfg.threads)
    except (DFForgeError, ValueError, OSError, KeyError, TypeError) as exc:
        sys.stderr.write(f"df-forge: error: {type(exc).__name__}: {exc}\n")
        return 1
    status = "ok" if passed is None else ("pass" if passed else "fail")
    rep = make_report(cfg, results, warnings, status)
    text = write_report(rep, cfg.out)
    if not cfg.out:
        sys.stdout.write(text + "\n")
    for item in getattr(a, "csv", None) or []:
        kind, _, path = item.partition(":")
        try:
            data = emit_plot_data(rep, kind)
        except DFForgeError as exc:
            sys.stderr.write(f"df-forge: error: {exc}\n")
            return 1
        with open(path, "w") as fh:
            fh.write(data)
    return 2 if passed is False else 0


def main(argv=None):
    raise SystemExit(run(argv))


if __name__ == "__main__":
    main()
