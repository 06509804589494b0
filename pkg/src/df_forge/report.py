"""Run configuration, JSON report envelopes and CSV plot-data export."""
from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .errors import ParamError, SeriesMissing

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

__all__ = ["SCHEMA", "RunConfig", "load_config", "make_report", "body_bytes", "write_report", "to_jsonable",
           "emit_plot_data", "PLOT_KINDS"]

SCHEMA = 1


@dataclass
class RunConfig:
    """Everything that determines a run.  Serialized into every report."""

    command: str = ""
    seed: int = 0
    threads: Optional[int] = None
    out: Optional[str] = None
    scheme: dict = field(default_factory=dict)
    collar: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = asdict(self)
        # thread count and output path do not change results; keep them out of the body
        d.pop("threads")
        d.pop("out")
        return to_jsonable(d)


def load_config(path: Optional[str]) -> dict:
    """Read a TOML config file: [run] seed/threads/out, [scheme], [collar], [tolerances], [<command>]."""
    if not path:
        return {}
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def to_jsonable(x):
    """Plain JSON types; non-finite floats become strings so output is strict JSON."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": to_jsonable(x.real), "im": to_jsonable(x.imag)}
    if x is None or isinstance(x, (int, str)):
        return x
    return str(x)


def make_report(config: RunConfig, results: dict, warnings: list, status: str) -> dict:
    """Envelope: the body (schema, config, results, warnings, status) plus a separate header."""
    return {
        "header": {"created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
                   "df_forge_version": __version__},
        "schema": SCHEMA,
        "command": config.command,
        "status": status,
        "config": config.as_dict(),
        "results": to_jsonable(results),
        "warnings": [str(w) for w in warnings],
    }


def body_bytes(report: dict) -> bytes:
    """Canonical serialization of everything except the header."""
    body = {k: v for k, v in report.items() if k != "header"}
    return json.dumps(body, sort_keys=True, separators=(",", ":"), allow_nan=False).encode()


def write_report(report: dict, path: Optional[str]) -> str:
    text = json.dumps(report, sort_keys=True, indent=1, allow_nan=False)
    if path:
        d = os.path.dirname(path)
        if d:
            os.makedirs(d, exist_ok=True)
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


# -- plot data ------------------------------------------------------------------------

def _levi_along_curve(res):
    s = res.get("series", {}).get("levi_along_curve")
    if not s:
        return None
    return ["theta", "arc_length", "levi"], list(zip(s["theta"], s["arc_length"], s["levi"]))


def _eta_vs_depth(res):
    rows = res.get("per_depth")
    if rows is None and res.get("members"):
        rows = res["members"][0].get("per_depth")
    if not rows:
        return None
    out = [(r["depth_fraction"], math.log10(r["depth_fraction"]), r["eta_min"]) for r in rows
           if r.get("eta_min") is not None]
    out.sort(key=lambda t: t[0])
    return ["depth_fraction", "log10_depth", "eta_min"], out


def _transport_residual(res):
    s = res.get("series", {}).get("transport_residual")
    if not s:
        return None
    return ["index", "abs_residual"], list(enumerate(s))


def _hess_ln(res):
    s = res.get("series", {}).get("hess_LN")
    if not s:
        return None
    return ["index", "before", "after"], list(zip(range(len(s["before"])), s["before"], s["after"]))


PLOT_KINDS = {
    "levi_along_curve": _levi_along_curve,
    "eta_vs_depth": _eta_vs_depth,
    "transport_residual": _transport_residual,
    "hess_LN": _hess_ln,
}


def emit_plot_data(report: dict, kind: str) -> str:
    """CSV text (header row + data) for one series of a report.

    Kinds and columns:
      levi_along_curve   theta, arc_length, levi          (levi-scan with a named curve)
      eta_vs_depth       depth_fraction, log10_depth, eta_min   (df-estimate; rows by increasing depth)
      transport_residual index, abs_residual             (transport-solve)
      hess_LN            index, before, after            (transport-solve --correct)
    """
    if kind not in PLOT_KINDS:
        raise ParamError(f"unknown plot kind {kind!r}; known: {', '.join(PLOT_KINDS)}")
    res = (report or {}).get("results") or {}
    got = PLOT_KINDS[kind](res)
    if not got or not got[1]:
        raise SeriesMissing(f"report has no {kind!r} series")
    header, rows = got
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for row in rows:
        wr.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return buf.getvalue()
