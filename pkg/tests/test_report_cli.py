import json
import math

import numpy as np
import pytest

from df_forge.cli import run
from df_forge.errors import ParamError, SeriesMissing
from df_forge.report import RunConfig, body_bytes, emit_plot_data, load_config, make_report, to_jsonable


def _run(tmp_path, name, *args):
    out = tmp_path / f"{name}.json"
    code = run(list(args) + ["--out", str(out)])
    rep = json.loads(out.read_text()) if out.exists() else None
    return code, rep


def test_to_jsonable():
    d = to_jsonable({"a": np.float64(1.5), "b": np.array([1, 2]), "c": float("inf"), "d": float("nan"),
                     "e": 1 + 2j, "f": np.bool_(True), 3: (np.int64(4),)})
    assert d == {"a": 1.5, "b": [1, 2], "c": "inf", "d": "nan", "e": {"re": 1.0, "im": 2.0}, "f": True, "3": [4]}
    json.dumps(d, allow_nan=False)


def test_body_excludes_header_and_runtime_only_settings():
    c1 = RunConfig(command="x", seed=1, threads=1, out="a.json")
    c2 = RunConfig(command="x", seed=1, threads=8, out="b.json")
    r1 = make_report(c1, {"v": 1.0}, [], "ok")
    r2 = make_report(c2, {"v": 1.0}, [], "ok")
    r2["header"]["created"] = "later"
    assert body_bytes(r1) == body_bytes(r2)
    assert body_bytes(r1) != body_bytes(make_report(RunConfig(command="x", seed=2), {"v": 1.0}, [], "ok"))


def test_emit_plot_data_and_missing_series():
    rep = {"results": {"per_depth": [{"depth_fraction": 1e-3, "eta_min": 0.9},
                                     {"depth_fraction": 1e-2, "eta_min": 0.8}]}}
    text = emit_plot_data(rep, "eta_vs_depth")
    lines = text.strip().split("\n")
    assert lines[0] == "depth_fraction,log10_depth,eta_min"
    assert lines[1].startswith("0.001,-3.0,0.9")
    with pytest.raises(SeriesMissing):
        emit_plot_data(rep, "transport_residual")
    with pytest.raises(ParamError):
        emit_plot_data(rep, "bogus")


def test_cli_determinism(tmp_path):
    args = ["df-estimate", "--domain", "exp_flat_tilted", "--collar", "n=150,depths=1e-2|1e-4", "--seed", "3"]
    c1, r1 = _run(tmp_path, "a", *args, "--threads", "1")
    c2, r2 = _run(tmp_path, "b", *args, "--threads", "4")
    assert c1 == c2 == 0
    assert body_bytes(r1) == body_bytes(r2)
    c3, r3 = _run(tmp_path, "c", *args[:-1], "4")
    assert body_bytes(r1) != body_bytes(r3)


def test_cli_exit_codes(tmp_path, capsys):
    assert run(["catalog", "list"]) == 0
    assert run(["levi-scan", "--bogus"]) == 1
    assert run(["df-estimate", "--domain", "nope"]) == 1
    assert run([]) == 1
    # a check that runs and fails exits 2
    code, rep = _run(tmp_path, "t", "transport-solve", "--domain", "exp_flat_perturbed", "--tol", "1e-30")
    assert code == 2 and rep["status"] == "fail"
    code, rep = _run(tmp_path, "l", "lemma33-check", "--domain", "exp_flat_perturbed")
    assert code == 2 and "hypothesis_error" in rep["results"]


def test_cli_config_merge_and_csv(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('[run]\nseed = 5\n\n[scheme]\nbase_step = 0.002\n\n[decompose-check]\nn = 30\nn_ab = 8\n')
    assert load_config(str(cfg))["run"]["seed"] == 5
    code, rep = _run(tmp_path, "d", "decompose-check", "--config", str(cfg), "--domain", "ball", "--n-ab", "4")
    assert code == 0
    assert rep["config"]["seed"] == 5
    assert rep["config"]["scheme"] == {"base_step": 0.002}
    assert rep["config"]["params"]["n"] == 30 and rep["config"]["params"]["n_ab"] == 4
    assert rep["results"]["max_rel_error"] <= 1e-4
    csv = tmp_path / "res.csv"
    code = run(["transport-solve", "--domain", "exp_flat", "--rhs", "const:1", "--csv", f"transport_residual:{csv}",
                "--out", str(tmp_path / "t.json")])
    assert code == 0
    rows = csv.read_text().strip().split("\n")
    assert rows[0] == "index,abs_residual" and len(rows) == 129
    # requesting a series the command does not produce is a usage error
    code = run(["transport-solve", "--domain", "exp_flat", "--rhs", "const:1", "--csv", f"hess_LN:{csv}",
                "--out", str(tmp_path / "t2.json")])
    assert code == 1


def test_cli_df_estimate_worm_notes(tmp_path):
    code, rep = _run(tmp_path, "w", "df-estimate", "--domain", "worm", "--collar", "n=200,depths=1e-2|1e-3")
    assert code == 0
    lb = rep["results"]["literature_bound"]
    assert math.isclose(lb["bound"], 0.5) and math.isclose(lb["alternative_bound"], 1.0)
    assert any("provenance external" in w for w in rep["warnings"])
