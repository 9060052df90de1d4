import json
from pathlib import Path

import pytest

from grwcurv.cli import main, run_classify, run_sweep, run_verify
from grwcurv.config import ConfigError, load_config, parse_config
from grwcurv.report import payload, to_csv, to_json

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

FAILING = """
conditions = ["A1", "PSEUDO"]
[manifold]
kind = "field"
id = "random"
dim = 4
samples = 2
seed = 3
"""


def _write(tmp_path, text, name="cfg.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


@pytest.mark.parametrize("name", ["cor42.toml", "flat.toml", "jordan_fiber.toml"])
def test_classify_examples_pass(name, capsys):
    assert main(["classify", "--config", str(CONFIGS / name)]) == 0
    assert "verdict: pass" in capsys.readouterr().out


def test_flat_fit_is_degenerate_pass():
    rep = run_classify(load_config(CONFIGS / "flat.toml"))
    a1 = rep["points"][0]["conditions"]["A1"]
    assert a1["status"] == "degenerate" and a1["holds"]


def test_classify_failing_config_exits_2(tmp_path, capsys):
    assert main(["classify", "--config", _write(tmp_path, FAILING)]) == 2
    assert "verdict: fail" in capsys.readouterr().out


@pytest.mark.parametrize("text", [
    FAILING + "\nbogus = 1\n",
    FAILING.replace('id = "random"', 'id = "random"\ncolour = "red"'),
    FAILING.replace('"A1"', '"Z9"'),
    FAILING.replace('kind = "field"', 'kind = "torus"'),
])
def test_config_errors_exit_1(tmp_path, text, capsys):
    assert main(["classify", "--config", _write(tmp_path, text)]) == 1
    assert "error" in capsys.readouterr().err


def test_unknown_key_message():
    with pytest.raises(ConfigError, match="bogus"):
        parse_config({"conditions": ["A1"], "bogus": 1,
                      "manifold": {"kind": "field", "id": "flat", "dim": 4}})


def test_bad_warping_family_and_empty_grid(tmp_path):
    text = (CONFIGS / "sweep_quadratic.toml").read_text()
    assert main(["sweep", "--config", _write(tmp_path, text.replace("quadratic", "cubic"))]) == 1
    assert main(["sweep", "--config",
                 _write(tmp_path, text.replace("[1.0, 2.0, 3.0]", "[]"))]) == 1


def test_missing_config_file(tmp_path):
    assert main(["classify", "--config", str(tmp_path / "absent.toml")]) == 1


def test_verify_rejects_tol():
    assert main(["verify", "--suite", "blocks", "--tol", "1e-3"]) == 1


def test_verify_single_suite_json(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--suite", "thm51", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["verdict"] == "pass"
    assert {"suite", "verdict", "checks"} <= set(doc["suites"][0])


@pytest.mark.parametrize("fmt", ["json", "csv", "table"])
def test_output_formats(tmp_path, fmt, capsys):
    out = tmp_path / f"r.{fmt}"
    assert main(["classify", "--config", str(CONFIGS / "cor42.toml"),
                 "--format", fmt, "--out", str(out)]) == 0
    text = out.read_text()
    if fmt == "json":
        assert json.loads(text)["verdict"] == "pass"
    elif fmt == "csv":
        assert text.splitlines()[0].count(",") >= 2
    else:
        assert "A1" in text


def test_sweep_rows_and_L(capsys):
    rep = run_sweep(load_config(CONFIGS / "sweep_exponential.toml"))
    assert rep["verdict"] == "pass" and len(rep["rows"]) == 20
    Ls = [r["A1_L"] for r in rep["rows"]]
    assert all(abs(L - 0.25) <= 1e-9 for L in Ls)


def test_deterministic_across_jobs(monkeypatch):
    cfg = load_config(CONFIGS / "cor42.toml")
    a = to_json(payload(run_classify(cfg, jobs=1)))
    b = to_json(payload(run_classify(cfg, jobs=3)))
    assert a == b
    monkeypatch.setenv("GRW_JOBS", "2")
    c = to_json(payload(run_verify("blocks", seed=0, jobs=2)))
    d = to_json(payload(run_verify("blocks", seed=0, jobs=1)))
    assert c == d


def test_json_uses_full_precision():
    assert to_json({"x": 0.1}) == '{\n  "x": 0.10000000000000001\n}'
    assert to_csv([{"a": 1 / 3}], ["a"]).splitlines()[1] == "0.33333333333333331"
