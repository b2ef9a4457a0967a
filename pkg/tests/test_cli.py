import json
import math

import numpy as np
import pytest

from bellscope.catalog import named_point
from bellscope.cli import EXIT_INVALID, EXIT_OK, EXIT_USAGE, load_config, main
from bellscope.corrgeom import correlation_to_json, uniform


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_OK, err
    return json.loads(out)


def _write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(path)


def test_classify_hardy_and_uniform(tmp_path, capsys):
    f = _write(tmp_path, "hardy.json", correlation_to_json(named_point("hardy")[1]))
    assert run_json(capsys, "classify", f)["class"] == "3a"
    f = _write(tmp_path, "u.json", correlation_to_json(uniform()))
    out = run_json(capsys, "classify", f)
    assert out["class"] == "none" and out["zeros"] == []
    assert out["validity"] == {"nonneg": True, "normalized": True, "no_signaling": True}


def test_classify_signaling_table(tmp_path, capsys):
    p = np.full((2, 2, 2, 2), 0.25)
    p[:, :, 0, 0] = 0
    p[0, 0, 0, 0] = 1
    table = p.transpose(3, 1, 2, 0).reshape(4, 4)
    f = _write(tmp_path, "sig.json", {"p": table.tolist()})
    code, out, _ = run(capsys, "classify", f)
    assert code == EXIT_INVALID
    assert json.loads(out)["validity"]["no_signaling"] is False


def test_classify_errors(tmp_path, capsys):
    assert run(capsys, "classify", _write(tmp_path, "bad.json", "{not json"))[0] == EXIT_USAGE
    assert run(capsys, "classify", _write(tmp_path, "shape.json", {"p": [[1, 0]]}))[0] == EXIT_INVALID
    assert run(capsys, "classify", str(tmp_path / "missing.json"))[0] == EXIT_USAGE


def test_named_points(capsys):
    out = run_json(capsys, "named", "--point", "q")
    assert {"kappa1", "kappa2", "kappa3"} <= set(out["constants"])
    assert out["chsh"] == pytest.approx(2.26977, abs=1e-5)
    out = run_json(capsys, "named", "--point", "pr", "--emit", "both")
    assert np.allclose(out["correlation"]["p"], named_point("pr")[1].table())
    assert out["strategy"] is None
    out = run_json(capsys, "named", "--point", "cabello")
    assert out["correlation"]["p"][0][1] == pytest.approx(0.2770, abs=5e-5)
    assert run(capsys, "named", "--point", "bogus")[0] == EXIT_USAGE


def test_maximize_and_mes(capsys):
    assert run_json(capsys, "maximize", "--class", "2b")["value"] == 2.5
    assert run(capsys, "maximize", "--class", "4a")[0] == EXIT_INVALID
    out = run_json(capsys, "mes", "--d", "7")
    assert out["value"] == pytest.approx(2 * math.sqrt(2) * 6 / 7 + 2 / 7, abs=1e-12)
    assert out["achieved"] == pytest.approx(out["value"], abs=1e-9)
    assert len(out["decomposition"]) == 4
    assert run(capsys, "mes", "--d", "1")[0] == EXIT_INVALID


def test_certify(capsys):
    out = run_json(capsys, "certify-nonexposed", "--point", "q3")
    assert out["certified"] and out["dual_value"] == pytest.approx(1, abs=1e-12)
    assert out["z"] == pytest.approx([1 / math.sqrt(6)] * 2)
    assert run(capsys, "certify-nonexposed", "--point", "pr")[0] == EXIT_USAGE


def test_scan_writes_csv_and_manifest(tmp_path, capsys):
    csv = tmp_path / "scan.csv"
    out = run_json(capsys, "scan", "--class", "3a", "--grid", "60", "--out", str(csv))
    assert out["scan_max"] <= out["closed_form"] + 1e-9
    manifest = json.loads((tmp_path / "scan.csv.manifest.json").read_text())
    assert manifest["command"] == "scan" and manifest["outputs"] == [str(csv)]
    assert manifest["tolerances"] == {"tol": 1e-9}
    assert {"numpy", "python", "bellscope"} <= set(manifest["versions"])


def test_robust_and_curve(tmp_path, capsys):
    out = run_json(capsys, "robust", "--point", "q2", "--chsh-grid", "2.5:2.5:1", "--level", "3")
    assert out["rows"][0]["bound"] >= 0.99
    code, out, err = run(capsys, "robust", "--point", "q2", "--chsh-grid", "2.7:2.7:1")
    assert code == EXIT_OK and math.isnan(json.loads(out)["rows"][0]["bound"])
    assert "warning" in err
    assert run(capsys, "robust", "--point", "pr", "--chsh-grid", "2:2:1")[0] == EXIT_USAGE
    csv = tmp_path / "curve.csv"
    out = run_json(capsys, "curve", "--functional", "0000+1110+1101", "--level", "1",
                   "--grid", "0:0.2:2", "--out", str(csv))
    assert len(out["points"]) == 2
    assert len(csv.read_text().splitlines()) == 3


def test_idempotent_output(capsys):
    first = run(capsys, "named", "--point", "q4", "--emit", "both")
    second = run(capsys, "named", "--point", "q4", "--emit", "both")
    assert first == second


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == EXIT_USAGE
    assert run(capsys, "--tol", "-1", "mes", "--d", "2")[0] == EXIT_USAGE


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text("# defaults\ntol = 1e-6\nseed = 4\n")
    assert load_config(str(cfg)) == {"tol": 1e-6, "seed": 4}
    js = tmp_path / "cfg.json"
    js.write_text('{"tol": 1e-7}')
    assert load_config(str(js)) == {"tol": 1e-7}
    man = tmp_path / "m.json"
    run_json(capsys, "--config", str(cfg), "--manifest", str(man), "mes", "--d", "2")
    m = json.loads(man.read_text())
    assert m["tolerances"]["tol"] == 1e-6 and m["parameters"]["seed"] == 4
