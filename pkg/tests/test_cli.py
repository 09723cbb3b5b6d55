import json

import pytest

from trisector.cli import RunConfig, load_config, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_series_conjugate(capsys):
    code, out, _ = run(capsys, "series", "--branch", "conjugate", "--order", "4")
    assert code == 0
    rep = json.loads(out)
    assert rep["m"]["4"] == "-351/704-189/704*sqrt3"
    assert rep["residuals"]["vanish"] is True
    assert rep["config"]["order"] == 4


def test_series_trisector_m2(capsys):
    code, out, _ = run(capsys, "series", "--branch", "trisector", "--order", "2")
    assert code == 0
    assert json.loads(out)["m"]["2"] == "-3/8+3/8*sqrt3"


@pytest.mark.parametrize("argv", [
    ["series", "--order", "3"],
    ["verify", "--tol", "0"],
    ["trace", "--iterations", "-1"],
    ["verify", "--only", "nonsense"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_trace_outputs_are_deterministic(tmp_path, capsys):
    paths = []
    for k in range(2):
        csv, svg = tmp_path / f"a{k}.csv", tmp_path / f"a{k}.svg"
        code, out, _ = run(capsys, "trace", "--iterations", "5", "--csv", str(csv),
                           "--svg", str(svg), "--emit-circles", "12", "--events")
        assert code == 0
        paths.append((csv, svg, out))
    (c0, s0, o0), (c1, s1, o1) = paths
    assert c0.read_bytes() == c1.read_bytes()
    assert s0.read_bytes() == s1.read_bytes()
    assert o0.replace("a0.", "a1.") == o1
    text = s0.read_text()
    assert text.startswith("<?xml") and 'version="1.1"' in text
    assert text.count("<ellipse") == 12
    header = c0.read_text().splitlines()[:2]
    assert header[0].startswith("# config:") and header[1] == "t,x,y,ux,uy"


def test_trace_seed_only(tmp_path, capsys):
    csv = tmp_path / "p.csv"
    code, out, _ = run(capsys, "trace", "--iterations", "0", "--csv", str(csv))
    assert code == 0
    rows = [r.split(",") for r in csv.read_text().splitlines()[2:]]
    for t, x, y, *_ in rows:
        assert float(x) == float(t)
        assert float(y) == pytest.approx(1 / 3 - float(t) ** 2, abs=1e-15)


def test_trace_io_failure(tmp_path, capsys):
    code, _, err = run(capsys, "trace", "--iterations", "0", "--csv",
                       str(tmp_path / "missing" / "x.csv"))
    assert code == 1 and "error" in err


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("branch = trisector\norder = 6  # comment\n")
    assert load_config(cfg) == {"branch": "trisector", "order": 6}
    code, out, _ = run(capsys, "series", "--config", str(cfg), "--order", "4")
    rep = json.loads(out)
    assert code == 0 and rep["branch"] == "trisector" and rep["order"] == 4
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    with pytest.raises(SystemExit):
        main(["series", "--config", str(bad)])


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(order=5).validate()
    with pytest.raises(ValueError):
        RunConfig(event_tol=0.0).validate()
    RunConfig().validate()


def test_analyze_commands(tmp_path, capsys):
    code, out, _ = run(capsys, "analyze", "census", "--iterations", "6",
                       "--domain", "-0.4", "0.4", "--depth", "3", "--out", str(tmp_path))
    assert code == 0 and json.loads(out)["census"]["verdict"] == "pass"
    assert (tmp_path / "analyze_census.json").read_text() == out
    code, out, _ = run(capsys, "analyze", "profile", "--point", "0.92795", "-2.82373")
    assert json.loads(out)["global"]["d2"] == pytest.approx(3.03018, abs=1e-2)
    code, out, _ = run(capsys, "analyze", "annihilator", "--degree", "2")
    assert json.loads(out)["annihilator"]["nullity"] == 0


def test_verify_subset(capsys):
    code, out, err = run(capsys, "verify", "--only", "census", "--depth", "2")
    rep = json.loads(out)
    assert code == 0 and [v["name"] for v in rep["verdicts"]] == ["crossing census"]
    assert "PASS" in err
