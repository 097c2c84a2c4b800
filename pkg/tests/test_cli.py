import json
import os

from ellrank.cli import main


def test_ap_writes_and_reuses_cache(tmp_path, capsys):
    out = str(tmp_path)
    assert main(["--out", out, "--set", "p_max=100", "ap"]) == 0
    first = open(os.path.join(out, "ap_11a.csv"), "rb").read()
    assert first.decode().splitlines()[0] == "p,kind,ap"
    assert len(first.decode().strip().splitlines()) == 26  # header + 25 primes
    capsys.readouterr()
    # rerun: identical bytes, cache reused
    assert main(["--out", out, "--set", "p_max=100", "ap"]) == 0
    assert "reusing" in capsys.readouterr().out
    assert open(os.path.join(out, "ap_11a.csv"), "rb").read() == first
    # smaller p_max: cache reused, no recompute
    assert main(["--out", out, "--set", "p_max=50", "ap"]) == 0
    assert "reusing" in capsys.readouterr().out
    assert open(os.path.join(out, "ap_11a.csv"), "rb").read() == first


def test_ap_csv_content(tmp_path):
    out = str(tmp_path)
    main(["--out", out, "--set", "p_max=12", "ap"])
    rows = open(os.path.join(out, "ap_11a.csv")).read().strip().splitlines()
    assert rows[1] == "2,good,-2"
    assert rows[-1] == "11,split-multiplicative,1"


def test_verify_only_and_report(tmp_path, capsys):
    out = str(tmp_path)
    rc = main(["--out", out, "--only", "epstein_residue", "verify"])
    assert rc == 0
    rep = json.load(open(os.path.join(out, "report.json")))
    assert rep["all_passed"] is True
    assert [r["name"] for r in rep["checks"]] == ["epstein_residue"]
    rec = rep["checks"][0]
    assert set(rec) >= {"name", "lhs", "rhs", "diff", "tolerance", "passed", "pipelines"}
    assert os.path.exists(os.path.join(out, "timing.json"))
    capsys.readouterr()
    assert main(["--out", out, "report"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_verify_json_indent_same_content(tmp_path):
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    main(["--out", out1, "--only", "epstein_residue", "verify"])
    main(["--out", out2, "--only", "epstein_residue", "verify", "--json-indent", "2"])
    r1 = json.load(open(os.path.join(out1, "report.json")))
    r2 = json.load(open(os.path.join(out2, "report.json")))
    r1["config"].pop("out"); r2["config"].pop("out")
    assert r1["checks"] == r2["checks"]
    raw1 = open(os.path.join(out1, "report.json")).read()
    raw2 = open(os.path.join(out2, "report.json")).read()
    assert raw1 != raw2          # pretty-printing changed the bytes only


def test_lvalue_rows(tmp_path, capsys):
    assert main(["lvalue", "-s", "2.0"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert out[0] == "pipeline,s,value,error"
    assert len(out) == 3
    assert out[1].startswith("direct-series,2,")
    assert out[2].startswith("afe,2,")
    # the two rows agree at the direct pipeline's accuracy
    v1 = float(out[1].split(",")[2])
    v2 = float(out[2].split(",")[2])
    assert abs(v1 - v2) < 1e-3 * abs(v2)


def test_lvalue_pole_warning(capsys):
    # isogenous pair at s = 1: pole notice, exit 0
    rc = main(["--set", "curve2.label=11a", "--set", "curve2.ainvs=0,-1,1,-10,-20",
               "--set", "curve2.conductor=11", "lvalue", "-s", "1.0"])
    assert rc == 0
    assert "pole" in capsys.readouterr().out


def test_petersson_command(capsys):
    rc = main(["--set", "curve2.label=11a", "--set", "curve2.ainvs=0,-1,1,-10,-20",
               "--set", "curve2.conductor=11", "--set", "depth=1", "petersson"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "0.0039" in out


def test_eisenstein_command(capsys):
    rc = main(["eisenstein", "--z", "0.0,1.0", "-s", "2.0"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "6.02681" in out


def test_usage_errors(tmp_path):
    assert main(["--set", "nonsense", "ap"]) == 2
    assert main(["--only", "not_a_check", "verify"]) == 2
    assert main(["--out", str(tmp_path), "report"]) == 2
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("this line has no equals sign\n")
    assert main(["--config", str(cfg), "ap"]) == 2
