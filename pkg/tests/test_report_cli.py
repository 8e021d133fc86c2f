import csv
import json

import jsonschema
import pytest

from gravgla import cli
from gravgla import report as rep

FAST = ["identities.jacobi", "identities.anchor", "identities.ideal_closure", "mc.*", "ranks.clifford_group"]


def test_registry_covers_all_criteria():
    assert {c.criterion for c in rep.CHECKS} == set(range(1, 8))
    assert len({c.name for c in rep.CHECKS}) == len(rep.CHECKS)


def test_select():
    assert [c.name for c in rep.select(["ranks"])] == [c.name for c in rep.CHECKS if c.name.startswith("ranks.")]
    assert [c.name for c in rep.select(["*.jacobi"])] == ["identities.jacobi"]
    assert rep.select(["nothing"]) == []
    assert len(rep.select(None)) == len(rep.CHECKS)


def test_report_validates_and_is_deterministic():
    cfg = rep.load_config(seed=7)
    a = rep.run_suite(cfg, only=FAST)
    b = rep.run_suite(cfg, only=FAST)
    jsonschema.validate(a, rep.REPORT_SCHEMA)
    assert json.dumps(rep.strip_timing(a), sort_keys=True) == json.dumps(rep.strip_timing(b), sort_keys=True)
    assert a["summary"] == {"passed": len(a["checks"]), "failed": 0}


def test_schema_rejects_malformed():
    bad = {"schema_version": rep.SCHEMA_VERSION, "seed": 0, "config": {}, "summary": {"passed": 0, "failed": 0},
           "checks": [{"name": "x", "criterion": 9, "reference": "", "status": "pass", "witness": {}, "runtime": 0}]}
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(bad, rep.REPORT_SCHEMA)


def test_parallel_matches_serial():
    s = rep.run_suite(rep.load_config(), only=FAST)
    p = rep.run_suite(rep.load_config(jobs=2), only=FAST)
    assert [c["name"] for c in s["checks"]] == [c["name"] for c in p["checks"]]
    assert [c["witness"] for c in s["checks"]] == [c["witness"] for c in p["checks"]]


def test_tamper_is_caught():
    r = rep.run_suite(rep.load_config(tamper_ideal=True), only=["identities.ideal_closure"])
    (c,) = r["checks"]
    assert c["status"] == "fail"
    assert c["witness"]


def test_crashing_check_is_a_failure(monkeypatch):
    def boom(cfg):
        raise RuntimeError("kaput")

    monkeypatch.setattr(rep, "CHECKS", rep.CHECKS + [rep.Check("ranks.boom", 1, "always crashes", boom)])
    r = rep.run_suite(rep.load_config(), only=["ranks.boom"])
    assert r["checks"][0]["status"] == "fail"
    assert "kaput" in r["checks"][0]["witness"]["error"]


@pytest.mark.parametrize("bad", [{"seed": "x"}, {"jobs": 0}, {"colour": 1}, {"tamper_ideal": 1}, {"mc_order": 40}])
def test_config_validation(tmp_path, bad):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(bad))
    with pytest.raises(rep.ConfigError):
        rep.load_config(str(p))


def test_config_file_and_override(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"seed": 3, "samples": 5}))
    cfg = rep.load_config(str(p), seed=11)
    assert cfg["seed"] == 11 and cfg["samples"] == 5


def test_cli_verify_exit_codes(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert cli.main(["--seed", "2", "verify", "--only", "identities.jacobi", "--report", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["seed"] == 2 and [c["name"] for c in data["checks"]] == ["identities.jacobi"]
    assert cli.main(["verify", "--tamper-ideal", "--only", "identities.ideal_closure"]) == 1
    assert cli.main(["verify", "--only", "no.such.check"]) == 2
    assert cli.main(["verify", "--jobs", "0", "--only", "mc"]) == 2
    assert cli.main(["frobnicate"]) == 2
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    assert cli.main(["verify", "--config", str(cfg)]) == 2


def test_cli_ranks(capsys):
    assert cli.main(["ranks"]) == 0
    t = json.loads(capsys.readouterr().out)
    assert t["E_G"] == [11, 33, 23, 5, 0]


def test_cli_gauge(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert cli.main(["gauge", "--out", str(out)]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["ranks"] == [11, 33, 23, 5, 0] and res["condition_a"] and res["condition_c"]
    assert out.exists()
    bad = tmp_path / "h.json"
    bad.write_text("[1, 2")
    assert cli.main(["gauge", "--h-file", str(bad)]) == 2


def test_cli_evolve_csv(tmp_path, capsys):
    path = tmp_path / "e.csv"
    assert cli.main(["--seed", "1", "evolve", "--grid", "16", "--steps", "20", "--csv", str(path)]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["relative_drift"] < 1e-10
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["step", "time", "energy"] and len(rows) >= 21
    assert cli.main(["evolve", "--grid", "16", "--steps", "2", "--cfl", "5"]) == 2
    assert cli.main(["evolve", "--degree", "7"]) == 2


@pytest.mark.parametrize("example", ["abelian", "endo", "rees"])
def test_cli_mc(example, capsys):
    assert cli.main(["mc", "--example", example, "--order", "4"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert all(res["mc_mod_s^K+1"].values())


def test_cli_mc_bad_example():
    assert cli.main(["mc", "--example", "nope"]) == 2


def test_cli_ricci(capsys):
    assert cli.main(["ricci", "--background", "ppwave", "--H", "x1^2 + x2^2"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert not res["mc_defect_zero"] and not res["ricci_zero"]
    assert cli.main(["ricci", "--background", "ppwave", "--H", "x1^^2"]) == 2
