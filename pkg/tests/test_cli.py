import json

import pytest

from prtlab.cli import main
from prtlab.galois import FieldSpec, gf_mul

MARCH_A = "{a(w0);u(r0,w1);d(r1,w0)}"


def write_config(tmp_path, **overrides):
    doc = {
        "memory": {"n": 16, "m": 1, "ports": 1},
        "lfsr": {"taps": [1, 1]},
        "schedule": [{"init": [0, 1]}, {"init": [1, 0]}, {"init": [1, 1]}],
        "universe": {"classes": ["StuckAt"]},
    }
    doc.update(overrides)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_field_mul_table(capsys):
    assert main(["field", "mul-table", "--m", "4", "--poly", "0x13"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 17
    spec = FieldSpec(4, 0x13)
    for a, line in enumerate(lines[1:]):
        cells = line.split("|")[1].split()
        assert [int(c, 16) for c in cells] == [gf_mul(spec, a, b) for b in range(16)]


def test_field_irreducible_and_info(capsys):
    assert main(["field", "irreducible", "--poly", "0x13"]) == 0
    assert main(["field", "irreducible", "--poly", "0x15"]) == 1
    assert main(["field", "info", "--m", "4"]) == 0
    assert "2->9" in capsys.readouterr().out


def test_synth_to_file(tmp_path):
    out = tmp_path / "net.txt"
    assert main(["synth", "--m", "4", "--poly", "0x13", "--const", "2", "--out", str(out)]) == 0
    text = out.read_text()
    assert "1 XOR gates" in text and "t0 = x0 ^ x3" in text


def test_lfsr_commands(capsys):
    assert main(["lfsr", "period", "--taps", "1,1", "--init", "0,1"]) == 0
    assert "period 3" in capsys.readouterr().out
    assert main(["lfsr", "period", "--m", "4", "--poly", "0x13", "--generator", "1,2,2", "--init", "0,1"]) == 0
    assert "period 255" in capsys.readouterr().out
    assert main(["lfsr", "expected-final", "--taps", "1,1", "--init", "0,1", "--n", "6"]) == 0
    assert "Fin* [1, 1]" in capsys.readouterr().out
    assert main(["lfsr", "sequence", "--taps", "1,1", "--init", "0,1", "--n", "6"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "0 1 1 0 1 1"
    assert main(["lfsr", "period", "--taps", "1,1", "--generator", "1,1,1", "--init", "0,1"]) == 2


def test_run_march(capsys):
    assert main(["run-march", "--n", "16", "--test", MARCH_A]) == 0
    assert main(["run-march", "--n", "16", "--test", MARCH_A, "--fault", "StuckAt:cell=3,bit=0,value=1"]) == 1
    assert "addr 3" in capsys.readouterr().out
    assert main(["run-march", "--n", "16", "--test", "{u(x0)}"]) == 2
    assert main(["run-march", "--n", "16", "--test", MARCH_A, "--fault", "Bogus:x=1"]) == 2


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


def test_run_prt(tmp_path, capsys):
    cfg = write_config(tmp_path)
    assert main(["run-prt", "--config", cfg]) == 0
    assert main(["run-prt", "--config", cfg, "--fault", "StuckAt:cell=0,bit=0,value=0", "--json"]) == 1
    out = json.loads(capsys.readouterr().out.split("PASS\n")[-1])
    assert out["first_failure"] == 1


def test_campaign_threshold_and_compare(tmp_path, capsys):
    cfg = write_config(tmp_path)
    full, one = tmp_path / "full.json", tmp_path / "one.json"
    assert main(["campaign", "--config", cfg, "--out", str(full), "--min-coverage", "1.0",
                 "--csv", str(tmp_path / "rows.csv")]) == 0
    single = write_config(tmp_path, schedule=[{"init": [0, 1]}])
    assert main(["campaign", "--config", single, "--out", str(one), "--min-coverage", "1.0"]) == 1
    assert (tmp_path / "rows.csv").read_text().startswith("fault_id,class,params,detected,detected_by")
    capsys.readouterr()
    assert main(["compare", str(full), str(one)]) == 0
    assert "StuckAt" in capsys.readouterr().out


def test_campaign_march_and_determinism(tmp_path):
    cfg = write_config(tmp_path)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["campaign", "--config", cfg, "--march", MARCH_A, "--out", str(a), "--no-timing"]) == 0
    assert main(["campaign", "--config", cfg, "--march", MARCH_A, "--out", str(b), "--no-timing",
                 "--workers", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["summary"]["StuckAt"]["coverage"] == 1.0


def test_campaign_config_errors(tmp_path):
    bad = write_config(tmp_path, extra=True)
    assert main(["campaign", "--config", bad]) == 2
    no_universe = tmp_path / "nu.json"
    no_universe.write_text(json.dumps({"memory": {"n": 8}, "lfsr": {"taps": [1, 1]},
                                       "schedule": [{"init": [0, 1]}]}))
    assert main(["campaign", "--config", str(no_universe)]) == 2
    assert main(["campaign", "--config", str(tmp_path / "missing.json")]) == 2


def test_tdb_search(tmp_path):
    cfg = tmp_path / "w.json"
    cfg.write_text(json.dumps({
        "memory": {"n": 10, "m": 4}, "field": {"poly": "0x13"}, "lfsr": {"generator": [1, 2, 2]},
        "schedule": [{"init": [1, 2]}], "universe": {"classes": ["StuckAt"]},
    }))
    out = tmp_path / "best.json"
    assert main(["tdb-search", "--config", str(cfg), "--trials", "3", "--out", str(out)]) == 0
    best = json.loads(out.read_text())
    assert len(best["schedule"]) == 3
    # the emitted document is itself a valid config
    assert main(["run-prt", "--config", str(out)]) == 0
