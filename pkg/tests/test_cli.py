import csv
import io
import json

import pytest

from twsolve.cli import main, workers


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_homoclinic_json(tmp_path, capsys):
    out = tmp_path / "h.json"
    assert main(["homoclinic", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["mu_star"] == pytest.approx(-0.836, abs=5e-3)
    assert d["x_star"] == pytest.approx(1.426095, abs=2e-3)
    assert abs(d["alpha_beta"] - 1) < 1e-12
    assert d["meta"]["version"] and d["meta"]["flags"]["bracket"] == [-0.9, -0.8]
    assert "mu_tol" in d["meta"]["tolerances"]


def test_homoclinic_bracket_failure(capsys):
    code, _, err = run(["homoclinic", "--bracket", "-0.5:-0.4"], capsys)
    assert code == 4 and "bracketing" in err


def test_outputs_are_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        p2 = tmp_path / "o.csv"
        assert main(["portrait", "--mu", "-0.85", "--t-budget", "5", "--out", str(p2)]) == 0
        p.write_bytes(p2.read_bytes())
    assert a.read_bytes() == b.read_bytes()


def test_portrait_csv_format(tmp_path):
    out, meta = tmp_path / "p.csv", tmp_path / "m.json"
    assert main(["portrait", "--t-budget", "5", "--out", str(out), "--meta", str(meta)]) == 0
    raw = out.read_bytes()
    assert b"\r" not in raw
    rows = list(csv.reader(io.StringIO(raw.decode())))
    assert rows[0] == ["trajectory_id", "T", "U", "W"]
    # 17 significant digits round-trip
    assert float(rows[1][2]) == float(repr(float(rows[1][2])))
    m = json.loads(meta.read_text())
    assert len(m["trajectories"]) == len({r[0] for r in rows[1:]})


def test_portrait_seeds_file(tmp_path):
    seeds = tmp_path / "seeds.txt"
    seeds.write_text("U W\n0.1 0.0\n-0.2, 0.05\n")
    out = tmp_path / "p.csv"
    assert main(["portrait", "--seeds", str(seeds), "--t-budget", "2", "--out", str(out)]) == 0
    ids = {line.split(",")[0] for line in out.read_text().splitlines()[1:]}
    assert ids == {"0", "1", "2", "3"}


def test_empty_seeds_is_usage_error(tmp_path, capsys):
    seeds = tmp_path / "seeds.txt"
    seeds.write_text("# nothing\n")
    code, _, err = run(["portrait", "--seeds", str(seeds)], capsys)
    assert code == 2 and "empty" in err


def test_series_compare(tmp_path):
    out, prof = tmp_path / "s.json", tmp_path / "s.csv"
    assert main(["series", "--compare", "--out", str(out), "--profile", str(prof)]) == 0
    d = json.loads(out.read_text())
    assert d["comparison"]["upper_sup_error_m6_0"] < 2e-2
    assert prof.read_text().splitlines()[0] == "T,U,U_reference"


def test_series_failure_exit_code(capsys):
    code, _, _ = run(["series", "--Nl", "10", "--xstar", "100"], capsys)
    assert code == 5


def test_verify_pass_and_fail(tmp_path, capsys):
    out = tmp_path / "v.json"
    assert main(["verify", "IVb", "--draws", "5", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["all_passed"] is True
    assert main(["verify", "IVc", "--draws", "5", "--literal", "--out", str(out)]) == 6
    d = json.loads(out.read_text())
    assert d["failed"] == ["IVc"]


def test_verify_unknown_case(capsys):
    code, _, err = run(["verify", "XYZ"], capsys)
    assert code == 2


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["portrait", "--tol", "-1"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    code, _, _ = run(["hamiltonian", "--lambda3", "0"], capsys)
    assert code == 2


def test_hamiltonian_outputs(tmp_path):
    out, js = tmp_path / "h.csv", tmp_path / "h.json"
    assert main(["hamiltonian", "--out", str(out), "--json", str(js)]) == 0
    d = json.loads(js.read_text())
    us = [e["U"] for e in d["equilibria"]]
    assert us == pytest.approx([0.271286, 1.0, 1.228714], abs=1e-6)
    bounded = [o for o in d["orbits"] if not o["truncated"]]
    assert bounded and max(o["energy_drift"] for o in bounded) <= 1e-8


def test_config_file_overridden_by_flags(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("draws = 3\nseed = 9\nliteral = false\n")
    out = tmp_path / "v.json"
    assert main(["verify", "IVd", "--config", str(cfg), "--seed", "10", "--out", str(out)]) == 0
    flags = json.loads(out.read_text())["meta"]["flags"]
    assert flags["draws"] == 3 and flags["seed"] == 10 and flags["literal"] is False


def test_config_interval_value(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("bracket = -0.5:-0.4\n")
    code, _, _ = run(["homoclinic", "--config", str(cfg)], capsys)
    assert code == 4


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("bogus = 1\n")
    with pytest.raises(SystemExit) as exc:
        main(["verify", "IVd", "--config", str(cfg)])
    assert exc.value.code == 2


def test_threads_env(monkeypatch):
    monkeypatch.setenv("TWSOLVE_THREADS", "1")
    assert workers() == 1
    monkeypatch.setenv("TWSOLVE_THREADS", "junk")
    assert workers() == 1


def test_threaded_verify_is_identical(tmp_path, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    monkeypatch.setenv("TWSOLVE_THREADS", "1")
    main(["verify", "all", "--draws", "3", "--out", str(a)])
    monkeypatch.setenv("TWSOLVE_THREADS", "4")
    main(["verify", "all", "--draws", "3", "--out", str(a.with_name("b_raw.json"))])
    da = json.loads(a.read_text())
    db = json.loads(a.with_name("b_raw.json").read_text())
    assert da["cases"] == db["cases"]
