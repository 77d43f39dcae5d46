"""CLI contract: determinism, schemas, config files, exit codes."""
import json

import pytest

from levysearch.cli import main


def run_to_file(tmp_path, name, argv):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    return code, out.read_bytes()


def test_walk_deterministic(tmp_path):
    argv = ["walk", "--alpha", "2.5", "--steps", "100", "--seed", "7"]
    c1, b1 = run_to_file(tmp_path, "a.csv", argv)
    c2, b2 = run_to_file(tmp_path, "b.csv", argv)
    assert c1 == c2 == 0
    assert b1 == b2
    lines = b1.decode().splitlines()
    assert lines[0] == "step,x,y,phase_id"
    assert len(lines) == 102


def test_walk_arbitrary_path_mode(tmp_path):
    argv = ["walk", "--alpha", "2.5", "--steps", "60", "--seed", "3",
            "--path-mode", "arbitrary"]
    c1, b1 = run_to_file(tmp_path, "a.csv", argv)
    c2, b2 = run_to_file(tmp_path, "b.csv", argv)
    assert c1 == 0 and b1 == b2


def test_search_target_origin(tmp_path):
    code, raw = run_to_file(tmp_path, "s.json",
                            ["search", "--k", "4", "--ell", "0",
                             "--budget", "10", "--alpha", "2.5"])
    assert code == 0
    out = json.loads(raw)
    assert out["hit_step"] == 0 and out["winner"] == 0
    assert out["k"] == 4 and out["seed"] == 0


def test_search_threads_invariant(tmp_path):
    base = ["search", "--k", "6", "--ell", "2", "--budget", "80",
            "--alpha", "2.4", "--seed", "5"]
    _, b1 = run_to_file(tmp_path, "t1.json", base + ["--threads", "1"])
    _, b8 = run_to_file(tmp_path, "t8.json", base + ["--threads", "8"])
    assert b1 == b8


def test_search_ell_overrides_target(tmp_path, capsys):
    code, raw = run_to_file(tmp_path, "s.json",
                            ["search", "--k", "1", "--ell", "0",
                             "--target-x", "5", "--target-y", "5",
                             "--budget", "5", "--alpha", "2.5"])
    assert code == 0
    assert json.loads(raw)["hit_step"] == 0  # --ell 0 won


def test_search_needs_target():
    assert main(["search", "--k", "1", "--budget", "5", "--alpha", "2.5"]) == 1


def test_search_fixed_needs_alpha():
    assert main(["search", "--k", "1", "--ell", "1", "--budget", "5"]) == 1


def test_sweep_deterministic_across_threads(tmp_path):
    base = ["sweep", "--alphas", "2.3,2.7", "--ells", "1,2", "--budgets", "30",
            "--trials", "400", "--seed", "11"]
    _, b1 = run_to_file(tmp_path, "r1.csv", base + ["--threads", "1"])
    _, b8 = run_to_file(tmp_path, "r8.csv", base + ["--threads", "8"])
    assert b1 == b8
    header = b1.decode().splitlines()[0]
    assert header == "alpha,ell,k,budget,trial,hit_step,exhausted"
    assert len(b1.decode().splitlines()) == 1 + 400 * 4


def test_sweep_summary(tmp_path):
    summary = tmp_path / "summary.json"
    code, _ = run_to_file(tmp_path, "rows.csv",
                          ["sweep", "--alphas", "2.5", "--ells", "1,2,3",
                           "--budgets", "40", "--trials", "300",
                           "--seed", "1", "--summary", str(summary)])
    assert code == 0
    data = json.loads(summary.read_text())
    assert len(data["cells"]) == 3
    assert all("p_hat" in c for c in data["cells"])


def test_verify_suite_and_exit_codes(tmp_path):
    code, raw = run_to_file(tmp_path, "v.json",
                            ["verify", "--suite", "lemma1", "--dmax", "8"])
    assert code == 0
    report = json.loads(raw)
    assert report["passed"] is True
    assert main(["verify", "--suite", "unknown-suite"]) == 1


def test_verify_failure_exits_2(monkeypatch):
    from levysearch import oracles
    monkeypatch.setitem(
        oracles.SUITES, "alwaysfail",
        lambda: oracles.CheckResult("alwaysfail", False, {}))
    assert main(["verify", "--suite", "alwaysfail"]) == 2


def test_verify_lemma1_dump(tmp_path):
    dump = tmp_path / "lemma1.csv"
    code, _ = run_to_file(tmp_path, "v.json",
                          ["verify", "--suite", "lemma1", "--dmax", "4",
                           "--dump-lemma1", str(dump)])
    assert code == 0
    lines = dump.read_text().strip().splitlines()
    assert lines[0] == "d,i,w_x,w_y,p_num,p_den"
    # d=2, i=1 rows carry the exact probability 1/4
    row = next(l for l in lines[1:] if l.startswith("2,1,"))
    assert row.endswith(",1,4")


def test_fit_roundtrip(tmp_path):
    data = tmp_path / "points.csv"
    data.write_text("ell,p_hat\n1,1\n2,4\n3,9\n")
    code, raw = run_to_file(tmp_path, "fit.json",
                            ["fit", "--infile", str(data)])
    assert code == 0
    assert abs(json.loads(raw)["slope"] - 2.0) < 1e-9
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,1\n")
    assert main(["fit", "--infile", str(bad)]) == 1


def test_unknown_flag_exits_1():
    assert main(["walk", "--alpha", "2.5", "--steps", "5", "--bogus"]) == 1
    assert main(["nonsense"]) == 1


def test_format_flag(tmp_path):
    code, raw = run_to_file(tmp_path, "w.json",
                            ["walk", "--alpha", "2.5", "--steps", "10",
                             "--seed", "7", "--format", "json"])
    assert code == 0
    data = json.loads(raw)
    assert data["columns"] == ["step", "x", "y", "phase_id"]
    assert len(data["rows"]) == 11
    code, raw = run_to_file(tmp_path, "s.json",
                            ["sweep", "--alphas", "2.5", "--ells", "1",
                             "--budgets", "20", "--trials", "50",
                             "--format", "json"])
    assert code == 0
    assert "cells" in json.loads(raw)
    assert main(["verify", "--suite", "normalization", "--format", "csv"]) == 1


def test_config_file_json(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alpha": 2.5, "steps": 20, "seed": 9}))
    out1 = tmp_path / "o1.csv"
    code = main(["walk", "--config", str(cfg), "--alpha", "2.5",
                 "--steps", "20", "--out", str(out1)])
    assert code == 0
    out2 = tmp_path / "o2.csv"
    assert main(["walk", "--alpha", "2.5", "--steps", "20", "--seed", "9",
                 "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_config_file_flag_overrides(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alpha": 2.5, "steps": 10, "seed": 1}))
    out1 = tmp_path / "o1.csv"
    main(["walk", "--config", str(cfg), "--alpha", "2.5", "--steps", "10",
          "--seed", "2", "--out", str(out1)])
    out2 = tmp_path / "o2.csv"
    main(["walk", "--alpha", "2.5", "--steps", "10", "--seed", "2",
          "--out", str(out2)])
    assert out1.read_bytes() == out2.read_bytes()


def test_config_file_toml(tmp_path):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text('alpha = 2.5\nsteps = 15\nseed = 4\n')
    out = tmp_path / "o.csv"
    assert main(["walk", "--config", str(cfg), "--alpha", "2.5",
                 "--steps", "15", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 17


def test_config_file_unknown_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus_option": 1}))
    assert main(["walk", "--config", str(cfg), "--alpha", "2.5",
                 "--steps", "5"]) == 1


def test_sweep_config_with_native_lists(tmp_path):
    cfg = tmp_path / "grid.json"
    cfg.write_text(json.dumps({"alphas": [2.4, 2.6], "ells": [1, 2],
                               "budgets": "25", "trials": 50, "seed": 2}))
    out1 = tmp_path / "a.csv"
    code = main(["sweep", "--config", str(cfg), "--out", str(out1)])
    assert code == 0
    out2 = tmp_path / "b.csv"
    assert main(["sweep", "--alphas", "2.4,2.6", "--ells", "1,2",
                 "--budgets", "25", "--trials", "50", "--seed", "2",
                 "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_missing_required_flag_names_it(tmp_path, capsys):
    assert main(["walk", "--steps", "5"]) == 1
    assert "--alpha" in capsys.readouterr().err
    assert main(["sweep", "--alphas", "2.5", "--ells", "1"]) == 1
    assert "--trials" in capsys.readouterr().err
