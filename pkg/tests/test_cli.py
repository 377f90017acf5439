import json
import os

from uilkit.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_knead_seed(capsys):
    code, out = run_cli(capsys, "knead", "--nu", "1.0.0.0.101")
    assert code == 0
    report = json.loads(out)
    res = report["results"]
    assert res["cutting_times"] == [1, 2, 3, 4, 7]
    assert res["kneading_map"] == [0, 0, 0, 2]
    assert res["cocutting_times"] == [5, 6]
    assert res["admissible_disjoint"]["status"] == "evidence"
    assert res["admissible_q"]["status"] == "evidence"


def test_exactly_one_input(capsys):
    code, _ = run_cli(capsys, "knead", "--nu", "10", "--q", "fib")
    assert code == 2
    code, _ = run_cli(capsys, "knead")
    assert code == 2


def test_bad_slope_is_config_error(capsys):
    code, _ = run_cli(capsys, "knead", "--slope", "nonsense")
    assert code == 2


def test_persistence_symbolic_fib(capsys):
    code, out = run_cli(capsys, "persistence", "--q", "fib", "--horizon", "100")
    assert code == 0
    res = json.loads(out)["results"]
    assert res["q_asymptotics"]["to_infinity"]["status"] == "evidence"
    assert res["folding_equals_endpoints"]["status"] == "evidence"


def test_genseq_certificate(capsys):
    code, out = run_cli(capsys, "genseq", "--length", "25", "--compat")
    assert code == 0
    cert = json.loads(out)["results"]["certificate"]
    assert cert["first_extension_matches_reference"]
    assert cert["q_ne_1_and_le_k_minus_2_beyond_seed"]


def test_subcontinua_ex35(capsys):
    code, out = run_cli(capsys, "subcontinua", "--q", "ex35",
                        "--horizon", "40")
    assert code == 0
    res = json.loads(out)["results"]
    assert any(set(tuple(ch)) >= {8, 11, 14} for ch in res["strict"]["chains"])
    assert res["nasty_cascade"]["status"] == "refuted"
    spiral = [c for c in res["classified"]
              if c["class"]["kind"] == "direct-spiral"]
    assert spiral


def test_fmap_csv(tmp_path, capsys):
    out_csv = str(tmp_path / "f.csv")
    code, out = run_cli(capsys, "fmap", "--slope", "nonrec41:80",
                        "--horizon", "64", "--grid", "24", "--max-cell", "2",
                        "--out-csv", out_csv)
    assert code == 0
    lines = open(out_csv).read().splitlines()
    assert lines[0] == "x_lo,x_hi,F_lo,F_hi,cell_k"
    assert len(lines) > 10


def test_tower_csv_monotone_n(tmp_path, capsys):
    out_csv = str(tmp_path / "t.csv")
    code, _ = run_cli(capsys, "tower", "--slope", "1.9", "--horizon", "64",
                      "--depth", "32", "--out-csv", out_csv)
    assert code == 0
    rows = open(out_csv).read().splitlines()[1:]
    ns = [int(r.split(",")[0]) for r in rows]
    assert ns == sorted(ns)


def test_density_csv_flags_max_gap(tmp_path, capsys):
    out_csv = str(tmp_path / "d.csv")
    code, out = run_cli(capsys, "density", "--slope", "1.9", "--K", "6",
                        "--horizon", "64", "--out-csv", out_csv)
    assert code == 0
    rows = [r.split(",") for r in open(out_csv).read().splitlines()[1:]]
    assert sum(int(r[3]) for r in rows) == 1


def test_classify_reports(capsys):
    code, out = run_cli(capsys, "classify", "--slope", "nonrec41:120",
                        "--horizon", "100", "--depth", "32",
                        "--itinerary", "(1)^inf .1111",
                        "--itinerary", "(0)^inf .0000")
    assert code == 0
    items = json.loads(out)["results"]["items"]
    ones = items["(1)^inf .1111"]
    assert ones["endpoint"]["status"] == "refuted"


def test_determinism_byte_identical(capsys):
    outs = []
    for _ in range(2):
        code, out = run_cli(capsys, "knead", "--q", "ex35", "--horizon", "60")
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]


def test_env_prec_cap_override(capsys, monkeypatch):
    monkeypatch.setenv("UILKIT_PREC_CAP", "256")
    code, out = run_cli(capsys, "knead", "--nu", "1.0.0.0.101")
    assert code == 0


def test_report_written_atomically(tmp_path, capsys):
    out_path = str(tmp_path / "r.json")
    code, _ = run_cli(capsys, "knead", "--nu", "10", "--out", out_path)
    assert code == 0
    assert json.load(open(out_path))["schema"] == "uilkit-report-v1"
    assert not os.path.exists(out_path + ".tmp")
