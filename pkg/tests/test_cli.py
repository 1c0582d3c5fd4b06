import pytest

from colas.cli import main
from colas.report import read_csv_rows


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def kv(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


@pytest.fixture
def generated(tmp_path, capsys):
    prefix = tmp_path / "g"
    code, out, _ = run(capsys, "generate", "--n", 3000, "--rho", 10, "--lam", 10, "--regime", "fixed_linear",
                       "--theta", 0.75, "--seed", 3, "--out", prefix, "--write-marks")
    assert code == 0 and int(kv(out)["edges"]) > 0
    return prefix


def test_generate_outputs(generated):
    assert generated.with_suffix(".edges").exists()
    meta = kv(generated.with_suffix(".meta").read_text())
    assert meta["regime"] == "fixed_linear" and meta["theta"] == "0.75"
    assert generated.with_suffix(".marks.csv").exists()


def test_stats(generated, capsys, tmp_path):
    code, out, _ = run(capsys, "stats", f"{generated}.edges", "--marks", f"{generated}.marks.csv",
                       "--aux", 50, "--ccdf", tmp_path / "cc.csv", "--ck", tmp_path / "ck.csv")
    rep = kv(out)
    assert code == 0 and rep["n"] == "3000" and "spectral_radius" in rep
    assert read_csv_rows(tmp_path / "cc.csv")[0] == {"k": "0", "ccdf": "1.0"}
    code, out, _ = run(capsys, "stats", f"{generated}.edges", "--n-nodes", 3000, "--format", "csv")
    assert code == 0 and out.splitlines()[0].startswith("n,transitivity")


def test_ingest_p3(tmp_path, capsys):
    src = tmp_path / "p3.txt"
    src.write_text("0 1\n1 2\n2 2\n")
    code, out, _ = run(capsys, "ingest", src, "--out", tmp_path / "p3")
    rep = kv(out)
    assert code == 0 and rep["self_loops"] == "1" and rep["edges"] == "2"
    assert [r["label"] for r in read_csv_rows(tmp_path / "p3.idmap.csv")] == ["0", "1", "2"]
    code, out, _ = run(capsys, "stats", tmp_path / "p3.edges")
    rep = kv(out)
    assert rep["transitivity"] == "0.0" and rep["assortativity_pearson"] == "-1.0"


def test_limits(capsys):
    code, out, _ = run(capsys, "limits", "--theta", 1, "--lam", 1, "--rho", 1)
    assert code == 0 and float(kv(out)["C"]) == pytest.approx(45 / 124)
    code, out, _ = run(capsys, "limits", "--theta", "0:1:5", "--c", 0.1, "--quantity", "curve", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "theta,lambda_c,r_along_curve" and len(lines) == 6
    code, out, _ = run(capsys, "limits", "--quantity", "ht", "--theta", 0.5, "--alpha", 2.5)
    assert code == 0 and float(kv(out)["tail_constant"]) > 0


def test_calibrate_reports_joint_error(generated, capsys):
    code, out, _ = run(capsys, "calibrate", f"{generated}.edges", "--marks", f"{generated}.marks.csv", "--rho", 10)
    rep = kv(out)
    assert code == 0
    joint = abs(float(rep["c_obs"]) - float(rep["c_pred"])) + abs(float(rep["r_obs"]) - float(rep["r_pred"]))
    assert float(rep["fit_error"]) == pytest.approx(joint)
    assert 0 <= float(rep["theta_hat"]) <= 1


def test_rewire(generated, capsys, tmp_path):
    code, out, _ = run(capsys, "rewire", f"{generated}.edges", "--n-nodes", 3000, "--target", 0.0,
                       "--out", tmp_path / "rw.edges", "--threads", 1)
    assert code == 0 and kv(out)["reached_target"] == "true"
    assert (tmp_path / "rw.edges").exists()


def test_experiment(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("experiment: custom\nseed: 1\nn: [2000]\nrho: 1.0\nlam: 0.8\ntheta: [0.0, 1.0]\nreplicates: 1\n")
    code, out, _ = run(capsys, "experiment", cfg, "--out", tmp_path / "o")
    assert code == 0 and "custom_replicates=" in out
    assert len(read_csv_rows(tmp_path / "o" / "custom_replicates.csv")) == 2


@pytest.mark.parametrize("argv,code", [
    (["generate", "--n", 10, "--rho", 5, "--lam", 1], 4),
    (["stats", "/nonexistent/file.edges"], 3),
    (["limits", "--lam", 2, "--rho", 1], 4),
    (["limits", "--c", 0.5, "--quantity", "curve"], 4),
])
def test_error_codes(argv, code, capsys):
    got, _, err = run(capsys, *argv)
    assert got == code and err.startswith("error:")


def test_malformed_edge_list_code(tmp_path, capsys):
    p = tmp_path / "bad.edges"
    p.write_text("0 1\nfoo bar\n")
    code, _, err = run(capsys, "stats", p)
    assert code == 3 and "line 2" in err


def test_bad_config_code(tmp_path, capsys):
    p = tmp_path / "c.yaml"
    p.write_text("experiment: E3\nseed: 1\nlam: 1\nreplicates: 0\n")
    code, _, err = run(capsys, "experiment", p)
    assert code == 2 and "line 4" in err


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["generate"])
    assert exc.value.code == 2
