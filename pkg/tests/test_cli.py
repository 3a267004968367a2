import json

from equideg.cli import main


def run_cli(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bessel_text(capsys):
    code, out, _ = run_cli(capsys, "bessel", "--m-max", "2", "--n-max", "3")
    assert code == 0
    assert "5.783" in out


def test_bessel_json(capsys):
    code, out, _ = run_cli(capsys, "--format", "json", "bessel", "--m-max", "1", "--n-max", "2")
    assert code == 0
    data = json.loads(out)
    assert abs(data["entries"][0][0] - 5.783) < 2e-3


def test_decompose(capsys):
    code, out, _ = run_cli(capsys, "--config", "bundled:six_membranes", "decompose")
    assert code == 0
    assert "chi2" in out and "weight 22" in out


def test_critical_points_json(capsys):
    code, out, _ = run_cli(capsys, "--config", "bundled:six_membranes",
                           "--format", "json", "critical-points")
    assert code == 0
    ids = [tuple(r["id"]) for r in json.loads(out)]
    assert ids == [(1, 3, 2), (1, 3, 3), (1, 3, 0), (2, 1, 2), (2, 1, 3)]


def test_basic_degree_command(capsys):
    code, out, _ = run_cli(capsys, "--config", "bundled:six_membranes",
                           "basic-degree", "--m", "1", "--j", "0")
    assert code == 0
    assert out.strip() == "(G) - (D2^D1 x^S4 S4p)"


def test_invariant_command(capsys):
    code, out, _ = run_cli(capsys, "--config", "bundled:six_membranes",
                           "--format", "json", "invariant", "--id", "1,3,2")
    assert code == 0
    data = json.loads(out)
    assert data["mode"] == "relative"
    assert ["(D18^Z3 x^V4 S4p)", 2] in data["terms"]


def test_global_command(capsys):
    code, out, _ = run_cli(capsys, "--config", "bundled:six_membranes",
                           "global", "--orbit-type", "(D2^D1 x^S4 S4p)")
    assert code == 0
    assert "UnboundedBranch" in out
    assert "(D6^D3 x^S4 S4p)" in out


def test_kernel_grid_csv(capsys, tmp_path):
    out_path = tmp_path / "grid.csv"
    code, _, _ = run_cli(capsys, "--config", "bundled:six_membranes",
                         "--out", str(out_path), "kernel-grid", "--id", "1,3,2",
                         "--orbit-type", "(D6^D3 x^D4 D4p)", "--resolution", "6")
    assert code == 0
    lines = out_path.read_text().strip().splitlines()
    assert lines[0] == "r,theta,u1,u2,u3,u4,u5,u6"
    assert len(lines) == 1 + 36


def test_missing_config_is_exit_2(capsys):
    code, _, err = run_cli(capsys, "critical-points")
    assert code == 2
    assert "config" in err


def test_bad_config_is_exit_2(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{\"group\": {}}")
    code, _, err = run_cli(capsys, "--config", str(p), "critical-points")
    assert code == 2


def test_report_text(capsys):
    code, out, _ = run_cli(capsys, "--config", "bundled:six_membranes", "report")
    assert code == 0
    assert "rabinowitz sum" in out
    assert "0 flagged" in out
