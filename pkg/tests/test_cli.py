import json
import math

import pytest

import vortexcap.cli as cli
from vortexcap.csvio import read_csv


def run(argv):
    return cli.main(argv)


def test_spectrum_one(tmp_path):
    out = tmp_path / "one.csv"
    code = run(
        ["spectrum", "--one", "--theta0", "1.5707963267948966", "--omega-s", "-1",
         "--gamma", "0", "--m-max", "8", "--out", str(out)]
    )
    assert code == 0
    digest, header, rows = read_csv(out)
    assert len(digest) == 16
    assert header == ["m", "c"]
    assert len(rows) == 8
    assert float(rows[0][1]) == 0.0  # m = 1 sits at gamma
    assert float(rows[1][1]) == pytest.approx(-0.5)


def test_spectrum_band(tmp_path):
    out = tmp_path / "band.csv"
    code = run(
        ["spectrum", "--band", "--theta1", str(math.pi / 3), "--theta2",
         str(2 * math.pi / 3), "--omega-n", "1", "--omega-s", "1", "--gamma", "0",
         "--n-max", "8", "--out", str(out)]
    )
    assert code == 0
    _, header, rows = read_csv(out)
    assert header == ["n", "c_minus", "c_plus", "discriminant", "valid", "threshold_n"]
    rec = dict(zip(header, rows[1]))
    assert float(rec["c_plus"]) == pytest.approx(math.sqrt(2.0) / 9.0, abs=1e-12)
    assert rec["valid"] == "1" and rec["threshold_n"] == "2"


def test_spectrum_missing_flag_exits_2(tmp_path):
    assert run(["spectrum", "--one", "--theta0", "1.5", "--omega-s", "-1",
                "--out", str(tmp_path / "x.csv")]) == 2


def test_spectrum_determinism(tmp_path):
    args = ["spectrum", "--one", "--theta0", "1.1", "--omega-s", "-0.7",
            "--gamma", "0.3", "--m-max", "6"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run([*args, "--out", str(a)]) == 0
    assert run([*args, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_region_scan(tmp_path):
    out = tmp_path / "region.csv"
    assert run(["region-scan", "--resolution", "32", "--out", str(out)]) == 0
    _, header, rows = read_csv(out)
    assert header == ["theta1", "theta2", "fig1a", "fig1b"]
    assert all(float(r[0]) < float(r[1]) for r in rows)
    nearest = min(
        rows,
        key=lambda r: (float(r[0]) - math.pi / 3) ** 2 + (float(r[1]) - 2 * math.pi / 3) ** 2,
    )
    assert nearest[2] == "1" and nearest[3] == "1"
    assert run(["region-scan", "--resolution", "8", "--out", str(out)]) == 2


def test_degenerate_state_exits_3(tmp_path):
    # omega_s = 0 forces omega_n = omega_s
    assert run(["spectrum", "--one", "--theta0", "1.2", "--omega-s", "0",
                "--m-max", "4", "--out", str(tmp_path / "x.csv")]) == 3


def test_branch_one_cli(tmp_path):
    out = tmp_path / "br.csv"
    code = run(
        ["branch", "--one", "--theta0", "1.5707963267948966", "--omega-s", "-1",
         "--gamma", "0", "--m", "2", "--eps-max", "0.01", "--n-steps", "1",
         "--modes", "8", "--both-signs", "--out", str(out)]
    )
    assert code == 0
    _, header, rows = read_csv(out)
    assert header[:3] == ["epsilon", "c", "residual"]
    assert len(rows) == 2
    assert all(float(r[2]) < 1e-10 for r in rows)
    assert float(rows[0][1]) == pytest.approx(-0.5, abs=1e-4)


def test_branch_collision_preflight_exits_3(tmp_path, monkeypatch):
    def fake_scan(band, m, k_max, tol=1e-10):
        raise_record = type("R", (), {"kind": "plus_vs_minus", "k": 2})
        return [raise_record]

    monkeypatch.setattr("vortexcap.continuation.collision_scan", fake_scan)
    code = run(
        ["branch", "--band", "--theta1", str(math.pi / 3), "--theta2",
         str(2 * math.pi / 3), "--omega-n", "1", "--omega-s", "1", "--gamma", "0",
         "--m", "2", "--eps-max", "0.004", "--n-steps", "1", "--modes", "6",
         "--collocation", "128", "--out", str(tmp_path / "b.csv")]
    )
    assert code == 3


def test_branch_stall_exits_4_with_partial(tmp_path, monkeypatch):
    import vortexcap.continuation as cont

    real = cont._newton_solve
    calls = {"n": 0}

    def flaky(system, x0, tol, max_iter):
        calls["n"] += 1
        if calls["n"] > 1:
            raise cont.NewtonError("forced failure")
        return real(system, x0, tol, max_iter)

    monkeypatch.setattr(cont, "_newton_solve", flaky)
    out = tmp_path / "partial.csv"
    code = run(
        ["branch", "--one", "--theta0", "1.5707963267948966", "--omega-s", "-1",
         "--gamma", "0", "--m", "2", "--eps-max", "0.02", "--n-steps", "2",
         "--modes", "6", "--out", str(out)]
    )
    assert code == 4
    _, _, rows = read_csv(out)
    assert len(rows) == 1  # the first point survived


def test_evolve_cli(tmp_path):
    out = tmp_path / "traj.csv"
    code = run(
        ["evolve", "--one", "--theta0", "1.5707963267948966", "--omega-s", "-1",
         "--gamma", "0", "--initial", "flat", "--m", "2", "--t-end", "1.0",
         "--dt", "0.01", "--collocation", "64", "--out", str(out)]
    )
    assert code == 0
    _, header, rows = read_csv(out)
    assert header[:5] == ["t", "interface", "area", "gauss_residual",
                          "rigid_rotation_error"]
    assert all(abs(float(r[4])) < 1e-12 for r in rows)
    assert run(["evolve", "--one", "--theta0", "1.0", "--omega-s", "-1",
                "--t-end", "1", "--dt", "-0.1", "--out", str(out)]) == 2


def test_evolve_from_branch_csv(tmp_path):
    br = tmp_path / "br.csv"
    assert run(
        ["branch", "--one", "--theta0", "1.5707963267948966", "--omega-s", "-1",
         "--gamma", "0", "--m", "2", "--eps-max", "0.02", "--n-steps", "1",
         "--modes", "8", "--out", str(br)]
    ) == 0
    out = tmp_path / "traj.csv"
    code = run(
        ["evolve", "--one", "--theta0", "1.5707963267948966", "--omega-s", "-1",
         "--gamma", "0", "--initial", "branch", "--branch-csv", str(br),
         "--row", "0", "--m", "2", "--t-end", "0.1", "--dt", "0.005",
         "--collocation", "128", "--fold", "2", "--out", str(out)]
    )
    assert code == 0
    _, header, rows = read_csv(out)
    assert all(float(r[4]) < 1e-7 for r in rows)  # rotates rigidly at its c


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "state": {"theta0": 1.2, "omega_s": -1.0, "gamma": 0.0},
        "output": {"path": str(tmp_path / "from_cfg.csv")},
    }))
    assert run(["spectrum", "--config", str(cfg), "--m-max", "3"]) == 0
    assert (tmp_path / "from_cfg.csv").exists()
    # flags win over config values
    assert run(["spectrum", "--config", str(cfg), "--m-max", "3",
                "--theta0", "1.4", "--out", str(tmp_path / "override.csv")]) == 0
    _, _, rows_a = read_csv(tmp_path / "from_cfg.csv")
    _, _, rows_b = read_csv(tmp_path / "override.csv")
    assert rows_a[1][1] != rows_b[1][1]


def test_verify_cli(capsys):
    assert run(["verify", "--suite", "integrals"]) == 0
    out = capsys.readouterr().out
    assert "[PASS] integrals" in out
    assert run(["verify", "--suite", "integrals", "--break-in-closed"]) == 1
    out = capsys.readouterr().out
    assert "[FAIL] integrals" in out


def test_verify_all_suites(capsys):
    assert run(["verify"]) == 0
    out = capsys.readouterr().out
    for name in ("integrals", "symbol", "vieta", "zonal"):
        assert f"[PASS] {name}" in out
