import csv
import io
import json
import math
import subprocess
import sys

import pytest

from semidirac.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_algebra_check_passes(capsys):
    code, out, err = run(["algebra-check"], capsys)
    assert code == 0
    table = rows(out)
    assert all(r["status"] == "pass" for r in table)
    assert {"residual", "tolerance"} <= set(table[0])
    assert "# failed: []" in err


def test_algebra_check_perturbation(capsys):
    code, out, err = run(["algebra-check", "--perturb", "gamma5_chiral"], capsys)
    assert code == 1
    failed = [r["check"] for r in rows(out) if r["status"] == "FAIL"]
    assert failed == ["gamma5_chiral"]
    assert "gamma5_chiral" in err


def test_spectrum_rows_and_determinism(capsys, tmp_path):
    code, out, _ = run(["spectrum", "--nmax", "2"], capsys)
    assert code == 0
    table = rows(out)
    assert len(table) == 50
    assert float(table[0]["lambda"]) == 0.0
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["spectrum", "--nmax", "3", "--out", str(a)]) == 0
    assert main(["spectrum", "--nmax", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_spectrum_free_flags_degenerate(capsys):
    code, out, _ = run(["spectrum", "--nmax", "1", "--amp", "0"], capsys)
    assert code == 0
    assert all(r["degenerate"] == "1" for r in rows(out))


def test_trace_acceptance_run(capsys):
    code, out, err = run(["trace", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["columns"] == ["lambda", "exact_smoothed", "weyl", "weyl_plus_orbits"]
    assert len(doc["rows"]) == 36
    assert doc["summary"]["max_rel_dev"] < 1e-2


def test_trace_rejects_zero_width(capsys):
    code, _, err = run(["trace", "--width", "0"], capsys)
    assert code == 2
    assert "width" in err


def test_trace_kmax_zero(capsys):
    code, out, err = run(["trace", "--kmax", "0", "--nmax", "30", "--lambda-points", "5"], capsys)
    assert code == 0
    for r in rows(out):
        assert r["weyl"] == r["weyl_plus_orbits"]
    assert "warnings" in err


def test_trace_strict_truncation(capsys):
    code, _, err = run(["trace", "--kmax", "1", "--strict", "--lambda-points", "3"], capsys)
    assert code == 1
    assert "kmax" in err


def test_weyl_free_benchmark(capsys):
    code, out, _ = run(["weyl", "free", "--lambda-min", "1", "--lambda-max", "1", "--lambda-points", "1"], capsys)
    assert code == 0
    assert float(rows(out)[0]["density"]) == pytest.approx(0.0759909, abs=5e-8)


def test_weyl_triple_zero_field_is_free(capsys):
    _, free, _ = run(["weyl", "free"], capsys)
    _, triple, _ = run(["weyl", "triple", "--v", "0"], capsys)
    assert [r["density"] for r in rows(free)] == [r["density"] for r in rows(triple)]


def test_weyl_mc_reproducible(capsys):
    argv = ["weyl", "mc", "--samples", "5000", "--lambda-points", "3", "--seed", "11"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv + ["--workers", "2"], capsys)
    assert a == b
    _, c, _ = run(argv[:-1] + ["12"], capsys)
    assert a != c


def test_weyl_colour(capsys):
    code, out, _ = run(["weyl", "colour", "--samples", "20000", "--lambda-min", "1", "--lambda-points", "2",
                        "--group", "2", "--colour-dim", "2"], capsys)
    assert code == 0
    table = rows(out)
    assert {"lambda", "density", "stderr"} == set(table[0])


def test_weyl_rejects_both_scales(capsys):
    code, _, err = run(["weyl", "triple", "--v", "1", "--sigma", "1"], capsys)
    assert code == 2


def test_chiral_curve(capsys):
    code, out, _ = run(["chiral", "--zeta-min", "0.1", "--zeta-max", "3", "--points", "30"], capsys)
    assert code == 0
    table = [(float(r["zeta"]), float(r["r"])) for r in rows(out)]
    assert table[0][1] < 1e-21
    assert next(r for z, r in table if abs(z - 1) < 1e-12) == pytest.approx(0.606531, abs=5e-7)
    assert all(b[1] > a[1] for a, b in zip(table, table[1:]))


def test_wong_free_straight_line(capsys):
    code, out, err = run(["wong", "--flow", "free", "--t-final", "1", "--dt", "0.01", "--store-every", "10"], capsys)
    assert code == 0
    table = rows(out)
    x4 = [float(r["x4"]) for r in table]
    speed = 3.0 / math.sqrt(0.01 + 0.04 + 0.09 + 9.0)
    assert x4[-1] == pytest.approx(speed, rel=1e-13)


def test_wong_constant_field_json(capsys):
    code, out, _ = run(["wong", "--t-final", "2", "--dt", "0.001", "--format", "json"], capsys)
    assert code == 0
    drift = json.loads(out)["summary"]["drift"]
    assert drift["casimir2"] < 1e-8 and drift["energy"] < 1e-8


def test_wong_domain_error(capsys):
    code, out, err = run(["wong", "--flow", "triple", "--p0", "0,0,0,0.1", "--s0", "0,0,-50",
                          "--field-scale", "3", "--t-final", "1", "--dt", "0.01"], capsys)
    assert code == 1
    assert "radicand" in err and "failed_at" in err


def test_mc_average(capsys):
    code, out, err = run(["mc-average", "--samples", "20000", "--lambda-points", "2", "--sites", "4"], capsys)
    assert code == 0
    assert len(rows(out)) == 2
    assert "max_z" in err


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("nmax = 1\namp = 0\n")
    _, out, _ = run(["spectrum", "--config", str(cfg)], capsys)
    assert len(rows(out)) == 18
    _, out, _ = run(["spectrum", "--config", str(cfg), "--nmax", "2"], capsys)
    assert len(rows(out)) == 50


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nmax = 1\nfrobnicate = 2\n")
    code, _, err = run(["spectrum", "--config", str(cfg)], capsys)
    assert code == 2 and "frobnicate" in err


def test_unknown_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["spectrum", "--no-such-flag"])
    assert info.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "semidirac", "chiral", "--points", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "zeta,r"
