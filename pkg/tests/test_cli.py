import json
import subprocess
import sys

import numpy as np
import pytest

from alpha_envelope.cli import SCHEMA, config_from_dict, main, read_field_csv

DISC = {"kind": "disc", "center": [0, 0], "radius": 1}


def write(tmp_path, name="run.json", **cfg):
    base = {"domain": DISC, "datum": "x", "alpha": 0.5, "h": "1/16", "W": 2}
    base.update(cfg)
    base = {k: v for k, v in base.items() if v is not None}
    p = tmp_path / name
    p.write_text(json.dumps(base))
    return str(p)


def load(path):
    return json.loads(open(path).read())


def test_solve_writes_outputs(tmp_path):
    out = tmp_path / "o"
    assert main(["solve", "--config", write(tmp_path), "--out", str(out)]) == 0
    s = load(out / "summary.json")
    assert s["schema"] == SCHEMA and s["converged"]
    for key in ("alpha", "h", "W", "iterations", "last_sweep_delta", "residual_max", "lipschitz_estimate", "min_value", "max_value"):
        assert key in s
    assert s["residual_max"] <= 3 * (1 / 16) ** 2
    lines = (out / "field.csv").read_text().splitlines()
    assert lines[0] == "x,y,value" and len(lines) == s["nodes"] + 1


def test_csv_round_trip_is_exact(tmp_path):
    from alpha_envelope import disc, solve_envelope

    out = tmp_path / "o"
    main(["solve", "--config", write(tmp_path, datum="x^3 + 0.1*sin(5*theta)", alpha=0.3), "--out", str(out)])
    pts, vals = read_field_csv(out / "field.csv")
    ref = solve_envelope(disc(), "x^3 + 0.1*sin(5*theta)", 0.3, 1 / 16, 2)
    assert np.array_equal(pts, ref.field.points) and np.array_equal(vals, ref.values)


def test_malformed_expression(tmp_path, capsys):
    assert main(["solve", "--config", write(tmp_path, datum="x+*y"), "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert "position 2" in err and "^" in err


@pytest.mark.parametrize(
    "bad",
    [
        {"alpha": 1.5},
        {"h": "one"},
        {"h": 2.0},
        {"W": 0},
        {"mode": "async"},
        {"domain": {"kind": "triangle"}},
        {"alphas": [0.2, 0.4]},
    ],
)
def test_config_errors(tmp_path, bad):
    assert main(["solve", "--config", write(tmp_path, **bad), "--out", str(tmp_path / "o")]) == 2


def test_missing_config(tmp_path):
    assert main(["solve", "--config", str(tmp_path / "nope.json")]) == 2
    assert main(["frobnicate", "--config", "x"]) == 2


def test_fraction_h():
    assert config_from_dict({"domain": DISC, "datum": "x", "alpha": 1, "h": "1/64"}).h == 1 / 64


def test_nonconvergence_exit(tmp_path):
    out = tmp_path / "o"
    assert main(["solve", "--config", write(tmp_path, datum="x^3", max_iter=1), "--out", str(out)]) == 3
    assert load(out / "summary.json")["converged"] is False


def test_sweep(tmp_path):
    out = tmp_path / "o"
    cfg = write(tmp_path, datum="x^3", alphas=[0, 0.25, 0.5, 0.75, 1], alpha=None)
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    b = load(out / "bridge.json")
    assert b["monotone"] and b["sandwich_ok"]
    assert all(p["non_increasing"] for p in b["pairs"])
    assert (out / "field_alpha_0p25.csv").exists()


@pytest.mark.parametrize("alphas", [[1], [0.5, 0.25]])
def test_sweep_rejects(tmp_path, alphas):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"domain": DISC, "datum": "x", "alphas": alphas, "h": 0.125}))
    assert main(["sweep", "--config", str(p), "--out", str(tmp_path / "o")]) == 2


def test_check_round_trip_and_perturbation(tmp_path):
    cfg = write(tmp_path, datum="cos(2*theta)")
    out = tmp_path / "o"
    main(["solve", "--config", cfg, "--out", str(out)])
    assert main(["check", "--config", cfg, "--field", str(out / "field.csv"), "--out", str(tmp_path / "c")]) == 0
    rep = load(tmp_path / "c" / "check.json")
    assert rep["alpha_convex"] and len(rep["c1_diagnostic"]) == 3
    lines = (out / "field.csv").read_text().splitlines()
    k = 40
    x, y, v = lines[k + 1].split(",")
    lines[k + 1] = f"{x},{y},{float(v) + 0.1!r}"
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(lines) + "\n")
    assert main(["check", "--config", cfg, "--field", str(bad), "--out", str(tmp_path / "c2")]) == 1
    rep = load(tmp_path / "c2" / "check.json")
    assert k in [v["node"] for v in rep["report"]["violations"]]


def test_check_quartic_alpha_zero(tmp_path):
    from alpha_envelope import disc, setup

    cfg = write(tmp_path, datum="-x^4", alpha=0)
    arms = setup(disc(), "-x^4", 1 / 16, 2)
    p = arms.grid.points
    rows = ["x,y,value"] + [f"{a:.17g},{b:.17g},{-(a**4):.17g}" for a, b in p]
    f = tmp_path / "q.csv"
    f.write_text("\n".join(rows) + "\n")
    assert main(["check", "--config", cfg, "--field", str(f), "--out", str(tmp_path / "c")]) == 1


def test_check_grid_mismatch(tmp_path):
    out = tmp_path / "o"
    main(["solve", "--config", write(tmp_path), "--out", str(out)])
    other = write(tmp_path, "other.json", h="1/8")
    assert main(["check", "--config", other, "--field", str(out / "field.csv"), "--out", str(tmp_path / "c")]) == 2
    assert main(["check", "--config", other, "--out", str(tmp_path / "c")]) == 2


def test_oracle_compare(tmp_path):
    cfg = write(tmp_path, datum="cos(2*theta)", alpha=1, h="1/32", W=3, oracle_tol=0.05)
    assert main(["oracle-compare", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    r = load(tmp_path / "o" / "oracle_compare.json")
    assert r["sup_diff"] <= 0.05 and r["oracle_samples"] == 1024
    assert main(["oracle-compare", "--config", write(tmp_path, alpha=0.5), "--out", str(tmp_path / "p")]) == 2


def test_determinism(tmp_path):
    cfg = write(tmp_path, datum="x^3", alpha=0.4)
    for d in ("a", "b"):
        assert main(["solve", "--config", cfg, "--out", str(tmp_path / d)]) == 0
    for name in ("field.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_module_entry_point(tmp_path):
    cfg = write(tmp_path, h=0.25)
    proc = subprocess.run(
        [sys.executable, "-m", "alpha_envelope", "solve", "--config", cfg, "--out", str(tmp_path / "o")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "o" / "summary.json").exists()
