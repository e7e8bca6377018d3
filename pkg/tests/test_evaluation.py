import csv
import io
import json

import pytest

from isifree.codec import mcsk_code
from isifree.errors import StateSpaceError
from isifree.evaluation import (
    SweepConfig,
    random_bits,
    reproduce_table2,
    run_monte_carlo,
    sweep,
    sweep_csv,
)
from isifree.graph import ChannelSpec


def test_monte_carlo_mmcsk(mmcsk_code):
    report = run_monte_carlo(mmcsk_code, 10**6, seed=7)
    assert report.analytic_rate == pytest.approx(1.25)
    assert report.monte_carlo_rate == pytest.approx(1.25, rel=0.01)
    assert abs(report.monte_carlo_rate - 1.25) < 5 * report.monte_carlo_stderr + 1e-3
    assert report.prng == "PCG64"
    assert report.gap == pytest.approx(1.2715533 - 1.25, abs=1e-6)


def test_monte_carlo_mcsk():
    report = run_monte_carlo(mcsk_code(ChannelSpec(1, 2)), 10**5, seed=1)
    assert report.monte_carlo_rate == pytest.approx(1.0, rel=1e-3)
    assert report.analytic_rate == 1.0


def test_monte_carlo_deterministic(depth2_code):
    assert run_monte_carlo(depth2_code, 5000, 11) == run_monte_carlo(depth2_code, 5000, 11)
    assert random_bits(64, 3) != random_bits(64, 4)


def test_monte_carlo_rejects_short_runs(depth2_code):
    with pytest.raises(ValueError):
        run_monte_carlo(depth2_code, 999, 0)


def test_report_serializes(depth2_code):
    data = run_monte_carlo(depth2_code, 2000, 0).to_dict()
    assert json.loads(json.dumps(data))["spec"] == {"k": 1, "N": 2}


def test_reference_rates_short():
    rows = reproduce_table2(depths=(1, 3))
    got = {r.scheme: r.rate for r in rows}
    assert got["MCSK"] == 1.0
    assert got["d=1"] == pytest.approx(1.25, abs=1e-9)
    assert got["d=3"] == pytest.approx(1.2604, abs=1e-3)
    assert got["capacity"] == pytest.approx(1.2716, abs=1e-3)


def test_sweep_rows_and_order(tmp_path):
    out = tmp_path / "sweep.csv"
    cfg = SweepConfig(k=[2, 1], N=[2, 1], d=[2, 1], out=str(out))
    rows = sweep(cfg)
    keys = [(r["k"], r["N"], r["d"]) for r in rows]
    assert keys == sorted(keys) and len(keys) == 8
    cell = next(r for r in rows if (r["k"], r["N"], r["d"]) == (1, 2, 1))
    assert cell["rate"] == pytest.approx(1.25)
    assert cell["capacity"] == pytest.approx(1.2716, abs=1e-4)
    assert cell["gap"] == pytest.approx(0.0216, abs=1e-4)
    golden = next(r for r in rows if (r["k"], r["N"], r["d"]) == (1, 1, 1))
    assert golden["capacity"] == pytest.approx(0.6942, abs=1e-4)
    for r in rows:
        assert r["rate"] <= r["capacity"] + 1e-6
    parsed = list(csv.DictReader(io.StringIO(out.read_text())))
    assert list(parsed[0]) == ["k", "N", "d", "rate", "capacity", "gap", "error"]


def test_sweep_parallel_matches_serial():
    a = sweep(SweepConfig(k=[1, 2], N=[2], d=[1, 2]))
    b = sweep(SweepConfig(k=[1, 2], N=[2], d=[1, 2], workers=2))
    assert sweep_csv(a) == sweep_csv(b)


def test_sweep_error_rows():
    rows = sweep(SweepConfig(k=[1], N=[2], d=[1], tol=1e-6))
    assert rows[0]["error"] == ""
    cfg = SweepConfig(k=[1], N=[2], d=[1])
    cfg.tol = -1.0
    rows = sweep(cfg)
    assert rows[0]["error"].startswith("ValueError")
    assert rows[0]["rate"] == ""


def test_sweep_config_validation(tmp_path):
    with pytest.raises(ValueError):
        SweepConfig(k=[], N=[2], d=[1])
    with pytest.raises(ValueError):
        SweepConfig(k=[1], N=[2], d=[1], family="nope")
    with pytest.raises(StateSpaceError):
        SweepConfig(k=[6], N=[12], d=[1], state_limit=1000)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"k": 1, "N": [2, 3], "d": [1], "note": "x"}))
    cfg = SweepConfig.load(path)
    assert cfg.k == [1] and cfg.extra == {"note": "x"}
    path.write_text(json.dumps({"k": [1]}))
    with pytest.raises(ValueError):
        SweepConfig.load(path)
