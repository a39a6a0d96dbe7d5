import json
import math

import numpy as np
import pytest

from varosc import harness
from varosc.errors import InvalidArgument
from varosc.harness import ExperimentConfig
from varosc.sequences import geometric_lacunary
from varosc.symbol import symbol_variation, sweep_sup

NK = geometric_lacunary(2, 12)
M = geometric_lacunary(3, 8)


def _cfg(**kw):
    base = dict(kind="variation", dims=[1, 3, 5], trials=12, seed=7, nk=NK)
    base.update(kw)
    return ExperimentConfig(**base)


def test_ensemble_is_worker_independent(tmp_path):
    texts = []
    for w in (1, 4, 16):
        rep = harness.run_variation_ensemble(_cfg(workers=w))
        rep.write(tmp_path / f"w{w}.csv")
        texts.append((tmp_path / f"w{w}.csv").read_bytes())
    assert texts[0] == texts[1] == texts[2]


def test_env_var_workers(monkeypatch):
    monkeypatch.setenv("VAROSC_WORKERS", "3")
    a = harness.run_variation_ensemble(_cfg()).csv()
    monkeypatch.setenv("VAROSC_WORKERS", "1")
    assert harness.run_variation_ensemble(_cfg()).csv() == a


def test_report_integrity(tmp_path):
    rep = harness.run_variation_ensemble(_cfg(kind="oscillation", M=M))
    path = tmp_path / "osc.csv"
    rep.write(path)
    rows = harness.load_trial_csv(path)
    assert [r["trial"] for r in rows] == [str(i) for i in range(12)]
    for r, orig in zip(rows, rep.rows):
        assert r["ratio"] == orig["ratio"]  # 17 digits round-trip
        assert r["ratio"] == pytest.approx(r["ratio_recomputed"], rel=1e-15)
    summary = json.loads(path.with_suffix(".summary.json").read_text())
    assert summary["config"]["seed"] == 7
    assert summary["config"]["M"] == list(M.terms)
    assert "code_version" in summary
    js = json.loads(rep.json())
    assert len(js["rows"]) == 12


def test_identity_has_zero_variation():
    rep = harness.run_variation_ensemble(_cfg(op="identity"))
    # exact in real arithmetic; the running sum rounds once per step
    tol = 20 * NK.last * 2.3e-16
    assert all(r["ratio"] <= tol for r in rep.rows)


def test_scalar_operator_matches_symbol():
    theta = 0.7
    cfg = _cfg(op=f"diag:{theta}", dims=[1], trials=1)
    row = harness.run_variation_ensemble(cfg).rows[0]
    assert row["ratio"] == pytest.approx(symbol_variation(NK, theta), rel=1e-12)


def test_bound_violations_counted():
    rep = harness.run_variation_ensemble(_cfg(), bound=0.0)
    assert rep.summary["violations"] == 12
    rep = harness.run_variation_ensemble(_cfg(), bound=1e9)
    assert rep.summary["violations"] == 0


def test_config_validation():
    with pytest.raises(InvalidArgument):
        ExperimentConfig(kind="nope")
    with pytest.raises(InvalidArgument):
        ExperimentConfig(kind="variation", trials=0)
    with pytest.raises(InvalidArgument):
        ExperimentConfig(kind="variation", nk=(1, 2, 3))
    with pytest.raises(InvalidArgument):
        harness.make_operator("bogus", 2, 0)
    with pytest.raises(InvalidArgument):
        harness.run_variation_ensemble(_cfg(kind="oscillation"))


def test_constant_curve_monotone_in_beta():
    rep = harness.constant_curve([1.1, 4.0], 20, 4000, 10)
    by_beta = {r["beta"]: r["sup_estimate"] for r in rep.rows}
    assert by_beta[1.1] > by_beta[4.0]
    assert "beta,m_beta,K,sup_estimate,theta_star" in rep.csv()


def test_baseline_reproduces_within_one_percent():
    base = harness.load_baselines()["variation_beta2"]
    res = sweep_sup(geometric_lacunary(2, 30), None, 20_000, 20)
    assert res.sup_estimate == pytest.approx(base["sup_estimate"], rel=1e-2)


def test_sweep_report_columns():
    res = sweep_sup(NK, None, 50, 0)
    rep = harness.sweep_report(res)
    header = rep.csv().splitlines()[0]
    assert header == ",".join(harness.SWEEP_COLUMNS)
    assert len(rep.rows) == 50


def test_covering_count():
    assert harness.covering_count(2.0, 1 << 29) == 30
    assert harness.covering_count(3.0, 3**18) == 19


@pytest.mark.parametrize("N,expected", [(2, 1.0), (3, 4 / 3), (4, 1 + 2 / 3)])
def test_harmonic_value_small(N, expected):
    assert harness.harmonic_value(N) == pytest.approx(expected, abs=1e-15)


def test_divergence_demo():
    rep = harness.divergence_demo(10_000)
    for r in rep.rows:
        assert r["V"] == pytest.approx(r["harmonic"], rel=1e-12)
    last = rep.rows[-1]
    assert last["N"] == 10_000
    assert last["V"] >= math.log(10_000)
    vs = [r["V"] for r in rep.rows]
    assert vs == sorted(vs)


def test_roj_check_mixed():
    cfg = ExperimentConfig(kind="roj-check", dims=[1, 4], trials=20, seed=3, op="mixed", p=2.0)
    rep = harness.roj_check(cfg)
    assert rep.summary["passed"] and rep.summary["findings"] == []
    ops = {r["op"] for r in rep.rows}
    assert "random-unitary" in ops and any(o.startswith("contraction") for o in ops)


def test_dilation_check_report():
    cfg = ExperimentConfig(kind="dilation-check", dims=[2, 3], trials=3, seed=1,
                           op="random-contraction:0.9", steps=16)
    rep = harness.dilation_check(cfg, f_trials=3)
    assert rep.summary["passed"]
    assert rep.summary["max_power_error"] <= 1e-8
    assert rep.csv().splitlines()[0] == ",".join(harness.DILATION_COLUMNS)
