import csv
import json
import math

import pytest
from statsmodels.stats.proportion import proportion_confint

from thompson_attack import cli
from thompson_attack.harness import (
    CSV_COLUMNS,
    ConfigError,
    ExperimentConfig,
    SummaryReport,
    binomial_ci,
    derive_seed,
    estimate_combined_rate,
    run_combined_experiment,
    run_single_function_experiment,
    run_trial,
    write_reports,
)
from thompson_attack.subgroups import ParameterError


def test_estimate_combined_rate():
    assert estimate_combined_rate(0, 0) == 0
    assert estimate_combined_rate(1, 0.37) == 1
    # 1 - 0.883^2 * 0.767^2
    assert estimate_combined_rate(0.117, 0.233) == pytest.approx(0.5413, abs=5e-4)
    for bad in ((-0.1, 0.2), (0.2, 1.5), (math.nan, 0.1)):
        with pytest.raises(ParameterError):
            estimate_combined_rate(*bad)


@pytest.mark.parametrize("k, n", [(0, 100), (50, 100), (117, 1000), (1, 1), (999, 1000), (3, 7)])
def test_wilson_matches_statsmodels(k, n):
    lo, hi = binomial_ci(k, n, 0.95)
    ref = proportion_confint(k, n, alpha=0.05, method="wilson")
    assert (lo, hi) == pytest.approx(ref, abs=1e-12)


def test_wilson_examples():
    lo, hi = binomial_ci(0, 100)
    assert lo == 0 and hi < 0.05
    lo, hi = binomial_ci(50, 100)
    assert (lo + hi) / 2 == pytest.approx(0.5)
    lo, hi = binomial_ci(117, 1000)
    assert lo < 0.117 < hi and (hi - lo) / 2 == pytest.approx(0.02, abs=0.001)
    with pytest.raises(ParameterError):
        binomial_ci(5, 4)
    with pytest.raises(ParameterError):
        binomial_ci(0, 0)


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(3, 16, 10, mode="single")
    with pytest.raises(ConfigError):
        ExperimentConfig(3, 16, 10, mode="single", distance_fn="dB", equations=["U2"])
    with pytest.raises(ConfigError):
        ExperimentConfig(3, 16, 10, mode="combined", distance_choice={"A": "dAmax", "B": "dB"})
    with pytest.raises(ConfigError):
        ExperimentConfig(3, 15, 10)
    with pytest.raises(ConfigError):
        ExperimentConfig(3, 16, 0)
    cfg = ExperimentConfig(3, 16, 10, mode="single", distance_fn="dAmax")
    assert cfg.N == 32 and [e.value for e in cfg.equations] == ["U1_INV"]
    assert ExperimentConfig(3, 16, 1, mode="single", distance_fn="dBw").equations[0].value == "U1"


def test_seed_derivation():
    assert derive_seed(42, 3) == derive_seed(42, 3)
    assert len({derive_seed(42, i) for i in range(100)}) == 100
    assert derive_seed(42, 0) != derive_seed(43, 0)


def test_single_experiment_and_reports(tmp_path):
    cfg = ExperimentConfig(3, 16, 12, mode="single", distance_fn="dB", master_seed=5)
    summary = run_single_function_experiment(cfg)
    recs = summary.records
    assert [r.trial for r in recs] == list(range(12))
    est = summary.per_target["U1:dB"]
    assert est.rate == est.successes / 12
    assert summary.unsound_successes == 0
    for r in recs:
        assert r.key_recovered_correctly == r.overall_success

    csv_path, json_path = tmp_path / "t.csv", tmp_path / "t.json"
    write_reports(recs, summary, csv_path, json_path)
    rows = list(csv.reader(csv_path.open()))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) - 1 == cfg.trials * len(cfg.equations)
    assert SummaryReport.from_dict(json.loads(json_path.read_text())) == summary

    again = tmp_path / "u.csv"
    write_reports(recs, summary, again, None)
    assert again.read_bytes() == csv_path.read_bytes()
    with pytest.raises(OSError, match="t.csv"):
        write_reports(recs, summary, tmp_path / "missing" / "t.csv", None)


def test_combined_experiment_statistics():
    cfg = ExperimentConfig(3, 24, 15, mode="combined", master_seed=8)
    summary = run_combined_experiment(cfg)
    assert summary.p_a.trials == summary.p_b.trials == 30
    assert summary.predicted_combined == pytest.approx(estimate_combined_rate(summary.p_a.rate, summary.p_b.rate))
    assert summary.prediction_gap == pytest.approx(abs(summary.observed_combined.rate - summary.predicted_combined))
    assert summary.unsound_successes == 0
    assert sum(len(r.results) for r in summary.records) == 60
    with pytest.raises(ConfigError):
        run_single_function_experiment(cfg)


def test_reproducible_across_worker_counts():
    base = ExperimentConfig(3, 16, 8, mode="combined", master_seed=21, worker_count=1)
    multi = ExperimentConfig(3, 16, 8, mode="combined", master_seed=21, worker_count=2)
    a, b = run_combined_experiment(base), run_combined_experiment(multi)
    assert [r.outcome_key() for r in a.records] == [r.outcome_key() for r in b.records]
    assert a.per_target == b.per_target and a.observed_combined == b.observed_combined
    # a trial depends only on (master seed, index)
    assert run_trial(base, 5).outcome_key() == a.records[5].outcome_key()


# -- CLI ------------------------------------------------------------------


def test_cli_nf(capsys):
    assert cli.main(["nf", "x0^-1 x1 x0"]) == 0
    assert capsys.readouterr().out.strip() == "x2"


def test_cli_dist(capsys):
    assert cli.main(["dist", "--fn", "dAmax", "--s", "3", "x5 x0^-1"]) == 0
    assert capsys.readouterr().out.strip() == "4"


def test_cli_errors(capsys):
    assert cli.main(["nf", "x03"]) == 1
    assert "x03" in capsys.readouterr().err
    assert cli.main(["frobnicate"]) != 0
    assert cli.main(["dist", "--fn", "dQ", "--s", "3", "x1"]) != 0
    assert cli.main(["attack", "--instance", "/nonexistent.json"]) == 1


def test_cli_keygen_and_attack(tmp_path, capsys):
    from thompson_attack.protocol import loads

    assert cli.main(["keygen", "--s", "3", "--length", "256", "--seed", "7"]) == 0
    text = capsys.readouterr().out
    view, inst = loads(text)  # raises if K_A != K_B or K mismatches
    assert inst.K == inst.__class__.from_secrets(3, 256, inst.a1, inst.b1, inst.a2, inst.b2, inst.z).K

    path = tmp_path / "inst.json"
    path.write_text(text)
    assert cli.main(["attack", "--instance", str(path), "--n", "40"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out["equations"]) == {"U1", "U2", "U1_INV", "U2_INV"}
    assert all(e["iterations_used"] <= 40 for e in out["equations"].values())
    assert out["key_correct"] in (True, None)
    assert out["key_correct"] is (True if out["overall_success"] else None)


def test_cli_experiment(tmp_path, capsys):
    csv_path, json_path = tmp_path / "r.csv", tmp_path / "r.json"
    rc = cli.main(["experiment", "--mode", "single", "--fn", "dAmax", "--s", "3", "--length", "16",
                   "--trials", "5", "--seed", "1", "--csv", str(csv_path), "--json", str(json_path)])
    assert rc == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed == json.loads(json_path.read_text())
    assert "U1_INV:dAmax" in printed["per_target"]
    assert cli.main(["experiment", "--mode", "single", "--fn", "dB", "--equation", "U2", "--s", "3",
                     "--length", "16", "--trials", "5", "--seed", "1"]) == 1
