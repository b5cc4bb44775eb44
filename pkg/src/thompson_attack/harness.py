"""Seeded Monte Carlo experiments for the distance attack.

Trial ``i`` of a run with master seed ``m`` draws all of its randomness
from ``numpy.random.Generator(PCG64(seed_i))`` where ``seed_i`` is the
first 64-bit word of ``numpy.random.SeedSequence([m, i])``. Results are
therefore independent of scheduling and worker count.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from multiprocessing import get_context
from pathlib import Path
from statistics import NormalDist
from typing import Optional

import numpy as np

from .attack import (
    ATTACKED_SIDE,
    DEFAULT_CHOICE,
    EquationId,
    check_pairing,
    equations as build_equations,
    greedy_descent,
    recover_shared_key,
)
from .distance import DistanceFunction
from .protocol import generate_instance, public_view
from .subgroups import GeneratorSet, ParameterError, check_s

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "trial",
    "derived_seed",
    "equation",
    "distance_fn",
    "success",
    "iterations_used",
    "final_distance",
    "time_ms",
)

A_EQUATIONS = (EquationId.U1, EquationId.U2_INV)
B_EQUATIONS = (EquationId.U2, EquationId.U1_INV)


class ConfigError(ValueError):
    pass


def default_equation(fn: DistanceFunction) -> EquationId:
    """a-recovery on u1 for the B-distances, b-recovery on u1^-1 for the
    A-distances."""
    return EquationId.U1 if fn.target is GeneratorSet.B else EquationId.U1_INV


@dataclass
class ExperimentConfig:
    s: int
    L: int
    trials: int
    mode: str = "combined"
    N: Optional[int] = None
    distance_fn: Optional[DistanceFunction] = None
    distance_choice: dict = field(default_factory=lambda: dict(DEFAULT_CHOICE))
    equations: Optional[list] = None
    master_seed: int = 0
    worker_count: int = 1

    def __post_init__(self):
        try:
            check_s(self.s)
        except ParameterError as exc:
            raise ConfigError(str(exc)) from None
        if self.L < 2 or self.L % 2:
            raise ConfigError(f"L must be even and >= 2, got {self.L}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.N is None:
            self.N = 2 * self.L
        if self.N < 1:
            raise ConfigError("N must be >= 1")
        if self.worker_count < 1:
            raise ConfigError("worker_count must be >= 1")
        if self.mode == "single":
            if self.distance_fn is None:
                raise ConfigError("single-function mode needs a distance function")
            self.distance_fn = DistanceFunction.parse(self.distance_fn) if isinstance(self.distance_fn, str) else self.distance_fn
            if self.equations is None:
                self.equations = [default_equation(self.distance_fn)]
            self.equations = [EquationId(e) for e in self.equations]
            for eq in self.equations:
                try:
                    check_pairing(ATTACKED_SIDE[eq], self.distance_fn)
                except ValueError as exc:
                    raise ConfigError(f"{eq.value}: {exc}") from None
        elif self.mode == "combined":
            self.distance_choice = {
                GeneratorSet(k): DistanceFunction.parse(v) if isinstance(v, str) else v
                for k, v in self.distance_choice.items()
            }
            for side, fn in self.distance_choice.items():
                try:
                    check_pairing(side, fn)
                except ValueError as exc:
                    raise ConfigError(str(exc)) from None
            self.equations = [EquationId(e) for e in (self.equations or list(EquationId))]
        else:
            raise ConfigError(f"mode must be 'single' or 'combined', got {self.mode!r}")

    def function_for(self, eq: EquationId) -> DistanceFunction:
        if self.mode == "single":
            return self.distance_fn
        return self.distance_choice[ATTACKED_SIDE[eq]]

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "L": self.L,
            "trials": self.trials,
            "mode": self.mode,
            "N": self.N,
            "distance_fn": self.distance_fn.value if self.distance_fn else None,
            "distance_choice": {k.value: v.value for k, v in self.distance_choice.items()},
            "equations": [e.value for e in self.equations],
            "master_seed": self.master_seed,
            "worker_count": self.worker_count,
        }


@dataclass
class EquationResult:
    equation: str
    distance_fn: str
    success: bool
    iterations_used: int
    final_distance: int
    time_ms: float
    key_correct: Optional[bool] = None


@dataclass
class TrialRecord:
    trial: int
    derived_seed: int
    results: list
    overall_success: bool
    key_recovered_correctly: bool

    def outcome_key(self):
        """Everything except wall-clock timings."""
        return (
            self.trial,
            self.derived_seed,
            tuple((r.equation, r.distance_fn, r.success, r.iterations_used, r.final_distance, r.key_correct) for r in self.results),
            self.overall_success,
            self.key_recovered_correctly,
        )


@dataclass
class RateEstimate:
    successes: int
    trials: int
    rate: float
    ci_low: float
    ci_high: float


@dataclass
class SummaryReport:
    config: dict
    per_target: dict
    p_a: Optional[RateEstimate]
    p_b: Optional[RateEstimate]
    observed_combined: Optional[RateEstimate]
    predicted_combined: Optional[float]
    prediction_gap: Optional[float]
    successes_total: int
    unsound_successes: int
    runtime_s: float
    records: list = field(default_factory=list, repr=False, compare=False)

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("records")
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SummaryReport":
        def est(d):
            return None if d is None else RateEstimate(**d)

        return cls(
            config=data["config"],
            per_target={k: est(v) for k, v in data["per_target"].items()},
            p_a=est(data["p_a"]),
            p_b=est(data["p_b"]),
            observed_combined=est(data["observed_combined"]),
            predicted_combined=data["predicted_combined"],
            prediction_gap=data["prediction_gap"],
            successes_total=data["successes_total"],
            unsound_successes=data["unsound_successes"],
            runtime_s=data["runtime_s"],
        )


# -- statistics -----------------------------------------------------------


def estimate_combined_rate(p_a: float, p_b: float) -> float:
    """Success chance of the four-equation attack if the two a-type and
    two b-type recoveries succeed independently."""
    for name, p in (("p_a", p_a), ("p_b", p_b)):
        if not 0.0 <= p <= 1.0 or math.isnan(p):
            raise ParameterError(f"{name} must lie in [0, 1], got {p}")
    return 1.0 - (1.0 - p_a) ** 2 * (1.0 - p_b) ** 2


def binomial_ci(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    """Wilson score interval."""
    if trials < 1 or not 0 <= successes <= trials:
        raise ParameterError(f"need 0 <= successes <= trials and trials >= 1, got {successes}/{trials}")
    if not 0.0 < level < 1.0:
        raise ParameterError(f"level must lie in (0, 1), got {level}")
    z = NormalDist().inv_cdf(0.5 + level / 2.0)
    phat = successes / trials
    denom = 1.0 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def _estimate(successes: int, trials: int) -> RateEstimate:
    lo, hi = binomial_ci(successes, trials)
    return RateEstimate(successes, trials, successes / trials, lo, hi)


# -- trials ---------------------------------------------------------------


def derive_seed(master_seed: int, trial: int) -> int:
    return int(np.random.SeedSequence([master_seed, trial]).generate_state(1, dtype=np.uint64)[0])


def run_trial(cfg: ExperimentConfig, trial: int) -> TrialRecord:
    seed = derive_seed(cfg.master_seed, trial)
    inst = generate_instance(cfg.s, cfg.L, np.random.Generator(np.random.PCG64(seed)))
    view = public_view(inst)
    choice = dict(cfg.distance_choice)
    if cfg.mode == "single":
        for eq in cfg.equations:
            choice[ATTACKED_SIDE[eq]] = cfg.distance_fn
    problems = build_equations(view, cfg.N, choice)
    results = []
    first_key_ok = None
    for eq in cfg.equations:
        fn = cfg.function_for(eq)
        t0 = time.perf_counter()
        out = greedy_descent(problems[eq])
        ms = (time.perf_counter() - t0) * 1000.0
        key_ok = None
        if out.success:
            key_ok = recover_shared_key(eq, out.x_tilde, out.y_tilde, view) == inst.K
            if first_key_ok is None:
                first_key_ok = key_ok
        results.append(
            EquationResult(eq.value, fn.value, out.success, out.iterations_used, out.final_distance, round(ms, 3), key_ok)
        )
    overall = any(r.success for r in results)
    return TrialRecord(trial, seed, results, overall, bool(first_key_ok))


def _run_trial_star(args):
    return run_trial(*args)


def run_trials(cfg: ExperimentConfig) -> list[TrialRecord]:
    jobs = [(cfg, i) for i in range(cfg.trials)]
    if cfg.worker_count == 1:
        records = [run_trial(c, i) for c, i in jobs]
    else:
        with get_context("spawn").Pool(cfg.worker_count) as pool:
            records = pool.map(_run_trial_star, jobs, chunksize=max(1, cfg.trials // (8 * cfg.worker_count)))
    return sorted(records, key=lambda r: r.trial)


def summarize(cfg: ExperimentConfig, records: list[TrialRecord], runtime_s: float) -> SummaryReport:
    per_target = {}
    counts: dict[str, int] = {}
    for rec in records:
        for r in rec.results:
            key = f"{r.equation}:{r.distance_fn}"
            counts[key] = counts.get(key, 0) + int(r.success)
    for key in sorted(counts):
        per_target[key] = _estimate(counts[key], len(records))
    successes = [r for rec in records for r in rec.results if r.success]
    unsound = sum(1 for r in successes if r.key_correct is False)

    p_a = p_b = observed = predicted = gap = None
    if cfg.mode == "combined":
        def pooled(eqs):
            used = [e for e in eqs if e in cfg.equations]
            if not used:
                return None
            hits = sum(int(r.success) for rec in records for r in rec.results if EquationId(r.equation) in used)
            return _estimate(hits, len(records) * len(used))

        p_a, p_b = pooled(A_EQUATIONS), pooled(B_EQUATIONS)
        observed = _estimate(sum(int(rec.overall_success) for rec in records), len(records))
        if p_a is not None and p_b is not None:
            predicted = estimate_combined_rate(p_a.rate, p_b.rate)
            gap = abs(observed.rate - predicted)
    return SummaryReport(
        config=cfg.to_dict(),
        per_target=per_target,
        p_a=p_a,
        p_b=p_b,
        observed_combined=observed,
        predicted_combined=predicted,
        prediction_gap=gap,
        successes_total=len(successes),
        unsound_successes=unsound,
        runtime_s=round(runtime_s, 3),
        records=records,
    )


def _run(cfg: ExperimentConfig, mode: str) -> SummaryReport:
    if cfg.mode != mode:
        raise ConfigError(f"expected a {mode!r} configuration, got {cfg.mode!r}")
    t0 = time.perf_counter()
    records = run_trials(cfg)
    summary = summarize(cfg, records, time.perf_counter() - t0)
    log.info("%s experiment s=%d L=%d: %d trials in %.1fs", mode, cfg.s, cfg.L, cfg.trials, summary.runtime_s)
    return summary


def run_single_function_experiment(cfg: ExperimentConfig) -> SummaryReport:
    return _run(cfg, "single")


def run_combined_experiment(cfg: ExperimentConfig) -> SummaryReport:
    return _run(cfg, "combined")


def run_experiment(cfg: ExperimentConfig) -> SummaryReport:
    return _run(cfg, cfg.mode)


# -- reports --------------------------------------------------------------


def write_reports(records: list[TrialRecord], summary: SummaryReport, csv_path=None, json_path=None) -> None:
    if csv_path is not None:
        path = Path(csv_path)
        try:
            with path.open("w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(CSV_COLUMNS)
                for rec in sorted(records, key=lambda r: r.trial):
                    for r in rec.results:
                        w.writerow(
                            [rec.trial, rec.derived_seed, r.equation, r.distance_fn, int(r.success),
                             r.iterations_used, r.final_distance, f"{r.time_ms:.3f}"]
                        )
        except OSError as exc:
            raise OSError(f"cannot write CSV report {path}: {exc.strerror or exc}") from exc
    if json_path is not None:
        path = Path(json_path)
        try:
            path.write_text(json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n")
        except OSError as exc:
            raise OSError(f"cannot write JSON report {path}: {exc.strerror or exc}") from exc
