"""Seeded Monte Carlo check of the detection bounds.

Each :class:`Scenario` fixes one classical probability measure inside the
uncertainty family: a variance path with values in [sigma_lo^2, sigma_hi^2],
signal magnitudes in the admissible band, and signs. Simulating it gives an
estimate of ``P(event)`` under that measure only. The supremum over the
whole family cannot be reached by sampling, so every rate reported here is
a *lower* estimate of the corresponding upper probability; the useful test
is one-sided: the analytic upper bounds must dominate every empirical rate.

Randomness is counter based. Trials are cut into fixed blocks of
``BLOCK`` trials and block ``j`` of stream ``s`` draws from
``Philox(SeedSequence(seed, spawn_key=(s, j)))``. Results depend only on
(seed, stream, trials), never on how blocks are spread over workers.
"""

from __future__ import annotations

import csv
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from . import detector as det
from .csvio import fmt
from .detector import DetectorConfig

BLOCK = 2048
# cap on samples held in memory per block slice
_SLICE_SAMPLES = 1 << 18

VariancePolicy = Literal["const_lower", "const_upper", "alternating", "iid_uniform_on_band", "per_sample_list"]
SignalPolicy = Literal["const_lower", "const_upper", "per_sample_list"]
SignPolicy = Literal["all_plus", "iid_signs"]
Event = Literal["missed_detection", "false_alarm"]

_STREAM = {"missed_detection": 0, "false_alarm": 1}


@dataclass(frozen=True)
class Scenario:
    variance_policy: VariancePolicy = "const_upper"
    signal_policy: SignalPolicy = "const_lower"
    sign_policy: SignPolicy = "all_plus"
    variances: tuple[float, ...] | None = None
    magnitudes: tuple[float, ...] | None = None

    @property
    def ident(self) -> str:
        return f"{self.variance_policy}/{self.signal_policy}/{self.sign_policy}"

    def validate(self, cfg: DetectorConfig) -> None:
        lo, hi = cfg.noise.var_lower, cfg.noise.var_upper
        if self.variance_policy == "per_sample_list":
            v = self.variances
            if v is None or len(v) != cfg.n:
                raise ValueError(f"per-sample variance list must have length n={cfg.n}")
            if any(not (lo * (1 - 1e-12) <= x <= hi * (1 + 1e-12)) for x in v):
                raise ValueError("listed variances must lie in [sigma_lo^2, sigma_hi^2]")
        elif self.variance_policy not in ("const_lower", "const_upper", "alternating", "iid_uniform_on_band"):
            raise ValueError(f"unknown variance policy {self.variance_policy!r}")
        if self.signal_policy == "per_sample_list":
            m = self.magnitudes
            if m is None or len(m) != cfg.n:
                raise ValueError(f"per-sample magnitude list must have length n={cfg.n}")
            slo, shi = cfg.band.sigma_x_lower, cfg.band.sigma_x_upper
            if any(not (slo * (1 - 1e-12) <= x <= shi * (1 + 1e-12)) for x in m):
                raise ValueError("listed magnitudes must lie in the signal band")
        elif self.signal_policy not in ("const_lower", "const_upper"):
            raise ValueError(f"unknown signal policy {self.signal_policy!r}")
        if self.sign_policy not in ("all_plus", "iid_signs"):
            raise ValueError(f"unknown sign policy {self.sign_policy!r}")


def default_scenarios() -> list[Scenario]:
    return [
        Scenario(v, s, "all_plus")
        for v, s in itertools.product(
            ("const_lower", "const_upper", "alternating", "iid_uniform_on_band"),
            ("const_lower", "const_upper"),
        )
    ]


@dataclass(frozen=True)
class SimResult:
    trials: int
    hits: int
    seed: int
    scenario: Scenario
    event: Event = "missed_detection"

    @property
    def rate(self) -> float:
        return self.hits / self.trials

    @property
    def stderr(self) -> float:
        r = self.rate
        return math.sqrt(r * (1.0 - r) / self.trials)


def _block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(stream, block))
    return np.random.Generator(np.random.Philox(ss))


def _noise_std(cfg: DetectorConfig, sc: Scenario, rng, rows: int) -> np.ndarray:
    n = cfg.n
    lo, hi = cfg.noise.sigma_lower, cfg.noise.sigma_upper
    pol = sc.variance_policy
    if pol == "const_lower":
        return np.full(n, lo)
    if pol == "const_upper":
        return np.full(n, hi)
    if pol == "alternating":
        return np.where(np.arange(n) % 2 == 0, lo, hi)
    if pol == "per_sample_list":
        return np.sqrt(np.asarray(sc.variances, dtype=float))
    return np.sqrt(rng.uniform(lo * lo, hi * hi, (rows, n)))


def _magnitudes(cfg: DetectorConfig, sc: Scenario) -> np.ndarray:
    if sc.signal_policy == "const_lower":
        return np.full(cfg.n, cfg.band.sigma_x_lower)
    if sc.signal_policy == "const_upper":
        return np.full(cfg.n, cfg.band.sigma_x_upper)
    return np.asarray(sc.magnitudes, dtype=float)


def _count_block(cfg, lam, sc, event, seed, block, size) -> int:
    rng = _block_rng(seed, _STREAM[event], block)
    n = cfg.n
    rows_per_slice = max(1, _SLICE_SAMPLES // n)
    hits = 0
    done = 0
    mags = _magnitudes(cfg, sc)
    while done < size:
        rows = min(rows_per_slice, size - done)
        std = _noise_std(cfg, sc, rng, rows)
        y = rng.standard_normal((rows, n))
        y *= std
        if event == "missed_detection":
            eps = np.asarray(cfg.fading.draw(rng, (rows, n)), dtype=float)
            x = eps * mags
            if sc.sign_policy == "iid_signs":
                x *= rng.choice((-1.0, 1.0), (rows, n))
            y += x
            stat = np.einsum("ij,ij->i", y, y)
            hits += int(np.count_nonzero(stat <= lam))
        else:
            stat = np.einsum("ij,ij->i", y, y)
            hits += int(np.count_nonzero(stat >= lam))
        done += rows
    return hits


def _simulate(cfg, lam, sc, trials, seed, event, workers) -> SimResult:
    sc.validate(cfg)
    if trials < 1:
        raise ValueError("trials must be positive")
    nblocks = -(-trials // BLOCK)
    sizes = [min(BLOCK, trials - j * BLOCK) for j in range(nblocks)]

    def job(j):
        return _count_block(cfg, lam, sc, event, seed, j, sizes[j])

    if workers <= 1:
        hits = sum(job(j) for j in range(nblocks))
    else:
        with ThreadPoolExecutor(workers) as pool:
            hits = sum(pool.map(job, range(nblocks)))
    return SimResult(trials, hits, seed, sc, event)


def simulate_missed_detection(
    cfg: DetectorConfig, lam: float, scenario: Scenario, trials: int, seed: int, workers: int = 1
) -> SimResult:
    """Rate of ``sum (eps_i X_i + Z_i)^2 <= lam`` under one scenario."""
    return _simulate(cfg, lam, scenario, trials, seed, "missed_detection", workers)


def simulate_false_alarm(
    cfg: DetectorConfig, lam: float, scenario: Scenario, trials: int, seed: int, workers: int = 1
) -> SimResult:
    """Rate of ``sum Z_i^2 >= lam`` under one scenario; the signal policy is ignored."""
    return _simulate(cfg, lam, scenario, trials, seed, "false_alarm", workers)


@dataclass
class SweepRow:
    scenario_id: int
    result: SimResult
    bound: float | None

    @property
    def dominated(self) -> bool:
        if self.bound is None:
            return True
        return self.result.rate <= self.bound + 3.0 * self.result.stderr


@dataclass
class SweepResult:
    max_missed_detection: SimResult
    max_false_alarm: SimResult
    rows: list[SweepRow] = field(default_factory=list)

    @property
    def all_dominated(self) -> bool:
        return all(r.dominated for r in self.rows)


SWEEP_FIELDS = (
    "scenario_id", "variance_policy", "signal_policy", "event",
    "trials", "hits", "rate", "stderr", "bound", "dominated",
)


def scenario_sweep(
    cfg: DetectorConfig,
    lam: float,
    scenarios: Sequence[Scenario] | None = None,
    trials: int = 100_000,
    seed: int = 0,
    workers: int = 1,
) -> SweepResult:
    """Run both simulators over a scenario set; maxima are lower estimates of the upper probabilities.

    Missed-detection rows are compared with the worst-case bound, except
    that scenarios pinned to the upper signal level are compared with the
    (smaller) best-case bound. False-alarm rows are compared with the
    Chernoff bound when ``lam > n sigma_hi^2`` and are unconstrained
    otherwise. False-alarm runs ignore the signal policy, so identical
    variance policies reuse one simulation.
    """
    scenarios = list(default_scenarios() if scenarios is None else scenarios)
    if not scenarios:
        raise ValueError("scenario set is empty")
    md_max = det.md_max_bound(cfg, lam)
    md_min = det.md_min_bound(cfg, lam)
    fa = det.fa_bound(cfg, lam)
    rows: list[SweepRow] = []
    fa_cache: dict = {}
    for i, sc in enumerate(scenarios):
        md = simulate_missed_detection(cfg, lam, sc, trials, seed, workers)
        rows.append(SweepRow(i, md, md_min if sc.signal_policy == "const_upper" else md_max))
        key = (sc.variance_policy, sc.variances)
        if key not in fa_cache:
            fa_cache[key] = simulate_false_alarm(cfg, lam, sc, trials, seed, workers)
        r = fa_cache[key]
        rows.append(SweepRow(i, SimResult(r.trials, r.hits, r.seed, sc, "false_alarm"), fa))
    md_rows = [r.result for r in rows if r.result.event == "missed_detection"]
    fa_rows = [r.result for r in rows if r.result.event == "false_alarm"]
    # first maximum wins on ties so the choice is order-deterministic
    best_md = max(md_rows, key=lambda r: r.hits)
    best_fa = max(fa_rows, key=lambda r: r.hits)
    return SweepResult(best_md, best_fa, rows)


def write_sweep_csv(result: SweepResult, path_or_file) -> None:
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_FIELDS)
        for r in result.rows:
            s = r.result
            w.writerow([fmt(x) for x in (
                r.scenario_id, s.scenario.variance_policy, s.scenario.signal_policy, s.event,
                s.trials, s.hits, float(s.rate), float(s.stderr),
                None if r.bound is None else float(r.bound), r.dominated,
            )])
    finally:
        if own:
            fh.close()
