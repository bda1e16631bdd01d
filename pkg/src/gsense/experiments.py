"""Parameter sweeps behind the SNR, sample-size and ROC figures.

Every run writes CSVs (the contract), an optional SVG plot, and a
``manifest.json`` with the resolved configuration and seeds. Sweep points
are independent and may be evaluated by a thread pool; rows are always
emitted in input order, so output does not depend on the worker count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from . import __version__, baseline, csvio
from . import detector as det
from .fading import SignalBand, parse_fading
from .gnormal import GNormalParams

EXPERIMENTS = ("fig1a", "fig1b", "fig2", "fig3", "bounds", "sweep", "mc")
CALIBRATION_N = (10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000)


@dataclass
class ExperimentConfig:
    experiment: str = "fig1a"
    snr_db: list[float] = field(default_factory=lambda: [x / 2 for x in range(-20, 21)])
    n_values: list[int] = field(default_factory=lambda: [100])
    p: float = 0.01
    sigma_lower: float = 1.0
    noise_ratio: float = math.sqrt(2.0)
    signal_lower_mult: float = 0.5
    signal_upper_mult: float = 3.0
    fading: str = "constant:eps=1"
    beta: float | None = None
    signal_models: list[str] = field(default_factory=lambda: ["dtv", "dabt", "egsm"])
    gammas: list[float] = field(default_factory=lambda: [0.01, 0.1, 0.3, 0.5, 0.7])
    chi: float = 0.2
    calibrate: bool = False
    anchor_snr_db: float = -3.0
    anchor_targets: tuple[float, float] = (0.75, 0.15)
    roc_snr_db: float = 0.0
    roc_points: int = 201
    trials: int = 100_000
    seed: int = 0
    workers: int = 1
    out: str = "out"
    plot: bool = False

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if not self.snr_db or not self.n_values:
            raise ValueError("SNR and n ranges must be non-empty")
        if not 0 < self.p < 1:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def noise(self) -> GNormalParams:
        return GNormalParams(self.sigma_lower, self.noise_ratio * self.sigma_lower)


def snr_mapping(snr_db: float, noise: GNormalParams, lower_mult: float = 0.5, upper_mult: float = 3.0):
    """Signal scale for an SNR defined as (sigma^2/sl^2 + sigma^2/sh^2) / 2.

    Returns ``(sigma, band)`` with band ``[lower_mult sigma, upper_mult sigma]``.
    """
    s = 10.0 ** (snr_db / 10.0)
    sigma = math.sqrt(2.0 * s / (1.0 / noise.var_lower + 1.0 / noise.var_upper))
    return sigma, SignalBand(lower_mult * sigma, upper_mult * sigma)


def harmonic_noise_var(noise: GNormalParams) -> float:
    """Noise power that makes the classical SNR coincide with the mapped one."""
    return 2.0 / (1.0 / noise.var_lower + 1.0 / noise.var_upper)


def _fa_or_one(cfg, lam):
    v = det.fa_bound(cfg, lam)
    return (1.0, False) if v is None else (v, True)


def scenario_point(cfg: ExperimentConfig, snr_db: float, n: int) -> dict:
    """Conservative and aggressive false-alarm bounds at one (SNR, n).

    Conservative: lambda holds the worst-case missed-detection bound at p.
    Aggressive: lambda holds the best-case bound at p (bisection). beta is
    fixed by the config or picked per point to minimise the false-alarm
    bound. A vacuous bound (lambda <= n sigma_hi^2) is reported as 1.
    """
    noise = cfg.noise
    _, band = snr_mapping(snr_db, noise, cfg.signal_lower_mult, cfg.signal_upper_mult)
    base = det.DetectorConfig(n, cfg.p, 1.0 if cfg.beta is None else cfg.beta, noise, band, parse_fading(cfg.fading))
    row = {"snr_db": snr_db, "n": n}
    for tag, upper in (("cons", False), ("aggr", True)):
        c = base
        if cfg.beta is None:
            try:
                c = base.with_beta(det.optimize_beta(base, "min_fa_bound", use_upper_signal=upper))
            except det.NoAdmissibleBeta:
                c = base
        lam = det.lambda_for_md(c, use_upper_signal=True) if upper else det.threshold_lambda(c)
        fa, ok = _fa_or_one(c, lam)
        row.update({f"beta_{tag}": c.beta, f"lambda_{tag}": lam, f"fa_{tag}": fa, f"valid_{tag}": ok})
    row["gaussian"] = baseline.classical_fa_at_md(10.0 ** (snr_db / 10.0), n, cfg.p, harmonic_noise_var(noise))
    return row


def _pmap(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, items))


def calibrate_n(cfg: ExperimentConfig, candidates: Sequence[int] = CALIBRATION_N) -> tuple[int, list[dict]]:
    """Pick the sample count whose anchor-SNR bounds sit closest to the targets."""
    tc, ta = cfg.anchor_targets
    rows = _pmap(lambda n: scenario_point(cfg, cfg.anchor_snr_db, n), list(candidates), cfg.workers)
    best = min(rows, key=lambda r: (abs(r["fa_cons"] - tc) + abs(r["fa_aggr"] - ta), r["n"]))
    return int(best["n"]), rows


FIG1_BASE = ("snr_db", "n", "beta_cons", "lambda_cons", "fa_cons", "valid_cons",
             "beta_aggr", "lambda_aggr", "fa_aggr", "valid_aggr", "gaussian")


def fig1_rows(cfg: ExperimentConfig, n: int, overlay: str) -> tuple[list[str], list[dict]]:
    if overlay == "signals":
        overlays = {f"sig_{k}": baseline.SIGNAL_MODELS[k] for k in cfg.signal_models}
    else:
        overlays = {f"Gamma_{g!r}": baseline.SignalModelParams(f"Gamma={g}", g, cfg.chi) for g in cfg.gammas}

    def point(snr):
        row = scenario_point(cfg, snr, n)
        g0 = 10.0 ** (snr / 10.0)
        for col, model in overlays.items():
            row[col] = baseline.signal_model_fa_curve(g0, model, n, cfg.p, harmonic_noise_var(cfg.noise))
        return row

    return list(FIG1_BASE) + list(overlays), _pmap(point, cfg.snr_db, cfg.workers)


def roc_rows(cfg: ExperimentConfig, n: int) -> tuple[list[str], list[dict], float]:
    """(md bound, fa bound) pairs along a lambda sweep at ``roc_snr_db``, one beta for both curves."""
    noise = cfg.noise
    _, band = snr_mapping(cfg.roc_snr_db, noise, cfg.signal_lower_mult, cfg.signal_upper_mult)
    base = det.DetectorConfig(n, cfg.p, 1.0 if cfg.beta is None else cfg.beta, noise, band, parse_fading(cfg.fading))
    if cfg.beta is None:
        try:
            base = base.with_beta(det.optimize_beta(base, "min_fa_bound"))
        except det.NoAdmissibleBeta:
            pass
    lo = n * noise.var_upper
    hi = max(det.k_beta(base, True) * n, 2.0 * lo)
    m = cfg.roc_points
    rows = []
    for i in range(m):
        lam = lo + (hi - lo) * i / (m - 1)
        fa, ok = _fa_or_one(base, lam)
        rows.append({
            "lambda": lam, "md_max": det.md_max_bound(base, lam), "md_min": det.md_min_bound(base, lam),
            "fa_bound": fa, "fa_valid": ok,
        })
    return ["lambda", "md_max", "md_min", "fa_bound", "fa_valid"], rows, base.beta


def _plot_fig(path: Path, fields, rows, xcol, ycols, xlabel, ylabel, logy=True):
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "gsense"
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for c in ycols:
        ax.plot([r[xcol] for r in rows], [max(r[c], 1e-300) for r in rows], label=c)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run a figure experiment; returns the manifest (also written to ``out``)."""
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {"package_version": __version__, "config": _jsonable(asdict(cfg)), "seed": cfg.seed,
                "beta_rule": "fixed" if cfg.beta is not None else "optimize_beta(min_fa_bound) per point",
                "files": []}
    exp = cfg.experiment

    if exp in ("fig1a", "fig1b"):
        n = cfg.n_values[0]
        if cfg.calibrate:
            n, cal_rows = calibrate_n(cfg)
            csvio.write(out / f"{exp}_calibration.csv", FIG1_BASE, cal_rows)
            manifest["files"].append(f"{exp}_calibration.csv")
            manifest["calibration"] = {"snr_db": cfg.anchor_snr_db, "targets": list(cfg.anchor_targets),
                                       "candidates": list(CALIBRATION_N)}
        manifest["calibrated_n"] = n
        fields, rows = fig1_rows(cfg, n, "signals" if exp == "fig1a" else "gammas")
        csvio.write(out / f"{exp}.csv", fields, rows)
        manifest["files"].append(f"{exp}.csv")
        if cfg.plot:
            _plot_fig(out / f"{exp}.svg", fields, rows, "snr_db", ["fa_cons", "fa_aggr", "gaussian"] + fields[len(FIG1_BASE):],
                      "SNR (dB)", "false-alarm probability / bound")
            manifest["files"].append(f"{exp}.svg")
        manifest["rows"] = len(rows)
    elif exp == "fig2":
        fields = ["snr_db", "n", "beta_cons", "lambda_cons", "fa_cons", "valid_cons",
                  "beta_aggr", "lambda_aggr", "fa_aggr", "valid_aggr", "gaussian"]
        pts = [(s, n) for n in cfg.n_values for s in cfg.snr_db]
        rows = _pmap(lambda sn: scenario_point(cfg, *sn), pts, cfg.workers)
        csvio.write(out / "fig2.csv", fields, rows)
        manifest["files"].append("fig2.csv")
        if cfg.plot:
            _plot_fig(out / "fig2.svg", fields, rows, "snr_db", ["fa_cons", "fa_aggr", "gaussian"],
                      "SNR (dB)", "false-alarm probability / bound")
            manifest["files"].append("fig2.svg")
    elif exp == "fig3":
        n = cfg.n_values[0]
        fields, rows, beta = roc_rows(cfg, n)
        manifest["roc_beta"] = beta
        manifest["roc_n"] = n
        csvio.write(out / "fig3.csv", fields, rows)
        manifest["files"].append("fig3.csv")
        if cfg.plot:
            _plot_roc(out / "fig3.svg", rows)
            manifest["files"].append("fig3.svg")
    else:
        raise ValueError(f"run_experiment does not handle {exp!r}; use the CLI subcommand")

    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def _plot_roc(path: Path, rows):
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "gsense"
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot([r["md_max"] for r in rows], [r["fa_bound"] for r in rows], label="conservative (md max)")
    ax.plot([r["md_min"] for r in rows], [r["fa_bound"] for r in rows], label="aggressive (md min)")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("missed-detection bound")
    ax.set_ylabel("false-alarm bound")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj
