"""Energy detector under G-normal noise: threshold, error bounds and beta search.

The test rejects "signal present" when ``sum(Y_i^2) <= lambda``. For any
Chernoff parameter ``beta > 0``

* the worst-case (over signal levels and over the noise family) upper
  probability of missed detection is at most
  ``exp(beta lambda / (2 sh2)) (1 + beta)^(-rho n) L(A_lo)^n``;
* the best-case one obeys the same bound with ``A_hi`` in place of ``A_lo``;
* the upper probability of false alarm is at most the optimised Chernoff
  value ``exp(-(n/2) ln(n sh2 / lambda) - lambda / (2 sh2) + n/2)`` when
  ``lambda > n sh2``,

where ``sh2 = sigma_hi^2``, ``L(A) = E[exp(-A eps^2)]`` and
``A_s = beta s^2 / (2 sh2 (1 + beta))``. Choosing lambda so the first bound
equals ``p`` gives ``lambda = k_beta n + d_beta``.

All probabilities are carried as logarithms; ``(1 + beta)^(-rho n)`` alone
underflows for moderate ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from . import fading as fd
from .fading import FadingModel, SignalBand
from .gnormal import GNormalParams

BETA_MIN = 1e-4
BETA_MAX = 1e4
BETA_GRID = 200

Objective = Literal["min_fa_bound", "max_decay_magnitude"]


class NoAdmissibleBeta(ValueError):
    """No beta in the search bracket gives lambda > n sigma_hi^2."""


@dataclass(frozen=True)
class DetectorConfig:
    n: int
    p: float
    beta: float
    noise: GNormalParams
    band: SignalBand
    fading: FadingModel

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not (0.0 < self.p <= 1.0):
            raise ValueError(f"p must lie in (0, 1], got {self.p}")
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be positive, got {self.beta}")

    def with_beta(self, beta: float) -> "DetectorConfig":
        return replace(self, beta=float(beta))

    def with_n(self, n: int) -> "DetectorConfig":
        return replace(self, n=int(n))


def k_beta(cfg: DetectorConfig, use_upper_signal: bool = False) -> float:
    return fd.k_beta(cfg.fading, cfg.beta, cfg.noise, cfg.band, use_upper_signal)


def d_beta(cfg: DetectorConfig) -> float:
    """(2 sigma_hi^2 / beta) ln p."""
    return 2.0 * cfg.noise.var_upper / cfg.beta * math.log(cfg.p)


def threshold_lambda(cfg: DetectorConfig) -> float:
    """Threshold at which the worst-case missed-detection bound equals ``p``."""
    sh2, sl2, b, n = cfg.noise.var_upper, cfg.noise.var_lower, cfg.beta, cfg.n
    A = fd.laplace_argument(b, cfg.noise, cfg.band.sigma_x_lower)
    return (
        -2.0 * sh2 * n / b * fd.log_laplace_sq(cfg.fading, A)
        + sl2 * n / b * math.log1p(b)
        + 2.0 * sh2 / b * math.log(cfg.p)
    )


def log_md_bound(cfg: DetectorConfig, lam: float, use_upper_signal: bool = False) -> float:
    """Log of the missed-detection Chernoff bound, before clamping to 1."""
    s = cfg.band.sigma_x_upper if use_upper_signal else cfg.band.sigma_x_lower
    A = fd.laplace_argument(cfg.beta, cfg.noise, s)
    return (
        cfg.beta * lam / (2.0 * cfg.noise.var_upper)
        - cfg.noise.rho() * cfg.n * math.log1p(cfg.beta)
        + cfg.n * fd.log_laplace_sq(cfg.fading, A)
    )


def _clamped(logv: float) -> float:
    return 1.0 if logv >= 0.0 else math.exp(logv)


def md_max_bound(cfg: DetectorConfig, lam: float) -> float:
    """Bound on the missed-detection probability maximised over signal levels."""
    return _clamped(log_md_bound(cfg, lam, False))


def md_min_bound(cfg: DetectorConfig, lam: float) -> float:
    """Bound on the missed-detection probability minimised over signal levels."""
    return _clamped(log_md_bound(cfg, lam, True))


def lambda_for_md(
    cfg: DetectorConfig, target: float | None = None, use_upper_signal: bool = True, rtol: float = 1e-10
) -> float:
    """Solve ``md bound(lambda) = target`` by bisection on lambda.

    With ``use_upper_signal`` this is the aggressive threshold, where the
    best-case missed-detection bound is held at ``target`` (default ``cfg.p``).
    """
    target = cfg.p if target is None else target
    goal = math.log(target)

    def f(lam):
        return log_md_bound(cfg, lam, use_upper_signal) - goal

    step = max(1.0, abs(threshold_lambda(cfg)))
    lo, hi = -step, step
    while f(lo) > 0:
        lo -= step
        step *= 2
    while f(hi) < 0:
        hi += step
        step *= 2
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rtol * max(abs(lo), abs(hi), 1e-300):
            break
    return 0.5 * (lo + hi)


def log_fa_chernoff(n: int, lam: float, var_upper: float) -> float | None:
    """Log of inf_t E[exp(t Z^2)]^n / exp(t lambda) for sigma_hi noise; None when lambda <= n sh2."""
    if not lam > n * var_upper:
        return None
    return -0.5 * n * math.log(n * var_upper / lam) - lam / (2.0 * var_upper) + 0.5 * n


def fa_bound(cfg: DetectorConfig, lam: float) -> float | None:
    """Upper false-alarm bound at threshold ``lam``; None when ``lam <= n sigma_hi^2``."""
    logv = log_fa_chernoff(cfg.n, lam, cfg.noise.var_upper)
    return None if logv is None else _clamped(logv)


def decay_rate(k: float, noise: GNormalParams) -> float:
    """r(k) = 1/2 - ln(sigma_hi^2 / k) / 2 - k / (2 sigma_hi^2); never positive."""
    if not k > 0:
        raise ValueError(f"k must be positive, got {k}")
    sh2 = noise.var_upper
    return 0.5 - 0.5 * math.log(sh2 / k) - k / (2.0 * sh2)


def log_fa_theorem_bound(cfg: DetectorConfig) -> float:
    """Log of exp(-d_beta / (2 sh2)) exp(r(k_beta) n), the looser closed-form bound."""
    k = k_beta(cfg)
    return -d_beta(cfg) / (2.0 * cfg.noise.var_upper) + decay_rate(k, cfg.noise) * cfg.n


def fa_theorem_bound(cfg: DetectorConfig) -> float | None:
    """Closed-form false-alarm bound at ``threshold_lambda``; None when that threshold is invalid."""
    if not threshold_lambda(cfg) > cfg.n * cfg.noise.var_upper:
        return None
    return _clamped(log_fa_theorem_bound(cfg))


def _threshold(cfg: DetectorConfig, use_upper_signal: bool) -> float:
    if use_upper_signal:
        # closed form of the bisection target in lambda_for_md
        return k_beta(cfg, True) * cfg.n + d_beta(cfg)
    return threshold_lambda(cfg)


def _objective(cfg, objective: Objective, use_upper_signal: bool, log_beta: float) -> float:
    c = cfg.with_beta(math.exp(log_beta))
    lam = _threshold(c, use_upper_signal)
    if not lam > c.n * c.noise.var_upper:
        return math.inf
    if objective == "min_fa_bound":
        return log_fa_chernoff(c.n, lam, c.noise.var_upper)
    if objective == "max_decay_magnitude":
        return decay_rate(k_beta(c, use_upper_signal), c.noise)
    raise ValueError(f"unknown objective {objective!r}")


def optimize_beta(
    cfg: DetectorConfig,
    objective: Objective = "min_fa_bound",
    use_upper_signal: bool = False,
    tol: float = 1e-10,
) -> float:
    """Pick beta on [1e-4, 1e4]: a 200-point log grid, then golden section.

    Only beta with ``lambda(beta) > n sigma_hi^2`` are admissible; the
    objective is the log false-alarm bound or the decay rate ``r(k_beta)``
    (both minimised). The ``beta`` stored in ``cfg`` is ignored.
    """
    grid = np.linspace(math.log(BETA_MIN), math.log(BETA_MAX), BETA_GRID)
    vals = [_objective(cfg, objective, use_upper_signal, lb) for lb in grid]
    i = int(np.argmin(vals))
    if not math.isfinite(vals[i]):
        raise NoAdmissibleBeta(
            f"no beta in [{BETA_MIN:g}, {BETA_MAX:g}] gives lambda > n sigma_hi^2 "
            f"(n={cfg.n}, fading={cfg.fading.spec()})"
        )
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, BETA_GRID - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = _objective(cfg, objective, use_upper_signal, c)
    fdv = _objective(cfg, objective, use_upper_signal, d)
    while b - a > tol:
        if fc <= fdv:
            b, d, fdv = d, c, fc
            c = b - invphi * (b - a)
            fc = _objective(cfg, objective, use_upper_signal, c)
        else:
            a, c, fc = c, d, fdv
            d = a + invphi * (b - a)
            fdv = _objective(cfg, objective, use_upper_signal, d)
    best_lb, best = (c, fc) if fc <= fdv else (d, fdv)
    if vals[i] < best:
        best_lb = grid[i]
    return float(math.exp(best_lb))


CSV_FIELDS = (
    "n", "p", "beta", "sigma_lo", "sigma_hi", "sx_lo", "sx_hi", "fading_spec",
    "lambda", "k_beta", "d_beta", "md_max", "md_min", "fa_bound", "fa_valid",
    "decay_rate", "decay_ok",
)


@dataclass(frozen=True)
class BoundReport:
    """Threshold and bounds for one configuration.

    Probabilities are clamped to [0, 1]; the ``log_*`` fields keep the raw
    pre-clamp logarithms. ``decay_ok`` means ``k_beta > sigma_hi^2``, the
    regime where lambda eventually exceeds ``n sigma_hi^2`` and the
    false-alarm bound decays at rate ``decay_rate`` per sample.
    """

    cfg: DetectorConfig
    lam: float
    k_beta: float
    d_beta: float
    rho: float
    md_max_bound: float
    md_min_bound: float
    fa_bound: float | None
    fa_valid: bool
    decay_rate: float
    decay_ok: bool
    log_md_max: float
    log_md_min: float
    log_fa: float | None
    fa_theorem_bound: float | None
    warning: str = ""

    def row(self) -> dict:
        c = self.cfg
        return {
            "n": c.n, "p": c.p, "beta": c.beta,
            "sigma_lo": c.noise.sigma_lower, "sigma_hi": c.noise.sigma_upper,
            "sx_lo": c.band.sigma_x_lower, "sx_hi": c.band.sigma_x_upper,
            "fading_spec": c.fading.spec(),
            "lambda": self.lam, "k_beta": self.k_beta, "d_beta": self.d_beta,
            "md_max": self.md_max_bound, "md_min": self.md_min_bound,
            "fa_bound": self.fa_bound, "fa_valid": self.fa_valid,
            "decay_rate": self.decay_rate, "decay_ok": self.decay_ok,
        }


def bound_report(cfg: DetectorConfig, lam: float | None = None, warning: str = "") -> BoundReport:
    """Evaluate every bound at ``lam`` (default: :func:`threshold_lambda`)."""
    if lam is None:
        lam = threshold_lambda(cfg)
    k = k_beta(cfg)
    lmax = log_md_bound(cfg, lam, False)
    lmin = log_md_bound(cfg, lam, True)
    lfa = log_fa_chernoff(cfg.n, lam, cfg.noise.var_upper)
    sh2 = cfg.noise.var_upper
    return BoundReport(
        cfg=cfg,
        lam=lam,
        k_beta=k,
        d_beta=d_beta(cfg),
        rho=cfg.noise.rho(),
        md_max_bound=_clamped(lmax),
        md_min_bound=_clamped(lmin),
        fa_bound=None if lfa is None else _clamped(lfa),
        fa_valid=lfa is not None,
        decay_rate=decay_rate(k, cfg.noise),
        decay_ok=k > sh2,
        log_md_max=lmax,
        log_md_min=lmin,
        log_fa=lfa,
        fa_theorem_bound=_clamped(log_fa_theorem_bound(cfg)) if threshold_lambda(cfg) > cfg.n * sh2 else None,
        warning=warning,
    )
