"""Classical comparison: SNR averaged over a truncated (modified) Gaussian.

A known signal type is modelled by a received SNR ``gamma`` with density

    f(y) = kappa / (sqrt(2 pi) s) exp(-(y - gamma0)^2 / (2 s^2)),  y >= 0,
    s^2 = Gamma * N^(-chi) * gamma0^2,

and an error probability curve ``P(y)`` is averaged against it. ``N`` is
taken to be the detector's sample count. The per-SNR curves are the usual
CLT approximation of the energy detector with perfectly known noise power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy import integrate
from scipy.special import ndtr, ndtri

from .gnormal import NumericalError

TAIL_SIGMAS = 12.0


@dataclass(frozen=True)
class SignalModelParams:
    name: str
    Gamma: float
    chi: float


SIGNAL_MODELS = {
    "dtv": SignalModelParams("digital TV", 0.01, 0.59),
    "dabt": SignalModelParams("DAB-T", 0.055, 0.051),
    "egsm": SignalModelParams("E-GSM", 0.23, 0.24),
    "atv": SignalModelParams("analogical TV", 0.29, 0.17),
    "umts": SignalModelParams("UMTS", 0.7, 0.23),
}


def normalization_kappa(gamma0: float, sigma_gamma: float) -> float:
    """1 / Phi(gamma0 / sigma_gamma): restores unit mass after truncation at zero."""
    if not (gamma0 > 0 and sigma_gamma > 0):
        raise ValueError("gamma0 and sigma_gamma must be positive")
    return 1.0 / float(ndtr(gamma0 / sigma_gamma))


@dataclass(frozen=True)
class SnrDistribution:
    gamma0: float
    sigma_gamma: float
    N: int | None = None

    def __post_init__(self):
        if not (self.gamma0 > 0 and self.sigma_gamma > 0):
            raise ValueError("gamma0 and sigma_gamma must be positive")

    @classmethod
    def for_signal(cls, gamma0: float, model: SignalModelParams, N: int) -> "SnrDistribution":
        sigma = math.sqrt(model.Gamma * N ** (-model.chi)) * gamma0
        return cls(gamma0, sigma, N)

    @property
    def kappa(self) -> float:
        return normalization_kappa(self.gamma0, self.sigma_gamma)

    @property
    def upper(self) -> float:
        return self.gamma0 + TAIL_SIGMAS * self.sigma_gamma

    @property
    def lower(self) -> float:
        return max(0.0, self.gamma0 - TAIL_SIGMAS * self.sigma_gamma)

    def pdf(self, y: float) -> float:
        if y < 0:
            return 0.0
        s = self.sigma_gamma
        return self.kappa / (math.sqrt(2.0 * math.pi) * s) * math.exp(-0.5 * ((y - self.gamma0) / s) ** 2)


def averaged_probability(prob_curve: Callable[[float], float], dist: SnrDistribution) -> float:
    """Integral of ``prob_curve(y) f(y)`` over the effective support of ``dist``."""
    kappa = dist.kappa
    s = dist.sigma_gamma
    c = kappa / (math.sqrt(2.0 * math.pi) * s)

    def integrand(y):
        return prob_curve(y) * c * math.exp(-0.5 * ((y - dist.gamma0) / s) ** 2)

    # panels split at the mode keep quad from missing a narrow peak
    total = 0.0
    for a, b in ((dist.lower, dist.gamma0), (dist.gamma0, dist.upper)):
        if b <= a:
            continue
        val, err, *info = integrate.quad(integrand, a, b, epsabs=1e-12, epsrel=1e-12, limit=500, full_output=1)
        if len(info) > 1 and err > 1e-8:
            raise NumericalError(f"quadrature did not converge (err estimate {err:g})")
        total += val
    return total


def q_function(x: float) -> float:
    """Standard normal upper tail."""
    return float(ndtr(-x))


def classical_ed_probabilities(snr: float, n: int, lam: float, noise_var: float) -> tuple[float, float]:
    """(P_md, P_fa) of the energy detector under Gaussian signal and noise, CLT form."""
    if snr < 0 or n < 1 or noise_var <= 0:
        raise ValueError("need snr >= 0, n >= 1, noise_var > 0")
    p_fa = q_function((lam - n * noise_var) / (math.sqrt(2.0 * n) * noise_var))
    tot = noise_var * (1.0 + snr)
    p_md = 1.0 - q_function((lam - n * tot) / (math.sqrt(2.0 * n) * tot))
    return p_md, p_fa


def classical_lambda_for_md(snr: float, n: int, p: float, noise_var: float) -> float:
    """Threshold putting the classical missed-detection probability at ``p``."""
    tot = noise_var * (1.0 + snr)
    return tot * (n + math.sqrt(2.0 * n) * float(ndtri(p)))


def classical_fa_at_md(snr: float, n: int, p: float, noise_var: float) -> float:
    """False-alarm probability at the threshold with missed detection ``p``."""
    lam = classical_lambda_for_md(snr, n, p, noise_var)
    return classical_ed_probabilities(snr, n, lam, noise_var)[1]


def signal_model_fa_curve(gamma0: float, model: SignalModelParams, n: int, p: float, noise_var: float = 1.0) -> float:
    """False alarm of a known signal type, averaged over its SNR spread."""
    dist = SnrDistribution.for_signal(gamma0, model, n)
    return averaged_probability(lambda y: classical_fa_at_md(y, n, p, noise_var), dist)
