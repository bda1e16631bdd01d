"""Channel fading models: constant, Rayleigh, Rician and Nakagami-m.

Every model exposes the Laplace-type transform of the squared gain,
``E[exp(-A eps^2)]``, in closed form. The threshold slope ``k_beta`` of the
energy detector is built on it, and so is its small-``beta`` limit
``sigma_X^2 E[eps^2] + sigma_lo^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from ._special import i0e, lgamma
from .gnormal import GNormalParams


def _positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise ValueError(f"{name} must be positive and finite, got {value}")


@dataclass(frozen=True)
class Constant:
    epsilon: float

    def __post_init__(self):
        _positive("epsilon", self.epsilon)

    def log_laplace_sq(self, A: float) -> float:
        return -A * self.epsilon**2

    def mean_square(self) -> float:
        return self.epsilon**2

    def pdf(self, x):
        raise ValueError("constant fading is degenerate and has no density")

    def draw(self, rng: np.random.Generator, size=None):
        if size is None:
            return float(self.epsilon)
        return np.full(size, float(self.epsilon))

    def spec(self) -> str:
        return f"constant:eps={self.epsilon!r}"


@dataclass(frozen=True)
class Rayleigh:
    sigma: float

    def __post_init__(self):
        _positive("sigma", self.sigma)

    def log_laplace_sq(self, A: float) -> float:
        return -math.log1p(2.0 * A * self.sigma**2)

    def mean_square(self) -> float:
        return 2.0 * self.sigma**2

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        s2 = self.sigma**2
        out = np.where(x >= 0, x / s2 * np.exp(-0.5 * x * x / s2), 0.0)
        return float(out) if out.ndim == 0 else out

    def draw(self, rng: np.random.Generator, size=None):
        return rng.rayleigh(self.sigma, size)

    def spec(self) -> str:
        return f"rayleigh:sigma={self.sigma!r}"


@dataclass(frozen=True)
class Rician:
    sigma: float
    v: float

    def __post_init__(self):
        _positive("sigma", self.sigma)
        if not (self.v >= 0 and math.isfinite(self.v)):
            raise ValueError(f"v must be nonnegative and finite, got {self.v}")

    def log_laplace_sq(self, A: float) -> float:
        q = 2.0 * self.sigma**2 * A
        return -math.log1p(q) - A * self.v**2 / (q + 1.0)

    def mean_square(self) -> float:
        return 2.0 * self.sigma**2 + self.v**2

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        s2 = self.sigma**2
        xp = np.maximum(x, 0.0)
        # x/s2 exp(-(x^2+v^2)/(2 s2)) I0(x v/s2), with I0 scaled to avoid overflow
        body = xp / s2 * np.exp(-0.5 * (xp - self.v) ** 2 / s2) * i0e(xp * self.v / s2)
        out = np.where(x >= 0, body, 0.0)
        return float(out) if out.ndim == 0 else out

    def draw(self, rng: np.random.Generator, size=None):
        re = rng.normal(self.v, self.sigma, size)
        im = rng.normal(0.0, self.sigma, size)
        return np.hypot(re, im)

    def spec(self) -> str:
        return f"rician:sigma={self.sigma!r},v={self.v!r}"


@dataclass(frozen=True)
class Nakagami:
    m: float
    omega: float

    def __post_init__(self):
        if not (self.m >= 0.5 and math.isfinite(self.m)):
            raise ValueError(f"Nakagami m must be >= 1/2, got {self.m}")
        _positive("omega", self.omega)

    def log_laplace_sq(self, A: float) -> float:
        return -self.m * math.log1p(A * self.omega / self.m)

    def mean_square(self) -> float:
        return self.omega

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        m, om = self.m, self.omega
        xp = np.where(x > 0, x, 1.0)
        logc = math.log(2.0) - lgamma(m) + m * math.log(m / om)
        body = np.exp(logc + (2 * m - 1) * np.log(xp) - m / om * xp * xp)
        if m == 0.5:
            at0 = math.exp(logc)
        else:
            at0 = 0.0
        out = np.where(x > 0, body, np.where(x == 0, at0, 0.0))
        return float(out) if out.ndim == 0 else out

    def draw(self, rng: np.random.Generator, size=None):
        return np.sqrt(rng.gamma(self.m, self.omega / self.m, size))

    def spec(self) -> str:
        return f"nakagami:m={self.m!r},omega={self.omega!r}"


FadingModel = Union[Constant, Rayleigh, Rician, Nakagami]


@dataclass(frozen=True)
class SignalBand:
    """Admissible signal magnitudes: sigma_x_lower <= |X| <= sigma_x_upper."""

    sigma_x_lower: float
    sigma_x_upper: float

    def __post_init__(self):
        if not (self.sigma_x_lower > 0 and self.sigma_x_upper >= self.sigma_x_lower):
            raise ValueError(
                f"need 0 < sigma_x_lower <= sigma_x_upper, got "
                f"({self.sigma_x_lower}, {self.sigma_x_upper})"
            )


def laplace_sq(model: FadingModel, A: float) -> float:
    """E[exp(-A eps^2)] for A >= 0."""
    return math.exp(log_laplace_sq(model, A))


def log_laplace_sq(model: FadingModel, A: float) -> float:
    if A < 0:
        raise ValueError(f"A must be nonnegative, got {A}")
    return model.log_laplace_sq(float(A))


def laplace_argument(beta: float, noise: GNormalParams, signal: float) -> float:
    """A = beta s^2 / (2 sigma_hi^2 (1 + beta))."""
    return beta * signal**2 / (2.0 * noise.var_upper * (1.0 + beta))


def k_beta(
    model: FadingModel,
    beta: float,
    noise: GNormalParams,
    band: SignalBand,
    use_upper_signal: bool = False,
) -> float:
    """Slope of the detection threshold in the sample count.

    ``-(2 sigma_hi^2 / beta) ln E[exp(-A eps^2)] + (sigma_lo^2 / beta) ln(1 + beta)``
    with ``A`` built from the lower signal level, or the upper one when
    ``use_upper_signal`` is set.
    """
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    s = band.sigma_x_upper if use_upper_signal else band.sigma_x_lower
    A = laplace_argument(beta, noise, s)
    return (
        -2.0 * noise.var_upper / beta * log_laplace_sq(model, A)
        + noise.var_lower / beta * math.log1p(beta)
    )


def k_beta_limit(model: FadingModel, noise: GNormalParams, band: SignalBand, use_upper_signal: bool = False) -> float:
    """Limit of :func:`k_beta` as beta -> 0: sigma_X^2 E[eps^2] + sigma_lo^2."""
    s = band.sigma_x_upper if use_upper_signal else band.sigma_x_lower
    return s**2 * model.mean_square() + noise.var_lower


def decay_condition(model: FadingModel, noise: GNormalParams, band: SignalBand) -> bool:
    """True iff some beta makes the false-alarm bound decay exponentially in n."""
    return k_beta_limit(model, noise, band) > noise.var_upper


def sample(model: FadingModel, rng: np.random.Generator, size=None):
    """Draw fading gains; a single float when ``size`` is None."""
    out = model.draw(rng, size)
    if size is None:
        return float(out)
    return out


def pdf(model: FadingModel, x):
    return model.pdf(x)


_MODELS = {
    "constant": (Constant, {"eps": "epsilon"}),
    "rayleigh": (Rayleigh, {"sigma": "sigma"}),
    "rician": (Rician, {"sigma": "sigma", "v": "v"}),
    "nakagami": (Nakagami, {"m": "m", "omega": "omega"}),
}


def parse_fading(spec: str) -> FadingModel:
    """Parse ``name:key=value,key=value`` such as ``rician:sigma=1,v=1``."""
    if ":" not in spec:
        raise ValueError(f"fading spec {spec!r} is missing ':' (e.g. rayleigh:sigma=1)")
    name, _, body = spec.partition(":")
    if name not in _MODELS:
        raise ValueError(f"unknown fading model {name!r}; expected one of {sorted(_MODELS)}")
    cls, keys = _MODELS[name]
    kwargs = {}
    for item in body.split(","):
        key, eq, val = item.partition("=")
        if not eq or key not in keys:
            raise ValueError(f"fading spec {spec!r}: bad field {item!r} (expected keys {sorted(keys)})")
        try:
            kwargs[keys[key]] = float(val)
        except ValueError:
            raise ValueError(f"fading spec {spec!r}: {key}={val!r} is not a number") from None
    missing = set(keys.values()) - set(kwargs)
    if missing:
        raise ValueError(f"fading spec {spec!r}: missing {sorted(missing)}")
    return cls(**kwargs)


def fading_spec(model: FadingModel) -> str:
    return model.spec()
