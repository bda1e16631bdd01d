r"""Numerics for the G-normal distribution N({0} x [sigma_lo^2, sigma_hi^2]).

The sublinear expectation of a payoff is the value of the G-heat equation

.. math::
    u_t = G(u_{xx}), \qquad u(0, x) = \varphi(x), \qquad
    G(y) = \tfrac12(\bar\sigma^2 y^+ - \underline\sigma^2 y^-),

at ``u(t, x) = E[phi(x + sqrt(t) xi)]``; ``E[phi(xi)]`` is ``u(1, 0)``.

The solver is the explicit monotone scheme: forward Euler in time, the
three-point second difference in space, and G applied node-wise to that
difference. Under ``dt <= dx^2 / sigma_hi^2`` every update is a convex
combination of neighbouring values, which gives the discrete comparison
principle and convergence to the viscosity solution.

Truncation. The grid covers ``center +/- L * sigma_hi * sqrt(horizon)`` with
``L = 8`` and keeps the payoff frozen at the two boundary nodes. The value
at the centre is perturbed by at most the payoff oscillation on the
boundary region times the probability that a martingale with volatility
in the band reaches distance ``L * sigma_hi * sqrt(horizon)`` within the
horizon; by the reflection principle that is below ``2 * P(|N(0,1)| > 8)``,
about ``2.5e-15``, for payoffs of polynomial growth.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
from scipy import integrate

Convexity = Literal["convex", "concave", "general"]

DEFAULT_HALF_WIDTH = 8.0
DEFAULT_MIN_NODES = 801
CFL_SAFETY = 0.9
QUAD_HALF_WIDTH = 10.0
QUAD_ABSTOL = 1e-10


class NumericalError(RuntimeError):
    """A quadrature or solver step failed to reach its tolerance."""


@dataclass(frozen=True)
class GNormalParams:
    """Variance band of G-normal noise, stored as standard deviations."""

    sigma_lower: float
    sigma_upper: float

    def __post_init__(self):
        if not (self.sigma_lower > 0 and self.sigma_upper >= self.sigma_lower):
            raise ValueError(
                f"need 0 < sigma_lower <= sigma_upper, got "
                f"({self.sigma_lower}, {self.sigma_upper})"
            )
        if not math.isfinite(self.sigma_upper):
            raise ValueError("sigma_upper must be finite")

    @property
    def var_lower(self) -> float:
        return self.sigma_lower**2

    @property
    def var_upper(self) -> float:
        return self.sigma_upper**2

    def rho(self) -> float:
        """sigma_lo^2 / (2 sigma_hi^2), in (0, 1/2]."""
        return self.var_lower / (2.0 * self.var_upper)


@dataclass
class PayoffFunction:
    """A payoff ``phi`` together with what is known about its shape.

    ``growth_order`` and ``growth_const`` certify
    ``|phi(x) - phi(y)| <= C (1 + |x|^m + |y|^m) |x - y|``; they are
    informational and used only by :meth:`check_growth`.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    convexity_tag: Convexity = "general"
    growth_order: int = 1
    growth_const: float = 1.0
    name: str = ""

    def __call__(self, x):
        return self.eval(x)

    def check_growth(self, points: np.ndarray) -> bool:
        x = np.asarray(points, dtype=float)
        y = x[::-1]
        lhs = np.abs(self.eval(x) - self.eval(y))
        m = self.growth_order
        rhs = self.growth_const * (1 + np.abs(x) ** m + np.abs(y) ** m) * np.abs(x - y)
        return bool(np.all(lhs <= rhs + 1e-12))

    def verify_convexity(
        self, lo: float = -5.0, hi: float = 5.0, pairs: int = 64, seed: int = 0
    ) -> Convexity:
        """Midpoint check on random pairs; downgrades the tag to ``general`` on failure."""
        if self.convexity_tag == "general":
            return "general"
        rng = np.random.default_rng(seed)
        a = rng.uniform(lo, hi, pairs)
        b = rng.uniform(lo, hi, pairs)
        fa, fb, fm = self.eval(a), self.eval(b), self.eval(0.5 * (a + b))
        gap = 0.5 * (fa + fb) - fm
        scale = 1e-12 * (1.0 + np.abs(fa) + np.abs(fb))
        ok = np.all(gap >= -scale) if self.convexity_tag == "convex" else np.all(gap <= scale)
        if not ok:
            self.convexity_tag = "general"
        return self.convexity_tag


@dataclass
class GHeatSolution:
    grid: np.ndarray
    times: np.ndarray
    values: np.ndarray  # shape (len(times), len(grid))
    params: GNormalParams
    dx: float
    dt: float
    half_width: float
    center: float = 0.0
    payoff_name: str = field(default="", repr=False)

    def value_at(self, x: float | None = None, t: float | None = None) -> float:
        """Linear interpolation of the solution at time level ``t`` (default: last)."""
        if x is None:
            x = self.center
        row = -1 if t is None else int(np.argmin(np.abs(self.times - t)))
        return float(np.interp(x, self.grid, self.values[row]))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x", "u"])
            for t, row in zip(self.times, self.values):
                for x, u in zip(self.grid, row):
                    w.writerow([repr(float(t)), repr(float(x)), repr(float(u))])


def g_function(x, params: GNormalParams):
    """G(x) = (sigma_hi^2 x^+ - sigma_lo^2 x^-) / 2."""
    x = np.asarray(x, dtype=float)
    out = 0.5 * (params.var_upper * np.maximum(x, 0.0) - params.var_lower * np.maximum(-x, 0.0))
    return float(out) if out.ndim == 0 else out


def solve_gheat(
    payoff: PayoffFunction | Callable,
    params: GNormalParams,
    horizon: float = 1.0,
    center: float = 0.0,
    *,
    half_width: float = DEFAULT_HALF_WIDTH,
    nodes: int = DEFAULT_MIN_NODES,
    dt: float | None = None,
    n_records: int = 101,
) -> GHeatSolution:
    """Solve the G-heat equation up to ``horizon`` on a truncated uniform grid.

    ``nodes`` is raised to the next odd number so that ``center`` is a node.
    ``dt`` defaults to ``0.9 * dx^2 / (2 sigma_hi^2)`` and is shrunk so the
    step count is a multiple of ``n_records - 1``; the solution keeps
    ``n_records`` evenly spaced time levels including 0 and ``horizon``.
    """
    if not horizon > 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    if nodes < 3:
        raise ValueError("need at least 3 grid nodes")
    if n_records < 2:
        raise ValueError("n_records must be >= 2")
    if nodes % 2 == 0:
        nodes += 1
    phi = payoff.eval if isinstance(payoff, PayoffFunction) else payoff

    width = half_width * params.sigma_upper * math.sqrt(horizon)
    grid = np.linspace(center - width, center + width, nodes)
    dx = grid[1] - grid[0]
    dt_max = dx * dx / (2.0 * params.var_upper)
    if dt is None:
        dt = CFL_SAFETY * dt_max
    elif dt > dt_max:
        raise ValueError(f"dt={dt:g} violates the stability bound dx^2/(2 sigma_hi^2)={dt_max:g}")

    per_record = math.ceil(horizon / dt / (n_records - 1))
    steps = per_record * (n_records - 1)
    dt = horizon / steps

    c_hi = 0.5 * params.var_upper * dt / (dx * dx)
    c_lo = 0.5 * params.var_lower * dt / (dx * dx)

    u = np.asarray(phi(grid), dtype=float).copy()
    if u.shape != grid.shape or not np.all(np.isfinite(u)):
        raise ValueError("payoff must be finite on the truncated domain")

    values = np.empty((n_records, nodes))
    values[0] = u
    lap = np.empty(nodes - 2)
    for rec in range(1, n_records):
        for _ in range(per_record):
            np.subtract(u[2:] + u[:-2], 2.0 * u[1:-1], out=lap)
            u[1:-1] += np.maximum(c_hi * lap, c_lo * lap)
        values[rec] = u

    times = np.linspace(0.0, horizon, n_records)
    name = payoff.name if isinstance(payoff, PayoffFunction) else ""
    return GHeatSolution(grid, times, values, params, dx, dt, half_width, center, name)


def gaussian_expectation(phi: Callable, scale: float) -> float:
    """E[phi(scale * Z)] for standard normal Z, by adaptive Gauss-Kronrod quadrature."""
    if scale == 0:
        return float(phi(np.asarray(0.0)))
    lim = QUAD_HALF_WIDTH * scale
    norm = 1.0 / (math.sqrt(2.0 * math.pi) * scale)

    def integrand(y):
        return float(phi(np.asarray(y))) * norm * math.exp(-0.5 * (y / scale) ** 2)

    # split at 0 so kinks at the origin land on a panel edge
    total = 0.0
    for a, b in ((-lim, 0.0), (0.0, lim)):
        val, err, *info = integrate.quad(
            integrand, a, b, epsabs=QUAD_ABSTOL, epsrel=1e-12, limit=500, full_output=1
        )
        if len(info) > 1 and err > 1e3 * QUAD_ABSTOL:
            raise NumericalError(f"quadrature did not converge (err estimate {err:g})")
        total += val
    return total


def expectation_extremal(payoff: PayoffFunction, params: GNormalParams) -> float:
    """Closed-form G-expectation of a convex or concave payoff.

    Convex payoffs are integrated against N(0, sigma_hi^2), concave ones
    against N(0, sigma_lo^2).
    """
    tag = payoff.convexity_tag
    if tag == "convex":
        return gaussian_expectation(payoff.eval, params.sigma_upper)
    if tag == "concave":
        return gaussian_expectation(payoff.eval, params.sigma_lower)
    raise ValueError("no closed form for a payoff of general shape; use solve_gheat")


def lemma_estimate_bound(beta, a, t, x, params: GNormalParams):
    """Upper estimate of the G-heat solution started from a Gaussian bump.

    For ``phi(x) = exp(-beta (x - a)^2 / (2 sigma_hi^2))`` the solution obeys
    ``u(t, x) <= (1 + beta t)^(-rho) exp(-beta (x - a)^2 / (2 (1 + beta t) sigma_hi^2))``.
    """
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    x = np.asarray(x, dtype=float)
    s = 1.0 + beta * t
    out = s ** (-params.rho()) * np.exp(-beta * (x - a) ** 2 / (2.0 * s * params.var_upper))
    return float(out) if out.ndim == 0 else out


def gaussian_envelope(payoff: PayoffFunction | Callable, params: GNormalParams, v_grid_size: int = 41) -> float:
    """max over v in [sigma_lo, sigma_hi] of E[phi(v Z)]: a lower bound for E[phi(xi)]."""
    if v_grid_size < 2:
        raise ValueError("v_grid_size must be >= 2")
    phi = payoff.eval if isinstance(payoff, PayoffFunction) else payoff
    vs = np.linspace(params.sigma_lower, params.sigma_upper, v_grid_size)
    return max(gaussian_expectation(phi, float(v)) for v in vs)


def exponential_payoff(beta: float, a: float, params: GNormalParams) -> PayoffFunction:
    """The Gaussian bump payoff used by :func:`lemma_estimate_bound`."""
    c = beta / (2.0 * params.var_upper)
    return PayoffFunction(lambda x: np.exp(-c * (np.asarray(x) - a) ** 2), "general", 1, 1.0, "bump")
