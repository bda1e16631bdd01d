"""Special functions needed by the fading densities.

Only two are required: the exponentially scaled modified Bessel function
``I0(x) * exp(-|x|)`` (Rician density) and ``ln Gamma`` (Nakagami density).
Both are evaluated in plain floating point without scipy so that the
densities stay self-contained.
"""

import math

import numpy as np

# Power series below this argument, large-argument asymptotic expansion above.
I0_SWITCH = 15.0

# Lanczos coefficients for g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _i0e_series(x):
    # sum_k (x/2)^{2k} / (k!)^2, all terms positive so no cancellation
    q = 0.25 * x * x
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        term *= q / (k * k)
        total += term
        if term < 1e-17 * total:
            break
    return total * math.exp(-x)


def _i0e_asymptotic(x):
    # I0(x) e^{-x} ~ (2 pi x)^{-1/2} sum_k ((2k-1)!!)^2 / (k! (8x)^k),
    # truncated before the terms start growing (error ~ e^{-2x}).
    total = 1.0
    term = 1.0
    k = 1
    while True:
        nxt = term * (2 * k - 1) ** 2 / (8.0 * k * x)
        if nxt >= term:
            break
        total += nxt
        term = nxt
        k += 1
        if term < 1e-17 * total:
            break
    return total / math.sqrt(2.0 * math.pi * x)


def i0e_scalar(x: float) -> float:
    """Exponentially scaled modified Bessel function of order zero."""
    x = abs(float(x))
    if x < I0_SWITCH:
        return _i0e_series(x)
    return _i0e_asymptotic(x)


def i0e(x):
    """Vectorised :func:`i0e_scalar`. Returns a float for scalar input."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return i0e_scalar(float(arr))
    return np.vectorize(i0e_scalar, otypes=[float])(arr)


def i0(x):
    """Modified Bessel function of the first kind, order zero."""
    arr = np.asarray(x, dtype=float)
    return i0e(arr) * np.exp(np.abs(arr))


def lgamma(z: float) -> float:
    """ln Gamma(z) for z > 0 by the Lanczos approximation."""
    z = float(z)
    if z <= 0.0:
        raise ValueError("lgamma is only provided for positive arguments")
    if z < 0.5:
        # reflection keeps the approximation in its accurate region
        return math.log(math.pi / math.sin(math.pi * z)) - lgamma(1.0 - z)
    z -= 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return 0.5 * math.log(2.0 * math.pi) + (z + 0.5) * math.log(t) - t + math.log(acc)
