"""
Sublinear expectations of a G-normal variable
=============================================

A G-normal variable has variance known only up to a band
[sigma_lo^2, sigma_hi^2]. Its expectation of a payoff phi is the value at
(t=1, x=0) of the G-heat equation started from phi. For convex payoffs the
answer is the ordinary Gaussian expectation at the top of the band, for
concave payoffs at the bottom. For everything else only the PDE knows.
"""

import numpy as np

from gsense.gnormal import (
    GNormalParams,
    PayoffFunction,
    expectation_extremal,
    gaussian_envelope,
    solve_gheat,
)

params = GNormalParams(1.0, np.sqrt(2.0))

# A convex payoff: the PDE and the sigma_hi Gaussian agree.
square = PayoffFunction(lambda x: x**2, "convex", name="x^2")
print("E[x^2]   PDE  :", solve_gheat(square, params).value_at())
print("E[x^2]   exact:", expectation_extremal(square, params))

# A concave payoff: the sigma_lo Gaussian wins.
cap = PayoffFunction(lambda x: -np.abs(x), "concave", name="-|x|")
print("E[-|x|]  PDE  :", solve_gheat(cap, params).value_at())
print("E[-|x|]  exact:", expectation_extremal(cap, params))

# x^3 is neither. Every classical Gaussian in the band gives 0, yet the
# sublinear expectation is strictly positive: the worst case switches
# variance with the sign of the curvature.
cube = PayoffFunction(lambda x: x**3, name="x^3")
sol = solve_gheat(cube, params)
print("E[x^3]   PDE  :", sol.value_at())
print("max over constant-variance Gaussians:", gaussian_envelope(cube, params))

# The solution surface can be inspected or saved for plotting.
sol.to_csv("gheat_cube.csv")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots()
    for i in (0, 25, 50, 100):
        ax.plot(sol.grid, sol.values[i], label=f"t = {sol.times[i]:.2f}")
    ax.set_xlim(-4, 4)
    ax.set_ylim(-20, 20)
    ax.set_xlabel("x")
    ax.set_ylabel("u(t, x)")
    ax.legend()
    fig.savefig("gheat_cube.svg")
