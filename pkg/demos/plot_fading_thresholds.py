"""
Fading models and the threshold slope k_beta
============================================

The detection threshold grows like k_beta * n. Whether the false-alarm
bound can decay exponentially depends on one comparison: the small-beta
limit of k_beta against the upper noise variance.
"""

import numpy as np

from gsense import fading as fd
from gsense.fading import Constant, Nakagami, Rayleigh, Rician, SignalBand
from gsense.gnormal import GNormalParams

noise = GNormalParams(1.0, np.sqrt(2.0))
band = SignalBand(1.0, 3.0)

models = [Constant(1.2), Rayleigh(1.0), Rician(1.0, 1.0), Nakagami(2.0, 1.0)]
betas = np.logspace(-4, 4, 9)

# k_beta falls from its limit towards 0 as beta grows.
for m in models:
    ks = [fd.k_beta(m, b, noise, band) for b in betas]
    print(f"{m.spec():24s} limit={fd.k_beta_limit(m, noise, band):.4f} "
          f"decays={fd.decay_condition(m, noise, band)}  k(beta)=" + " ".join(f"{k:.3f}" for k in ks))

# The expectation inside k_beta has a closed form for each model; a quick
# Monte Carlo check on the Rician case.
rng = np.random.default_rng(0)
draws = fd.sample(Rician(1.0, 1.0), rng, 200_000)
print("Rician E[exp(-0.5 eps^2)]: closed form", fd.laplace_sq(Rician(1.0, 1.0), 0.5),
      " Monte Carlo", np.exp(-0.5 * draws**2).mean())
