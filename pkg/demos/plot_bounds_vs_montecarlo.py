"""
Analytic bounds against simulated scenarios
===========================================

The bounds hold for every measure in the uncertainty family. A simulation
can only try a handful of members (fixed variance paths, fixed signal
levels), so the simulated rates are lower estimates of the worst case and
must all sit under the analytic bound.
"""

import sys

import numpy as np

from gsense import detector as det
from gsense import mcsim
from gsense.fading import Rayleigh, SignalBand
from gsense.gnormal import GNormalParams

cfg = det.DetectorConfig(
    n=200, p=0.01, beta=1.0,
    noise=GNormalParams(1.0, np.sqrt(2.0)),
    band=SignalBand(2.0, 3.0),
    fading=Rayleigh(1.0),
)

# Pick beta to make the false-alarm bound as small as possible.
cfg = cfg.with_beta(det.optimize_beta(cfg))
report = det.bound_report(cfg)
print(f"beta={cfg.beta:.4f} lambda={report.lam:.3f}")
print(f"missed detection <= {report.md_max_bound:.4g} (best case {report.md_min_bound:.4g})")
print(f"false alarm      <= {report.fa_bound}")

# Eight scenarios, 20k trials each. Raise trials for tighter error bars.
sweep = mcsim.scenario_sweep(cfg, report.lam, trials=20_000, seed=1)
mcsim.write_sweep_csv(sweep, sys.stdout)
print("all dominated:", sweep.all_dominated)
