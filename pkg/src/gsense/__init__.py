"""Energy detection for cognitive radio under G-normal noise uncertainty."""

__version__ = "0.1.0"

from .gnormal import GNormalParams, PayoffFunction, solve_gheat, expectation_extremal  # noqa: E402
from .fading import Constant, Rayleigh, Rician, Nakagami, SignalBand  # noqa: E402
from .detector import DetectorConfig, threshold_lambda, bound_report  # noqa: E402

__all__ = [
    "GNormalParams", "PayoffFunction", "solve_gheat", "expectation_extremal",
    "Constant", "Rayleigh", "Rician", "Nakagami", "SignalBand",
    "DetectorConfig", "threshold_lambda", "bound_report",
]
