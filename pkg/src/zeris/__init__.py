"""Reliability, security and energy-efficiency analysis of a wireless-powered
zero-energy reconfigurable intelligent surface (zeRIS) link.

The package pairs closed-form/asymptotic metrics (:mod:`zeris.metrics`) with
an independent Monte Carlo simulator (:mod:`zeris.montecarlo`) and a small
sweep/CLI layer (:mod:`zeris.experiments`, :mod:`zeris.cli`).
"""

__version__ = "0.1.0"

from .params import SystemParams, DerivedConstants, derive_constants, path_loss  # noqa: E402
from .metrics import Mode, MetricValue, jop, jip, see, normalized_jiop  # noqa: E402

__all__ = [
    "__version__",
    "SystemParams",
    "DerivedConstants",
    "derive_constants",
    "path_loss",
    "Mode",
    "MetricValue",
    "jop",
    "jip",
    "see",
    "normalized_jiop",
]
