"""Streaming quantile tracking with an adaptive exponentially weighted average.

The core estimator tracks a quantile of a (possibly non-stationary) data
stream in one pass with O(1) memory. Its update is a convex combination of
the previous estimate and the new observation, with a per-sample weight
derived from running estimates of the conditional means above and below the
current estimate. Baseline trackers (multiplicative, additive, plain EWA
mean), synthetic stream generators with analytic quantile oracles, an RMSE
benchmark harness and a quantile-threshold drift detector are included.
"""

from .errors import NotReadyError, NumericError
from .estimators import (
    DumiqeEstimator,
    EwaMean,
    FrugalEstimator,
    QewaEstimator,
)
from .streams import StreamSpec

__all__ = [
    "QewaEstimator",
    "DumiqeEstimator",
    "FrugalEstimator",
    "EwaMean",
    "StreamSpec",
    "NotReadyError",
    "NumericError",
]

__version__ = "0.1.0"
