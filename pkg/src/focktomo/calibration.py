"""Vacuum calibration of the detector's affine response.

The vacuum block fixes the quadrature unit: raw values are modelled as
raw = scale * X + offset with X vacuum-distributed (sigma = 1/2), so

    offset_hat = sample mean,  scale_hat = sample standard deviation / 0.5.

These moment estimators are exact for a Gaussian.  An optional histogram
stage refits (scale, offset) by least squares against the analytic vacuum
density; it is a cross-check, not the default.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import NumericsError, ValidationError
from .states import VACUUM_STD, marginal_density

MIN_CALIBRATION_SAMPLES = 1000


@dataclass(frozen=True)
class CalibrationResult:
    scale_hat: float
    offset_hat: float
    fit_residual: float
    n_used: int
    method: str = "moments"

    def __post_init__(self) -> None:
        if not (np.isfinite(self.scale_hat) and self.scale_hat > 0.0):
            raise ValidationError(f"scale_hat must be positive, got {self.scale_hat}")
        if not np.isfinite(self.offset_hat):
            raise ValidationError("offset_hat must be finite")


def _histogram_residuals(values: np.ndarray, scale: float, offset: float) -> np.ndarray:
    # Scott's rule bin width on the raw values; range wide enough that
    # essentially no vacuum mass is clipped.
    n = values.size
    std = float(np.std(values, ddof=1))
    width = 3.49 * std * n ** (-1.0 / 3.0)
    lo = float(np.mean(values)) - 5.0 * std
    hi = float(np.mean(values)) + 5.0 * std
    n_bins = max(int(np.ceil((hi - lo) / width)), 4)
    counts, edges = np.histogram(values, bins=n_bins, range=(lo, hi))
    centers = 0.5 * (edges[:-1] + edges[1:])
    density = counts / (n * (edges[1] - edges[0]))
    model = marginal_density(0.0, (centers - offset) / scale) / scale
    return density - model


def fit_vacuum(values, method: str = "moments",
               min_samples: int = MIN_CALIBRATION_SAMPLES) -> CalibrationResult:
    """Estimate (scale, offset) from a vacuum block.

    method "moments" uses the mean and sample standard deviation; method
    "histogram" refines the moment solution by least squares against the
    analytic vacuum density.  fit_residual is the summed squared deviation
    of the binned empirical density from the model in both cases.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1:
        raise ValidationError("calibration expects a 1-d array of raw values")
    if values.size < min_samples:
        raise ValidationError(
            f"calibration needs at least {min_samples} vacuum samples, got {values.size}"
        )
    if not np.all(np.isfinite(values)):
        raise ValidationError("calibration input contains non-finite values")

    offset0 = float(np.mean(values))
    std = float(np.std(values, ddof=1))
    if std == 0.0:
        raise NumericsError("vacuum block has zero variance; cannot calibrate")
    scale0 = std / VACUUM_STD

    if method == "moments":
        resid = _histogram_residuals(values, scale0, offset0)
        return CalibrationResult(
            scale_hat=scale0,
            offset_hat=offset0,
            fit_residual=float(np.sum(resid ** 2)),
            n_used=values.size,
            method="moments",
        )
    if method == "histogram":
        sol = optimize.least_squares(
            lambda p: _histogram_residuals(values, p[0], p[1]),
            x0=[scale0, offset0],
            bounds=([1e-6 * scale0, -np.inf], [1e6 * scale0, np.inf]),
        )
        if not sol.success or sol.x[0] <= 0.0:
            raise NumericsError(f"histogram calibration failed: {sol.message}")
        return CalibrationResult(
            scale_hat=float(sol.x[0]),
            offset_hat=float(sol.x[1]),
            fit_residual=float(2.0 * sol.cost),
            n_used=values.size,
            method="histogram",
        )
    raise ValidationError(f"unknown calibration method {method!r}")


def rescale(values, calibration: CalibrationResult) -> np.ndarray:
    """Map raw detector values to dimensionless quadratures."""
    values = np.asarray(values, dtype=float)
    return (values - calibration.offset_hat) / calibration.scale_hat
