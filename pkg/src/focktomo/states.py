"""Analytic model of an efficiency-degraded single-photon state.

Quadrature convention: the vacuum Wigner function is
W0(X, P) = (2/pi) exp(-2 (X^2 + P^2)), so the vacuum quadrature marginal is
Gaussian with standard deviation 1/2 (variance 1/4).

A single-photon state detected with overall efficiency eta behaves as the
mixture eta |1><1| + (1 - eta) |0><0|.  Its rotationally symmetric Wigner
function and phase-independent quadrature marginal are

    W_eta(R)  = (2/pi) exp(-2 R^2) [eta (4 R^2 - 1) + (1 - eta)]
    pr_eta(X) = sqrt(2/pi) exp(-2 X^2) [1 - eta + 4 eta X^2]

with R^2 = X^2 + P^2.  W_eta(0) = (2/pi)(1 - 2 eta) is negative exactly when
eta > 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

# Vacuum marginal standard deviation in this convention.
VACUUM_STD = 0.5

# All quadrature mass lies inside [-PPF_BRACKET, PPF_BRACKET] to < 1e-28.
PPF_BRACKET = 8.0

_SQRT_2_OVER_PI = np.sqrt(2.0 / np.pi)


def _maybe_scalar(arr: np.ndarray) -> float | np.ndarray:
    if arr.ndim == 0:
        return float(arr)
    return arr


def _check_eta(eta) -> np.ndarray:
    eta = np.asarray(eta, dtype=float)
    if np.any((eta < 0.0) | (eta > 1.0)) or not np.all(np.isfinite(eta)):
        raise ValueError(f"eta must lie in [0, 1], got {eta!r}")
    return eta


def wigner_radial(eta, r):
    """Phase-averaged Wigner function W_eta at radius R = sqrt(X^2 + P^2).

    `r` must be non-negative; `eta` and `r` broadcast.
    """
    eta = _check_eta(eta)
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0):
        raise ValueError("radius must be non-negative")
    r2 = r * r
    out = (2.0 / np.pi) * np.exp(-2.0 * r2) * (eta * (4.0 * r2 - 1.0) + (1.0 - eta))
    return _maybe_scalar(out)


def wigner_xy(eta, x, p):
    """Wigner function on the (X, P) plane; rotationally symmetric."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    return wigner_radial(eta, np.sqrt(x * x + p * p))


def marginal_density(eta, x):
    """Quadrature marginal pr_eta(X); identical at every phase."""
    eta = _check_eta(eta)
    x = np.asarray(x, dtype=float)
    x2 = x * x
    out = _SQRT_2_OVER_PI * np.exp(-2.0 * x2) * (1.0 - eta + 4.0 * eta * x2)
    return _maybe_scalar(out)


def marginal_cdf(eta, x):
    """Cumulative distribution of pr_eta, in closed form.

    Integrating the Gaussian-times-quadratic density gives

        CDF_eta(X) = (1 + erf(sqrt(2) X)) / 2 - eta sqrt(2/pi) X exp(-2 X^2).

    The erf term is evaluated as erfc(-sqrt(2) X) / 2, which is the same
    number but keeps full relative precision deep in the left tail, where
    1 + erf would cancel catastrophically.
    """
    eta = _check_eta(eta)
    x = np.asarray(x, dtype=float)
    out = 0.5 * special.erfc(-np.sqrt(2.0) * x) - eta * _SQRT_2_OVER_PI * x * np.exp(-2.0 * x * x)
    return _maybe_scalar(out)


def marginal_ppf(eta, u, tol: float = 1e-13, max_iter: int = 80):
    """Quantile function of pr_eta via bracketed bisection.

    Solves CDF_eta(x) = u on [-PPF_BRACKET, PPF_BRACKET] to within `tol` on x.
    `u` outside (0, 1) is rejected; values of u extremely close to 0 or 1 are
    clipped so the root stays inside the bracket (the neglected tail mass is
    below 1e-18).

    The density is even, so PPF(u) = -PPF(1 - u).  For u > 1/2 the mirrored
    problem is solved instead: there the target value 1 - u is exact (the
    subtraction is exact for u >= 1/2) and the left-tail CDF retains full
    relative precision, so quantiles deep in either tail are resolved to the
    bisection tolerance rather than to the ulp of a CDF value near 1.
    """
    eta = _check_eta(eta)
    u = np.asarray(u, dtype=float)
    if np.any((u < 0.0) | (u > 1.0)) or not np.all(np.isfinite(u)):
        raise ValueError("quantile argument must lie in [0, 1]")
    u_eff = np.clip(u, 1e-18, 1.0 - 2.0 ** -53)

    eta_b, u_b = np.broadcast_arrays(eta, u_eff)
    if u_b.size == 0:
        return np.asarray(np.full(u_b.shape, -PPF_BRACKET))
    flip = u_b > 0.5
    u_low = np.where(flip, 1.0 - u_b, u_b)
    # The mirrored root lies in [-PPF_BRACKET, 0] because CDF(0) = 1/2.
    lo = np.full(u_b.shape, -PPF_BRACKET)
    hi = np.zeros(u_b.shape)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        below = marginal_cdf(eta_b, mid) < u_low
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.max(hi - lo) < tol:
            break
    root = 0.5 * (lo + hi)
    out = np.asarray(np.where(flip, -root, root))
    return _maybe_scalar(out)


@dataclass(frozen=True)
class EfficiencyMixtureState:
    """Single-photon state mixed with vacuum at weight 1 - eta."""

    eta: float

    def __post_init__(self) -> None:
        _check_eta(self.eta)

    def wigner_radial(self, r):
        return wigner_radial(self.eta, r)

    def wigner_xy(self, x, p):
        return wigner_xy(self.eta, x, p)

    def marginal_density(self, x):
        return marginal_density(self.eta, x)

    def marginal_cdf(self, x):
        return marginal_cdf(self.eta, x)

    def marginal_ppf(self, u):
        return marginal_ppf(self.eta, u)

    def wigner_origin(self) -> float:
        """W_eta(0) = (2/pi)(1 - 2 eta)."""
        return (2.0 / np.pi) * (1.0 - 2.0 * self.eta)
