"""Diagonal pattern functions for photon-number sampling.

The diagonal density-matrix element of a phase-randomized state is recovered
from its quadrature marginal as

    rho_nn = pi * integral pr(X) f_nn(X) dX,

where the sampling kernel f_nn is built from the product of the regular and
irregular solutions of the oscillator Schroedinger equation at energy n + 1/2
(f_nn = d/dX [psi_n phi_n]).  The kernels satisfy the orthonormality contract

    pi * integral pr_m(X) f_nn(X) dX = delta_mn

against every Fock-state marginal pr_m.  Closed forms below are expressed
with the Dawson function D(q) = exp(-q^2) integral_0^q exp(t^2) dt and the
scaled coordinate q = sqrt(2) X fixed by the convention var_vacuum(X) = 1/4.
"""

from __future__ import annotations

import numpy as np
from scipy import special

MAX_ORDER = 3


def _kernel_scaled(n: int, q: np.ndarray) -> np.ndarray:
    # pi * f_nn(X) expressed in q = sqrt(2) X; polynomial parts grow like
    # q^(2n) while the Dawson terms cancel the growth, so evaluation is
    # stable over the |X| <= 8 range used elsewhere in the package.
    d = special.dawsn(q)
    q2 = q * q
    if n == 0:
        return 2.0 * (1.0 - 2.0 * q * d)
    if n == 1:
        return 8.0 * q * (1.0 - q2) * d + 4.0 * q2 - 2.0
    if n == 2:
        return 2.0 * q * (2.0 * q2 - 1.0) * (5.0 - 2.0 * q2) * d + 4.0 * q2 * q2 - 10.0 * q2 + 2.0
    if n == 3:
        poly = 4.0 * q2 ** 3 - 22.0 * q2 * q2 + 24.0 * q2 - 3.0
        daws = 2.0 * q * (2.0 * q2 - 3.0) * (9.0 * q2 - 2.0 * q2 * q2 - 3.0) * d
        return (2.0 / 3.0) * (daws + poly)
    raise ValueError(f"pattern order must be in 0..{MAX_ORDER}, got {n}")


def pattern_function(n: int, x):
    """Sampling kernel f_nn(X) for the diagonal element rho_nn, n <= MAX_ORDER."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ValueError("pattern order must be an integer")
    if n < 0 or n > MAX_ORDER:
        raise ValueError(f"pattern order must be in 0..{MAX_ORDER}, got {n}")
    x = np.asarray(x, dtype=float)
    out = _kernel_scaled(int(n), np.sqrt(2.0) * x) / np.pi
    if out.ndim == 0:
        return float(out)
    return out


def fock_marginal(n: int, x):
    """Quadrature marginal of the Fock state |n>, n <= MAX_ORDER.

    pr_n(X) = sqrt(2/pi) exp(-2 X^2) H_n(sqrt(2) X)^2 / (2^n n!).
    Used as the reference family for the orthonormality contract.
    """
    if n < 0 or n > MAX_ORDER:
        raise ValueError(f"order must be in 0..{MAX_ORDER}, got {n}")
    x = np.asarray(x, dtype=float)
    q = np.sqrt(2.0) * x
    h = special.eval_hermite(n, q)
    norm = np.sqrt(2.0 / np.pi) / (2.0 ** n * special.factorial(n))
    out = norm * np.exp(-2.0 * x * x) * h * h
    if out.ndim == 0:
        return float(out)
    return out
