"""Solvers for the linearized radial family -Delta w = 4 e^{2 eta0}(f + 2w).

Every member is solved with zero Cauchy data at the origin.  Solutions grow
at most logarithmically, w(r) = beta log r + O(1), and the log-slope beta
is best read off from the integrated quantity r w'(r), which converges to
beta with rate O(log^q r / r^2).  The same beta is computable by a weighted
planar integral (see :mod:`mtlab.quadrature`), giving an independent
cross-check.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import profiles as pf
from .radial_ode import IvpSpec, RadialSolution, integrate

__all__ = [
    "source_w0",
    "source_z0",
    "source_zeta0",
    "source_za_minus_z0",
    "source_wa",
    "solve_linearized",
    "extract_log_slope",
]


def source_w0(r):
    """f = eta0 + eta0^2 (produces the profile w0)."""
    e = pf.eta0(r)
    return e + e * e


def source_z0(r):
    """f = w0 + 2 w0^2 + 4 eta0 w0 + 2 eta0^2 w0 + eta0^3 + eta0^4 / 2."""
    e = pf.eta0(r)
    w = pf.w0(r)
    return w + 2.0 * w * w + 4.0 * e * w + 2.0 * e * e * w \
        + e ** 3 + 0.5 * e ** 4


def source_zeta0(r):
    """f = 1 (produces zeta0 = -1 + 1/(1+r^2))."""
    return np.ones_like(np.asarray(r, dtype=float))


def source_wa(a: float) -> Callable:
    """f = eta0 + eta0^2 - a (produces w_a = w0 - a zeta0)."""

    def f(r):
        e = pf.eta0(r)
        return e + e * e - a

    return f


def source_za_minus_z0(a: float) -> Callable:
    """Source of the difference z_a - z0 for the inverse-square tail family.

    f = 2 a^2 (zeta0 + zeta0^2)
        + a (eta0 - eta0^2 - 2 w0 + zeta0 (-2 eta0^2 - 4 eta0 - 4 w0 - 1)).
    """

    def f(r):
        e = pf.eta0(r)
        w = pf.w0(r)
        z = pf.zeta0(r)
        return 2.0 * a * a * (z + z * z) \
            + a * (e - e * e - 2.0 * w + z * (-2.0 * e * e - 4.0 * e - 4.0 * w - 1.0))

    return f


def solve_linearized(source: Callable, r_max: float = 1e6,
                     tol: float = 1e-12) -> RadialSolution:
    """Solve -Delta w = 4 e^{2 eta0}(source(r) + 2 w), w(0) = w'(0) = 0.

    ``source`` is a radial rule with at most log^4 growth; r_max <= 1e8.
    """
    if r_max > 1e8:
        raise ValueError("r_max must be <= 1e8")

    def rhs(r, w):
        one = 1.0 + r * r
        return 4.0 / (one * one) * (source(r) + 2.0 * w)

    spec = IvpSpec(rhs=rhs, u0=0.0, t_end=np.log(r_max),
                   rel_tol=tol, abs_tol=tol)
    return integrate(spec)


def extract_log_slope(sol: RadialSolution, r_lo: float = 1e3,
                      r_hi: float = 1e6, n_samples: int = 64):
    """Estimate beta in w(r) = beta log r + O(1) from the tail of r w'(r).

    Returns (beta_hat, error_estimate); beta_hat is the median of r w'(r)
    over log-spaced samples in [r_lo, r_hi], the error estimate is the
    half-spread of the central 80% of the samples.
    """
    if r_hi < 100.0 * r_lo:
        raise ValueError("need r_hi >= 100 * r_lo for a meaningful tail")
    if np.log(r_hi) > sol.t_max + 1e-12:
        raise ValueError("solution not defined up to r_hi")
    t = np.linspace(np.log(r_lo), np.log(r_hi), n_samples)
    _, v = sol.eval_t(t)
    beta_hat = float(np.median(v))
    lo, hi = np.quantile(v, [0.1, 0.9])
    return beta_hat, float(0.5 * (hi - lo))
