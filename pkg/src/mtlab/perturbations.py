"""Perturbation families (g, h) and numeric checkers for their decay.

A perturbation of the exponential functional is specified by an even
function g; the Euler-Lagrange equation only sees the combination

    h(t) = g(t) + g'(t) / (2t),   t > 0.

Built-in families: the smooth-cutoff log-power family, its oscillating
variant, and the inverse-square tail h(t) = -a t^{-2} (t >= R) used to
probe the critical decay rate.  ``check_conditions`` samples the two decay
conditions (t^2 h(t) -> 0 and the t^4-modulus-of-continuity condition) and
reports a monotone-trend verdict; ``delta_k`` is the perturbation scale
entering the expansion of the rescaled solutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np
from scipy.integrate import solve_ivp

__all__ = [
    "PerturbationSpec",
    "smooth_cutoff",
    "h_from_g",
    "trivial",
    "log_power_family",
    "oscillating_family",
    "inverse_square_tail",
    "check_conditions",
    "ConditionReport",
    "delta_k",
    "reconstruct_g",
    "family_by_name",
]


def smooth_cutoff(x):
    """C-infinity bridge: 0 on [0, 1], 1 on [2, inf).

    Built from s(y) = exp(-1/y) so results are bit-reproducible.
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        up = np.where(x > 1.0, np.exp(-1.0 / np.maximum(x - 1.0, 1e-300)), 0.0)
        down = np.where(x < 2.0, np.exp(-1.0 / np.maximum(2.0 - x, 1e-300)), 0.0)
    return up / (up + down + (up + down == 0.0))


def _smooth_cutoff_prime(x):
    x = np.asarray(x, dtype=float)
    inside = (x > 1.0) & (x < 2.0)
    xs = np.where(inside, x, 1.5)
    a = np.exp(-1.0 / (xs - 1.0))
    b = np.exp(-1.0 / (2.0 - xs))
    da = a / (xs - 1.0) ** 2
    db = -b / (2.0 - xs) ** 2
    val = (da * b - a * db) / (a + b) ** 2
    return np.where(inside, val, 0.0)


@dataclass
class PerturbationSpec:
    """An (h, optionally g) perturbation with cached bounds.

    ``h`` must be total on (0, inf); ``sup_h`` / ``inf_h`` are computed on
    a fixed log grid plus the zero tail limit, so they are reproducible.
    """

    h: Callable
    g: Optional[Callable] = None
    g_prime: Optional[Callable] = None
    name: str = "custom"
    family_params: Dict = field(default_factory=dict)
    sup_h: float = field(init=False)
    inf_h: float = field(init=False)

    def __post_init__(self):
        ts = np.exp(np.linspace(np.log(1e-3), np.log(1e8), 10_000))
        hs = np.asarray(self.h(ts), dtype=float)
        if np.any(~np.isfinite(hs)):
            raise ValueError("h must be finite on (0, inf)")
        # the families all satisfy h -> 0 at infinity, so 0 is a candidate bound
        self.sup_h = float(max(np.max(hs), 0.0))
        self.inf_h = float(min(np.min(hs), 0.0))
        if self.inf_h <= -1.0:
            raise ValueError("inf h must exceed -1")


def h_from_g(g: Callable, g_prime: Callable) -> Callable:
    """Pointwise rule h(t) = g(t) + g'(t)/(2t); rejects t = 0."""

    def h(t):
        t = np.asarray(t, dtype=float)
        if np.any(t == 0.0):
            raise ValueError("h(t) is undefined at t = 0")
        return g(t) + g_prime(t) / (2.0 * t)

    return h


def trivial() -> PerturbationSpec:
    """The unperturbed functional: g = h = 0."""
    zero = lambda t: np.zeros_like(np.asarray(t, dtype=float))
    return PerturbationSpec(h=zero, g=zero, g_prime=zero, name="trivial")


def log_power_family(a: float = 1.0, p: float = 3.0, q: float = 0.0,
                     R: float = 2.0) -> PerturbationSpec:
    """g(t) = a * chi(|t|/R) * log^q(|t|) * |t|^{-p}, p > 2.

    The cutoff keeps g = 0 on [0, R]; with R >= 2 the active range has
    log t > 0 so fractional q is safe.
    """
    if p <= 2:
        raise ValueError("need p > 2")
    if R < 2:
        raise ValueError("need R >= 2")

    def g(t):
        t = np.abs(np.asarray(t, dtype=float))
        ts = np.maximum(t, R)  # g vanishes below R anyway
        return a * smooth_cutoff(t / R) * np.log(ts) ** q * ts ** (-p)

    def g_prime(t):
        sgn = np.sign(np.asarray(t, dtype=float))
        t = np.abs(np.asarray(t, dtype=float))
        ts = np.maximum(t, R)
        chi = smooth_cutoff(t / R)
        dchi = _smooth_cutoff_prime(t / R) / R
        lg = np.log(ts)
        core = lg ** q * ts ** (-p)
        if q == 0.0:
            dcore = -p * lg ** q * ts ** (-p - 1.0)
        else:
            dcore = (q * lg ** (q - 1.0) - p * lg ** q) * ts ** (-p - 1.0)
        return sgn * a * (dchi * core + chi * dcore)

    return PerturbationSpec(h=h_from_g(g, g_prime), g=g, g_prime=g_prime,
                            name="log-power",
                            family_params={"a": a, "p": p, "q": q, "R": R})


def oscillating_family(a: float = 1.0, p: float = 3.0,
                       R: float = 2.0) -> PerturbationSpec:
    """g(t) = a * chi(|t|/R) * cos(log|t|) * |t|^{-p}, p > 2."""
    if p <= 2:
        raise ValueError("need p > 2")

    def g(t):
        t = np.abs(np.asarray(t, dtype=float))
        ts = np.maximum(t, R)
        return a * smooth_cutoff(t / R) * np.cos(np.log(ts)) * ts ** (-p)

    def g_prime(t):
        sgn = np.sign(np.asarray(t, dtype=float))
        t = np.abs(np.asarray(t, dtype=float))
        ts = np.maximum(t, R)
        chi = smooth_cutoff(t / R)
        dchi = _smooth_cutoff_prime(t / R) / R
        lg = np.log(ts)
        core = np.cos(lg) * ts ** (-p)
        dcore = (-np.sin(lg) - p * np.cos(lg)) * ts ** (-p - 1.0)
        return sgn * a * (dchi * core + chi * dcore)

    return PerturbationSpec(h=h_from_g(g, g_prime), g=g, g_prime=g_prime,
                            name="oscillating",
                            family_params={"a": a, "p": p, "R": R})


def inverse_square_tail(a: float = 1.0, R: Optional[float] = None) -> PerturbationSpec:
    """h(t) = -a t^{-2} for t >= R, frozen at -a/R^2 below.

    The default R = sqrt(2a) pins the range of h to [-1/2, 0); this is the
    critical-decay family whose energy coefficient shifts by -4 pi a.
    """
    if a <= 0:
        raise ValueError("need a > 0")
    if R is None:
        R = float(np.sqrt(2.0 * a))

    def h(t):
        t = np.asarray(t, dtype=float)
        return -a / np.maximum(t, R) ** 2

    return PerturbationSpec(h=h, name="inverse-square",
                            family_params={"a": a, "R": R})


@dataclass
class ConditionReport:
    """Sampled decay diagnostics for one condition."""

    name: str
    t_values: np.ndarray
    q_values: np.ndarray
    verdict: str  # satisfied / violated / inconclusive


def _verdict(q: np.ndarray) -> str:
    m = float(np.max(np.abs(q)))
    if m < 1e-12:
        return "satisfied"
    last = float(np.abs(q[-1]))
    if last <= 0.1 * m:
        return "satisfied"
    if last >= 0.5 * m:
        return "violated"
    return "inconclusive"


def check_conditions(spec: PerturbationSpec, t_max: float = 1e6,
                     n_t: int = 25) -> Dict[str, ConditionReport]:
    """Sample the two tail conditions on h and classify the trend.

    Condition 1: t^2 h(t) -> 0.  Condition 2: the modulus
    t^4 sup_{|s|<=1} |h(t + s(8 log t + 1)/t) - h(t)| -> 0, with the
    s-supremum taken over a fixed 21-point grid.
    """
    ts = np.exp(np.linspace(np.log(10.0), np.log(t_max), n_t))
    q1 = ts ** 2 * np.asarray(spec.h(ts), dtype=float)

    s_grid = np.linspace(-1.0, 1.0, 21)
    q2 = np.empty_like(ts)
    for i, t in enumerate(ts):
        shift = s_grid * (8.0 * np.log(t) + 1.0) / t
        q2[i] = t ** 4 * np.max(np.abs(spec.h(t + shift) - spec.h(t)))

    return {
        "condh1": ConditionReport("condh1", ts, q1, _verdict(q1)),
        "condh2": ConditionReport("condh2", ts, q2, _verdict(q2)),
    }


def delta_k(mu: float, spec: PerturbationSpec) -> float:
    """Perturbation scale at center value mu.

    max of: the s-supremum of |h(mu + s(8 log mu + 1)/mu) - h(mu)| over a
    201-point grid in [-1, 1]; the floor 1/mu^6; and h(mu)/mu^2.
    """
    if mu <= 1:
        raise ValueError("need mu > 1")
    s = np.linspace(-1.0, 1.0, 201)
    shift = s * (8.0 * np.log(mu) + 1.0) / mu
    h_mu = float(spec.h(np.asarray(mu)))
    sup_term = float(np.max(np.abs(spec.h(mu + shift) - h_mu)))
    return max(sup_term, mu ** -6, h_mu / mu ** 2)


def reconstruct_g(spec: PerturbationSpec, t_min: float = 0.5,
                  t_max: float = 1e4) -> Callable:
    """Numerically reconstruct a g with h_from_g(g) = spec.h (optional tool).

    Integrates g' = 2t (h - g) forward from t_min with g(t_min) =
    h(t_min); the homogeneous mode decays like e^{-t^2}, so the error of
    the starting guess is forgotten within a unit of t.  (The backward
    direction is unusable: the same mode grows like e^{t^2}.)  Provided
    for exploration, not for the solvers, which consume h directly.
    """
    # the relaxation rate 2t makes the problem stiff at large t, so use an
    # implicit-capable stepper
    res = solve_ivp(lambda t, y: 2.0 * t * (float(spec.h(np.asarray(t))) - y[0]),
                    (t_min, t_max), [float(spec.h(np.asarray(t_min)))],
                    rtol=1e-10, atol=1e-14, dense_output=True, method="LSODA")

    def g(t):
        t = np.asarray(t, dtype=float)
        if np.any(t < t_min) or np.any(t > t_max):
            raise ValueError("reconstructed g only valid on [t_min, t_max]")
        return res.sol(t)[0]

    return g


def family_by_name(name: str, **params) -> PerturbationSpec:
    """Factory used by the command-line interface."""
    table = {
        "trivial": trivial,
        "log-power": log_power_family,
        "oscillating": oscillating_family,
        "inverse-square": inverse_square_tail,
    }
    if name not in table:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(table)}")
    return table[name](**params)
