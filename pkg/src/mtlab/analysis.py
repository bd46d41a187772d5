"""Energy expansions, residual hierarchies, thresholds, and the E(mu) branch.

This module drives :mod:`mtlab.shooting` over families of center values mu
and condenses the results into the quantities the theory predicts:

* the coefficient c(mu) = mu^4 (E(mu) - 4 pi) and its inner/outer split,
* sup norms of the rescaled profile minus its Taylor hierarchy
  eta0 + w0/mu^2 + z0/mu^4 (+ h(mu) zeta0 for perturbed functionals),
* the critical amplitude of the inverse-square perturbation tail,
* the branch E(mu) with its supremum Lambda* and the multiplicity of
  solutions of E(mu) = Lambda.

All slack constants used by finite-mu window checks live in ``SLACK`` so
the thresholds are auditable in one place.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import profiles as pf
from .linearized import solve_linearized, source_z0
from .perturbations import PerturbationSpec, delta_k, trivial
from .shooting import (EventNotReachedError, ShotSolution, pde_residual,
                       plain_mass_value, shoot)

__all__ = [
    "SLACK",
    "FOUR_PI",
    "ExpansionScan",
    "ResidualReport",
    "ThresholdResult",
    "BranchScan",
    "energy_scan",
    "residual_hierarchy",
    "threshold_a",
    "branch_scan",
    "concentration_check",
    "scan_to_csv",
    "residuals_to_csv",
    "branch_to_csv",
    "branch_summary_json",
]

FOUR_PI = 4.0 * np.pi

# Auditable slack table.  The theory gives asymptotic o(.) remainders; every
# finite-mu window check below widens the asymptotic constant by exactly
# these amounts (additive for coefficient windows, multiplicative for
# convergence-rate ratios).
SLACK = {
    "coefficient_window": 0.5,
    "rate_ratio": 2.0,
    "branch_root_tol": 1e-6,
    "residual_bound": 1e-7,
}


@dataclass
class ExpansionScan:
    """Energy coefficients c(mu) = mu^4 (E - 4 pi) along a mu list.

    ``fit`` holds (c_inf, c_1) of the least-squares model
    c(mu) = c_inf + c_1/mu^2, with the max absolute misfit in
    ``fit_residual``.  ``window`` is the asymptotic window (widened by
    slack) that applies to the scanned family, and ``window_ok`` flags
    each mu against it; the caller decides whether to treat failures as
    errors.  Shoot failures are recorded in ``failures`` and the scan
    continues.
    """

    mu_values: np.ndarray
    c_values: np.ndarray
    inner_coeffs: np.ndarray
    outer_coeffs: np.ndarray
    energies: np.ndarray
    fit: Tuple[float, float]
    fit_residual: float
    window: Tuple[float, float]
    window_ok: List[bool]
    failures: Dict[float, str] = field(default_factory=dict)


def _window_for(spec: PerturbationSpec) -> Tuple[float, float]:
    """Asymptotic window for c(mu), widened by the coefficient slack.

    Unperturbed: [4 pi, 6 pi].  Decaying perturbations shift the upper
    end to 4 pi + 2 pi (1 + sup h); the inverse-square tail of amplitude a
    additionally shifts both ends by -4 pi a.
    """
    s = SLACK["coefficient_window"]
    lo, hi = FOUR_PI, FOUR_PI + 2.0 * np.pi * (1.0 + spec.sup_h)
    if spec.name == "inverse-square":
        a = spec.family_params["a"]
        lo -= FOUR_PI * a
        hi -= FOUR_PI * a
    return lo - s, hi + s


def energy_scan(mu_list: Sequence[float], spec: PerturbationSpec,
                tol: float = 1e-11, split_exponent: float = 3.0) -> ExpansionScan:
    """Shoot each mu and collect the energy coefficients and their fit."""
    mus, cs, inner, outer, energies = [], [], [], [], []
    failures: Dict[float, str] = {}
    for mu in sorted(mu_list):
        try:
            sol = shoot(mu, spec, tol=tol, split_exponent=split_exponent)
        except (EventNotReachedError, ValueError) as exc:
            failures[float(mu)] = str(exc)
            continue
        mu4 = mu ** 4
        mus.append(mu)
        energies.append(sol.energy_total)
        cs.append(mu4 * (sol.energy_total - FOUR_PI))
        inner.append(mu4 * (sol.energy_inner - FOUR_PI))
        outer.append(mu4 * sol.energy_outer)
    mus_arr = np.asarray(mus)
    cs_arr = np.asarray(cs)
    if len(mus) >= 2:
        design = np.column_stack([np.ones_like(mus_arr), mus_arr ** -2.0])
        coef, *_ = np.linalg.lstsq(design, cs_arr, rcond=None)
        fit = (float(coef[0]), float(coef[1]))
        fit_residual = float(np.max(np.abs(design @ coef - cs_arr)))
    else:
        fit, fit_residual = (float("nan"), float("nan")), float("nan")
    window = _window_for(spec)
    window_ok = [bool(window[0] <= c <= window[1]) for c in cs_arr]
    return ExpansionScan(mu_values=mus_arr, c_values=cs_arr,
                         inner_coeffs=np.asarray(inner),
                         outer_coeffs=np.asarray(outer),
                         energies=np.asarray(energies),
                         fit=fit, fit_residual=fit_residual,
                         window=window, window_ok=window_ok,
                         failures=failures)


@dataclass
class ResidualReport:
    """Sup norms of the rescaled profile against its Taylor hierarchy."""

    mu: float
    sup_w_err: float       # sup |mu^2 (eta - eta0) - w0| on [0, 10]
    sup_z_err: float       # sup |mu^4 (eta - eta0 - w0/mu^2) - z0| on [0, 10]
    phi_over_xi: float     # weighted remainder sup, see residual_hierarchy
    perturbed: bool
    delta: float           # normalization of the perturbed remainder (else mu^-6)


@lru_cache(maxsize=1)
def _z0_solution():
    return solve_linearized(source_z0, r_max=1e6)


def residual_hierarchy(mu: float, spec: Optional[PerturbationSpec] = None,
                       tol: float = 1e-11) -> ResidualReport:
    """Compare the shot profile to eta0 + w0/mu^2 + z0/mu^4 (+ h(mu) zeta0).

    For the unperturbed functional the remainder phi := mu^6 (eta - eta0
    - w0/mu^2 - z0/mu^4) is weighted by xi(r) = 1 + log(1+r) and the sup
    is taken on [0, min(e^mu, 1e6)].  For a perturbed functional the
    hierarchy gains the term h(mu) zeta0, the remainder is normalized by
    the perturbation scale delta instead of mu^-6, and the sup is taken
    on [0, mu^4].
    """
    if spec is None:
        spec = trivial()
    perturbed = spec.name != "trivial"
    sol = shoot(mu, spec, tol=tol)
    z0 = _z0_solution()
    mu2, mu4 = mu ** 2, mu ** 4

    def hierarchy_err(r_hi, n=600):
        """Radii plus (eta - eta0 - w0/mu^2, same - z0/mu^4) samples."""
        t = np.linspace(max(np.log(1e-3), sol.eta.t_min),
                        min(np.log(r_hi), sol.t_event_or_max()), n)
        r = np.exp(t)
        eta, _ = sol.eta.eval_t(t)
        d1 = eta - pf.eta0(r) - pf.w0(r) / mu2
        z0_vals, _ = z0.eval_t(np.minimum(t, z0.t_max))
        d2 = d1 - z0_vals / mu4
        return r, eta - pf.eta0(r), d1, d2

    r, d_w, d1, d2 = hierarchy_err(10.0)
    sup_w_err = float(np.max(np.abs(mu2 * d_w - pf.w0(r))))
    sup_z_err = float(np.max(np.abs(mu4 * d1 - z0.eval_t(np.log(r))[0])))

    if perturbed:
        delta = delta_k(mu, spec)
        h_mu = float(spec.h(np.asarray(mu)))
        r, _, _, d2 = hierarchy_err(mu4, n=2000)
        phi = (d2 - h_mu * pf.zeta0(r)) / delta
        phi_over_xi = float(np.max(np.abs(phi) / pf.xi(r)))
    else:
        delta = mu ** -6.0
        r, _, _, d2 = hierarchy_err(min(np.exp(mu), 1e6), n=2000)
        phi_over_xi = float(np.max(np.abs(mu ** 6 * d2) / pf.xi(r)))
    return ResidualReport(mu=mu, sup_w_err=sup_w_err, sup_z_err=sup_z_err,
                          phi_over_xi=phi_over_xi, perturbed=perturbed,
                          delta=delta)


@dataclass
class ThresholdResult:
    """Bisected sign change of c(mu_probe) in the tail amplitude a."""

    mu_probe: float
    a_crit: float
    predicted_window: Tuple[float, float]
    c_lo: float
    c_hi: float


def threshold_a(mu_probe: float, a_lo: float = 0.25, a_hi: float = 3.0,
                a_tol: float = 1e-3, tol: float = 1e-10,
                family=None) -> ThresholdResult:
    """Bisect the amplitude of the inverse-square tail where c changes sign.

    The energy coefficient of the tail family shifts linearly, c ~ c0 -
    4 pi a, so a single sign change is expected; the asymptotic
    prediction brackets it between a = 1 (lower window coefficient
    vanishes) and a = 3/2 + (sup h)/2 (upper coefficient vanishes).
    """
    from .perturbations import inverse_square_tail
    make = family if family is not None else inverse_square_tail

    def c_of(a):
        sol = shoot(mu_probe, make(a), tol=tol)
        return mu_probe ** 4 * (sol.energy_total - FOUR_PI)

    c_lo, c_hi = c_of(a_lo), c_of(a_hi)
    if c_lo * c_hi > 0:
        raise ValueError(
            f"no sign change of c on [{a_lo}, {a_hi}]: c={c_lo:.3g}, {c_hi:.3g}")
    lo, hi = a_lo, a_hi
    while hi - lo > a_tol:
        mid = 0.5 * (lo + hi)
        if c_lo * c_of(mid) <= 0:
            hi = mid
        else:
            lo = mid
    sup_h = make(0.5 * (lo + hi)).sup_h
    return ThresholdResult(mu_probe=mu_probe, a_crit=0.5 * (lo + hi),
                           predicted_window=(1.0, 1.5 + 0.5 * sup_h),
                           c_lo=c_lo, c_hi=c_hi)


@dataclass
class BranchScan:
    """The energy branch E(mu) with its supremum and level-set roots."""

    points: List[Tuple[float, float]]
    lambda_star: float
    mu_star: float
    pairs: Dict[float, List[float]]
    notes: Dict[float, str] = field(default_factory=dict)
    failures: Dict[float, str] = field(default_factory=dict)


def _golden_max(f, lo, hi, tol=1e-6):
    """Golden-section maximization of a unimodal scalar function."""
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - inv_phi * (b - a), a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return (0.5 * (a + b), max(fc, fd))


def branch_scan(mu_grid: Sequence[float], spec: Optional[PerturbationSpec] = None,
                lambda_queries: Sequence[float] = (),
                level_fractions: Sequence[float] = (),
                tol: float = 1e-11) -> BranchScan:
    """Sample E(mu), refine its maximum, and solve E(mu) = Lambda levels.

    Lambda* is the grid maximum refined by golden section between the
    neighbors of the best sample (no global claim beyond the grid
    resolution).  Each Lambda in (4 pi, Lambda*) is bracketed on the
    grid and every bracket is bisected until |E - Lambda| <= 1e-6; roots
    are re-verified by a fresh shoot.  ``level_fractions`` adds queries
    at Lambda = 4 pi + f (Lambda* - 4 pi), resolved after Lambda* is
    known (f = 0.5 is the midpoint level of the multiplicity theorem).
    """
    if spec is None:
        spec = trivial()
    mus = np.asarray(sorted(mu_grid), dtype=float)
    energies = np.full_like(mus, np.nan)
    failures: Dict[float, str] = {}

    def E(mu):
        return shoot(float(mu), spec, tol=tol).energy_total

    for i, mu in enumerate(mus):
        try:
            energies[i] = E(mu)
        except (EventNotReachedError, ValueError) as exc:
            failures[float(mu)] = str(exc)
    ok = np.isfinite(energies)
    pts = list(zip(mus[ok].tolist(), energies[ok].tolist()))
    mu_ok, E_ok = mus[ok], energies[ok]
    i_best = int(np.argmax(E_ok))
    lo = mu_ok[max(i_best - 1, 0)]
    hi = mu_ok[min(i_best + 1, len(mu_ok) - 1)]
    mu_star, lambda_star = _golden_max(E, lo, hi)
    lambda_star = max(lambda_star, float(E_ok[i_best]))

    pairs: Dict[float, List[float]] = {}
    notes: Dict[float, str] = {}
    root_tol = SLACK["branch_root_tol"]
    queries = list(lambda_queries) + [
        FOUR_PI + f * (lambda_star - FOUR_PI) for f in level_fractions]
    for lam in queries:
        lam = float(lam)
        if not (FOUR_PI < lam < lambda_star):
            pairs[lam] = []
            notes[lam] = (f"level {lam:.6g} outside (4 pi, Lambda*) = "
                          f"({FOUR_PI:.6g}, {lambda_star:.6g}); no roots sought")
            continue
        roots = []
        diffs = E_ok - lam
        for i in range(len(mu_ok) - 1):
            if diffs[i] == 0.0:
                roots.append(float(mu_ok[i]))
                continue
            if diffs[i] * diffs[i + 1] < 0:
                a, b = float(mu_ok[i]), float(mu_ok[i + 1])
                fa = diffs[i]
                while True:
                    mid = 0.5 * (a + b)
                    fm = E(mid) - lam
                    if abs(fm) <= root_tol:
                        roots.append(mid)
                        break
                    if fa * fm <= 0:
                        b = mid
                    else:
                        a, fa = mid, fm
        pairs[lam] = sorted(roots)
    return BranchScan(points=pts, lambda_star=float(lambda_star),
                      mu_star=float(mu_star), pairs=pairs, notes=notes,
                      failures=failures)


def verify_branch_root(mu: float, lam: float,
                       spec: Optional[PerturbationSpec] = None,
                       n_radii: int = 40) -> Tuple[float, float]:
    """Fresh shoot at a claimed root: (|E - Lambda|, max PDE residual)."""
    if spec is None:
        spec = trivial()
    sol = shoot(mu, spec, tol=1e-11)
    radii = np.exp(np.linspace(np.log(1e-6), np.log(0.99), n_radii))
    return abs(sol.energy_total - lam), pde_residual(sol, radii)


def subcritical_mass_bound(sol: ShotSolution) -> Tuple[float, float]:
    """(int e^{u^2} dx, pi/(1 - E/4pi)) for solutions with E < 4 pi."""
    if sol.energy_total >= FOUR_PI:
        raise ValueError("bound only applies below energy 4 pi")
    mass = plain_mass_value(sol)
    return mass, float(np.pi / (1.0 - sol.energy_total / FOUR_PI))


def concentration_check(mu: float, R: float = 100.0,
                        tol: float = 1e-11) -> float:
    """Energy over the rescaled ball of radius R (physical radius R r_k).

    As mu grows the value approaches the concentration limit
    4 pi R^2/(1+R^2) of the Liouville bubble; R = 0 returns 0.
    """
    if R < 0:
        raise ValueError("R must be non-negative")
    if R == 0.0:
        return 0.0
    sol = shoot(mu, trivial(), tol=tol)
    t_R = min(np.log(R), sol.t_event_or_max())
    if t_R <= sol.eta.t_min:
        return 0.0
    return float(sol.eta.eval_aux_t("energy", t_R))


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def scan_to_csv(scan: ExpansionScan) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mu", "E", "c", "inner_coeff", "outer_coeff", "in_window"])
    for i, mu in enumerate(scan.mu_values):
        w.writerow([_fmt(mu), _fmt(scan.energies[i]), _fmt(scan.c_values[i]),
                    _fmt(scan.inner_coeffs[i]), _fmt(scan.outer_coeffs[i]),
                    int(scan.window_ok[i])])
    return buf.getvalue()


def residuals_to_csv(reports: Sequence[ResidualReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mu", "sup_w_err", "sup_z_err", "phi_over_xi", "delta"])
    for rep in reports:
        w.writerow([_fmt(rep.mu), _fmt(rep.sup_w_err), _fmt(rep.sup_z_err),
                    _fmt(rep.phi_over_xi), _fmt(rep.delta)])
    return buf.getvalue()


def branch_to_csv(scan: BranchScan) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mu", "E"])
    for mu, e in scan.points:
        w.writerow([_fmt(mu), _fmt(e)])
    return buf.getvalue()


def branch_summary_json(scan: BranchScan) -> str:
    payload = {
        "lambda_star": scan.lambda_star,
        "mu_star": scan.mu_star,
        "pairs": {f"{lam:.17g}": roots for lam, roots in scan.pairs.items()},
        "notes": {f"{lam:.17g}": note for lam, note in scan.notes.items()},
        "failures": {f"{mu:.17g}": msg for mu, msg in scan.failures.items()},
    }
    return json.dumps(payload, indent=2)
