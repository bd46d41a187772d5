"""Shooting solver: invariants, residuals and cross-checks."""

import json

import numpy as np
import pytest

from mtlab import profiles as pf
from mtlab.perturbations import inverse_square_tail, log_power_family, trivial
from mtlab.shooting import (EventNotReachedError, comparison_eta0,
                            functional_value, pde_residual, physical_profile,
                            plain_mass_value, shoot, to_json)

FOUR_PI = 4.0 * np.pi


def test_mu_range_guard():
    with pytest.raises(ValueError):
        shoot(0.01, trivial())
    with pytest.raises(ValueError):
        shoot(25.0, trivial())


def test_boundary_event_and_multiplier(shots):
    for mu, sol in shots.items():
        # u vanishes at r = 1: eta(R) = -mu^2
        eta_R, _ = sol.eta.eval_t(sol.log_R)
        assert eta_R == pytest.approx(-mu ** 2, abs=1e-8)
        assert sol.log_lambda == pytest.approx(
            np.log(4.0) + 2.0 * sol.log_R - mu ** 2 - 2.0 * np.log(mu), abs=1e-12)


def test_physical_profile_endpoints(shots):
    sol = shots[6.0]
    # r = 1e-12 still maps to a rescaled radius ~ 4e-5 (R is huge)
    u = physical_profile(sol, np.array([1e-12, 1.0]))
    assert u[0] == pytest.approx(6.0, abs=1e-8)   # center value
    assert u[1] == pytest.approx(0.0, abs=1e-8)   # boundary zero
    with pytest.raises(ValueError):
        physical_profile(sol, 1.5)


def test_profile_monotone_decreasing(shots):
    sol = shots[8.0]
    r = np.exp(np.linspace(np.log(1e-5), 0.0, 300))
    u = physical_profile(sol, r)
    assert np.all(np.diff(u) <= 1e-12)
    assert np.all(u >= -1e-12)


def test_energy_split_consistency(shots):
    for sol in shots.values():
        assert sol.energy_inner >= 0.0
        assert sol.energy_outer >= 0.0
        assert sol.energy_inner + sol.energy_outer == pytest.approx(
            sol.energy_total, rel=1e-12)


def test_energy_against_small_mu_physical_quadrature():
    """Independent oracle: integrate |grad u|^2 directly at modest mu.

    At mu = 3 the boundary radius is small enough that the physical
    gradient integral 2 pi int (u')^2 r dr is computable from the dense
    profile by plain quadrature.
    """
    sol = shoot(3.0, trivial())
    t = np.linspace(sol.eta.t_min, sol.log_R, 60_000)
    _, v = sol.eta.eval_t(t)
    # |grad u|^2 dx = 2 pi (u')^2 r dr = 2 pi (v/mu)^2 dt in log radius
    energy = 2.0 * np.pi * np.trapezoid((v / 3.0) ** 2, t)
    assert energy == pytest.approx(sol.energy_total, rel=1e-7)


def test_functional_value_against_mass_quadrature():
    sol = shoot(3.0, trivial())
    t = np.linspace(sol.eta.t_min, sol.log_R, 60_000)
    eta, _ = sol.eta.eval_t(t)
    u = 3.0 + eta / 3.0
    # int e^{u^2} dx over B_1 = 2 pi int e^{u^2 + 2t - 2 log R} dt
    mass = 2.0 * np.pi * np.trapezoid(
        np.exp(u * u + 2.0 * t - 2.0 * sol.log_R), t)
    assert functional_value(sol) == pytest.approx(mass, rel=1e-6)
    assert plain_mass_value(sol) == pytest.approx(mass, rel=1e-6)


def test_rescaled_profile_approaches_bubble(shots):
    # eta -> eta0 with error O(1/mu^2) on compact sets
    r = np.linspace(0.0, 5.0, 100)[1:]
    for mu, bound in ((6.0, 0.06), (12.0, 0.015)):
        eta, _ = shots[mu].eta.eval(r)
        assert np.max(np.abs(eta - pf.eta0(r))) < bound


def test_pde_residual_small(shots):
    radii = np.exp(np.linspace(np.log(1e-6), np.log(0.99), 30))
    assert pde_residual(shots[6.0], radii) < 1e-7


def test_pde_residual_detects_corruption(shots):
    sol = shots[6.0]
    radii = np.exp(np.linspace(np.log(1e-4), np.log(0.9), 10))

    def corrupted(t):
        eta, v = sol.eta.eval_t(t)
        return eta * (1.0 + 1e-4), v

    assert pde_residual(sol, radii, solution_eval=corrupted) > 1e-5
    with pytest.raises(ValueError):
        pde_residual(sol, [1.5])


def test_comparison_to_bubble_outside_core(shots):
    for mu in (6.0, 10.0):
        report = comparison_eta0(shots[mu])
        assert report.holds
        assert report.max_excess < 0.0


def test_perturbed_shot_shifts_energy():
    mu = 8.0
    plain = shoot(mu, trivial())
    tail = shoot(mu, inverse_square_tail(a=1.0))
    # the critical tail lowers the energy coefficient by about 4 pi
    c_plain = mu ** 4 * (plain.energy_total - FOUR_PI)
    c_tail = mu ** 4 * (tail.energy_total - FOUR_PI)
    assert c_tail < c_plain - 2.0 * np.pi


def test_log_power_perturbation_is_small():
    mu = 8.0
    plain = shoot(mu, trivial())
    pert = shoot(mu, log_power_family(a=1.0, p=3.0))
    assert abs(pert.energy_total - plain.energy_total) < 1e-3


def test_vanishing_nonlinearity_misses_event():
    # with 1 + h ~ 5e-13 the right-hand side cannot push eta to -mu^2
    # before t_end, so the boundary event is never located
    from mtlab.perturbations import PerturbationSpec
    weak = PerturbationSpec(
        h=lambda t: np.full_like(np.asarray(t, dtype=float), -1.0 + 5e-13),
        name="near-degenerate")
    with pytest.raises(EventNotReachedError):
        shoot(0.05, weak, tol=1e-9)


def test_json_roundtrip(shots):
    payload = json.loads(to_json(shots[6.0]))
    assert payload["mu"] == 6.0
    assert payload["family"] == "trivial"
    assert len(payload["profile_t"]) == len(payload["profile_eta"])
