"""Log-radius initial-value integration against closed-form solutions."""

import numpy as np
import pytest

from mtlab import profiles as pf
from mtlab.radial_ode import (IvpSpec, NoCrossingError, find_event, integrate,
                              series_start)


def liouville_spec(**kw):
    # -Delta eta = 4 e^{2 eta}, solution eta0 = -log(1+r^2)
    return IvpSpec(rhs=lambda r, u: 4.0 * np.exp(2.0 * min(u, 0.0)), **kw)


def test_series_start_matches_taylor():
    spec = liouville_spec(r_start=1e-6)
    u_s, v_s = series_start(spec)
    # eta0 ~ -r^2 with Delta eta0(0) = -4
    assert u_s == pytest.approx(-1e-12, rel=1e-6)
    assert v_s == pytest.approx(-2e-12, rel=1e-6)


def test_liouville_bubble_reproduced():
    sol = integrate(liouville_spec(t_end=np.log(1e5)))
    r = np.exp(np.linspace(np.log(1e-3), np.log(1e4), 200))
    u, v = sol.eval(r)
    assert np.max(np.abs(u - pf.eta0(r))) < 1e-8
    assert np.max(np.abs(v - r * pf.eta0_prime(r))) < 1e-8


def test_aux_state_accumulates_mass():
    # d(mass)/dt = 2 pi r^2 * 4 e^{2 eta}; total planar mass of the bubble
    # is 2 pi int 4 r / (1+r^2)^2 dr = 4 pi
    spec = liouville_spec(t_end=np.log(1e6),
                          aux={"mass": lambda r, u, v:
                               2.0 * np.pi * r * r * 4.0 * np.exp(2.0 * min(u, 0.0))})
    sol = integrate(spec)
    mass = sol.eval_aux_t("mass", sol.t_max)
    assert mass == pytest.approx(4.0 * np.pi, abs=1e-8)


def test_event_location():
    t_star, sol = find_event(liouville_spec(t_end=20.0), -np.log(101.0))
    # eta0 = -log(101) at r = 10
    assert np.exp(t_star) == pytest.approx(10.0, rel=1e-9)
    assert sol.t_event == t_star


def test_missing_event_raises():
    with pytest.raises(NoCrossingError):
        find_event(liouville_spec(t_end=2.0), -50.0)


def test_bad_tolerances_rejected():
    with pytest.raises(ValueError):
        liouville_spec(rel_tol=0.0)
    with pytest.raises(ValueError):
        liouville_spec(abs_tol=np.array([1e-12, -1e-12]))
    with pytest.raises(ValueError):
        liouville_spec(r_start=0.0)


def test_scaled_rhs_equivalent():
    plain = integrate(liouville_spec(t_end=np.log(1e3)))
    scaled = integrate(liouville_spec(
        t_end=np.log(1e3),
        scaled_rhs=lambda t, u: 4.0 * np.exp(min(2.0 * t + 2.0 * min(u, 0.0), 50.0))))
    r = np.exp(np.linspace(np.log(1e-2), np.log(1e2), 50))
    assert np.max(np.abs(plain.eval(r)[0] - scaled.eval(r)[0])) < 1e-9


def test_dense_output_between_nodes():
    sol = integrate(liouville_spec(t_end=np.log(1e3)))
    mids = 0.5 * (sol.grid.t_nodes[:-1] + sol.grid.t_nodes[1:])
    u, _ = sol.eval_t(mids)
    assert np.max(np.abs(u - pf.eta0(np.exp(mids)))) < 1e-8
