"""Shared fixtures: expensive shots and tables are computed once per session."""

import numpy as np
import pytest

from mtlab.perturbations import trivial
from mtlab.quadrature import integral_tables
from mtlab.shooting import shoot


@pytest.fixture(scope="session")
def trivial_spec():
    return trivial()


@pytest.fixture(scope="session")
def shots(trivial_spec):
    """Unperturbed shots at the standard center values, keyed by mu."""
    return {mu: shoot(mu, trivial_spec) for mu in (6.0, 8.0, 10.0, 12.0)}


@pytest.fixture(scope="session")
def tables():
    return integral_tables()
