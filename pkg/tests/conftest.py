#!/usr/bin/env python3
"""
Shared fixtures for the nilcohom test suite.
"""

import pytest

from modules.coadjoint import LinearForm
from modules.config_manager import builtin_algebra
from modules.rep_solver import SolverSettings


@pytest.fixture(scope="session")
def heisenberg():
    return builtin_algebra("heisenberg")


@pytest.fixture(scope="session")
def filiform4():
    return builtin_algebra("filiform4")


@pytest.fixture(scope="session")
def abelian2():
    return builtin_algebra("abelian2")


@pytest.fixture(scope="session")
def heisenberg_r():
    return builtin_algebra("heisenberg_r")


@pytest.fixture
def central_form(heisenberg):
    """lambda = m E3* on the Heisenberg algebra."""
    def make(m):
        return LinearForm.from_values(heisenberg, [0, 0, m])
    return make


@pytest.fixture(scope="session")
def solver_settings():
    return SolverSettings()
