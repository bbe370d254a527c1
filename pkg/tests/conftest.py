"""Shared test fixtures."""
import math

import numpy as np
import pytest
import structlog

from consistent_histories.models.histories import HistorySet
from consistent_histories.models.tensor import OperatorMatrix, SpaceLayout, StateVector
from consistent_histories.services.histories import family_from_vectors, family_on_registers

ROOT = 1.0 / math.sqrt(2.0)


@pytest.fixture(autouse=True)
def reset_logging():
    yield
    structlog.reset_defaults()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def spin():
    return SpaceLayout.of(("S", 2))


@pytest.fixture
def x_plus(spin):
    return StateVector(spin, np.array([ROOT, ROOT]))


@pytest.fixture
def z_basis(spin):
    return family_on_registers(spin, "S", names=["z+", "z-"])


@pytest.fixture
def x_basis(spin):
    return family_from_vectors(spin, [np.array([ROOT, ROOT]), np.array([ROOT, -ROOT])], ["x+", "x-"])


@pytest.fixture
def z_then_x(spin, x_plus, z_basis, x_basis):
    """|x+>, trivial dynamics, z at t1 then x at t2: an inconsistent set."""
    identity = OperatorMatrix.identity(spin)
    return HistorySet(
        psi0=x_plus,
        times=(1.0, 2.0),
        families=(z_basis, x_basis),
        unitaries=(identity, identity),
    )


@pytest.fixture
def z_then_z(spin, x_plus, z_basis):
    identity = OperatorMatrix.identity(spin)
    return HistorySet(
        psi0=x_plus,
        times=(1.0, 2.0),
        families=(z_basis, z_basis),
        unitaries=(identity, identity),
    )


@pytest.fixture
def random_unitary():
    """Haar-like unitary from the QR decomposition of a complex Gaussian matrix."""

    def make(rng, dim):
        z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        q, r = np.linalg.qr(z)
        return q * (np.diag(r) / np.abs(np.diag(r)))

    return make


@pytest.fixture
def random_state():
    def make(rng, dim):
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        return v / np.linalg.norm(v)

    return make
