# tests/conftest.py
import os

# Файловые логи в тестах не нужны
os.environ["ZGEN_LOG_DIR"] = ""

import pytest
from src.config.manager import config_manager
from src.models.model_spec import Boundary, Geometry, ModelSpec
from src.lattice.kernel import build_kernel, propagator
from src.fock.space import FockSpace, TimeGrid
from src.fock.evolution import gaussian_pulse


@pytest.fixture
def point_spec() -> ModelSpec:
    return ModelSpec(geometry=Geometry.POINT, mass=1.0, epsilon=0.1, coupling=0.1)


@pytest.fixture
def chain2_spec() -> ModelSpec:
    return ModelSpec(geometry=Geometry.CHAIN, sites=2, mass=1.0, epsilon=0.1)


@pytest.fixture
def chain3_spec() -> ModelSpec:
    return ModelSpec(geometry=Geometry.CHAIN, sites=3, mass=1.0, epsilon=0.1, coupling=0.1)


@pytest.fixture
def chain4_dirichlet_spec() -> ModelSpec:
    return ModelSpec(geometry=Geometry.CHAIN, sites=4, mass=1.0, epsilon=0.1, boundary=Boundary.DIRICHLET)


@pytest.fixture
def point_propagator(point_spec):
    return propagator(build_kernel(point_spec))


@pytest.fixture
def single_mode() -> FockSpace:
    return FockSpace(dim=16, omega=1.0)


@pytest.fixture
def pulse_grid() -> TimeGrid:
    return TimeGrid(0.0, 4.0, 200)


@pytest.fixture
def pulse():
    return gaussian_pulse(0.2, 2.0, 0.5)


@pytest.fixture(autouse=True)
def fresh_config():
    config_manager.clear_cache()
    yield
    config_manager.clear_cache()
