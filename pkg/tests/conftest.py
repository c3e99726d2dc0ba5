# tests/conftest.py
import os

import hypothesis
import numpy as np
import pytest

from modules.fpca import BasisSet, ChannelCovarianceSet, FittedModel
from modules.profiles import ProfileSet, SampleGrid
from modules.simgen import GenerativeModel, ScenarioSpec, build_bspline_basis, generate_dataset, reference_model

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=60, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))


def make_toy_model(n_points: int = 41, n_basis: int = 8, p: int = 3) -> GenerativeModel:
    """Modelo generativo pequeño: sd decreciente por base y canales correlados 0.3."""
    grid = SampleGrid.uniform(n_points)
    basis = build_bspline_basis(grid, n_basis)
    sd = np.linspace(1.0, 0.2, n_basis)
    corr = np.full((p, p), 0.3)
    np.fill_diagonal(corr, 1.0)
    covs = (sd ** 2)[:, np.newaxis, np.newaxis] * corr[np.newaxis]
    means = np.outer(np.linspace(0.5, -0.5, n_basis), np.arange(1, p + 1, dtype=float))
    return GenerativeModel(grid, basis, means, covs)


def make_planted_model(basis_rows: np.ndarray, grid: SampleGrid, sigmas: np.ndarray) -> FittedModel:
    """FittedModel con base y Σ_k conocidas (sin estimar nada)."""
    sigmas = np.asarray(sigmas, dtype=float)
    eigenvalues = np.trace(sigmas, axis1=1, axis2=2)
    basis = BasisSet(grid, basis_rows, eigenvalues, 1.0)
    return FittedModel(basis, ChannelCovarianceSet.from_sigmas(sigmas), sigmas.shape[1], 0)


@pytest.fixture(scope="session")
def small_grid():
    return SampleGrid.uniform(41)


@pytest.fixture(scope="session")
def toy_model():
    return make_toy_model()


@pytest.fixture(scope="session")
def toy_data(toy_model):
    return generate_dataset(toy_model, ScenarioSpec.in_control(m=30), seed=11)


@pytest.fixture(scope="session")
def shifted_toy_data(toy_model):
    # cambio grande en todas las bases a partir del perfil 12
    scenario = ScenarioSpec(case="III", h=7, channels="all4", m=30, tau=12, scale=60.0)
    return generate_dataset(toy_model, scenario, seed=5)


@pytest.fixture(scope="session")
def sine_grid():
    return SampleGrid.uniform(101)


@pytest.fixture(scope="session")
def sine_row(sine_grid):
    """√2·sin(2πt): norma de cuadratura 1 en la rejilla uniforme."""
    return np.sqrt(2.0) * np.sin(2.0 * np.pi * sine_grid.points)


@pytest.fixture(scope="session")
def reference_101():
    return reference_model(SampleGrid.uniform(101))


@pytest.fixture
def constant_profiles(small_grid):
    values = np.ones((6, 2, small_grid.n)) * 3.0
    return ProfileSet(small_grid, values)
