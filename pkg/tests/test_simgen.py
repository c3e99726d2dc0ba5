# tests/test_simgen.py
import numpy as np
import pytest
from pydantic import ValidationError as PydanticValidationError

from conftest import make_toy_model
from core.errors import ConfigError, ValidationError
from modules.profiles import SampleGrid
from modules.simgen import (
    DEFAULT_KNOT_SEGMENTS,
    GenerativeModel,
    ScenarioSpec,
    build_bspline_basis,
    case_delta,
    fit_generative_model,
    generate_dataset,
    gram_schmidt,
    oc_shift,
    reference_model,
    uneven_knots,
)
from modules.simgen.bspline import n_basis_for


def _mean_se(model: GenerativeModel, m: int) -> np.ndarray:
    """Error típico de la media muestral de cada coeficiente (n_basis, p)."""
    return np.sqrt(np.diagonal(model.covs, axis1=1, axis2=2) / m)


# ---------------------------------------------------------------------------
# Base B-spline
# ---------------------------------------------------------------------------

def test_default_knots_give_66_functions():
    assert n_basis_for(uneven_knots(DEFAULT_KNOT_SEGMENTS)) == 66


def test_basis_is_orthonormal():
    grid = SampleGrid.uniform(401)
    basis = build_bspline_basis(grid)
    gram = (basis * grid.weights) @ basis.T
    assert basis.shape == (66, 401)
    assert np.max(np.abs(gram - np.eye(66))) <= 1e-8
    assert np.max(np.abs(np.diag(gram) - 1.0)) <= 1e-10


def test_basis_larger_than_grid_rejected():
    with pytest.raises(ValidationError):
        build_bspline_basis(SampleGrid.uniform(20), 30)


def test_knots_incompatible_with_n_basis():
    with pytest.raises(ValidationError):
        build_bspline_basis(SampleGrid.uniform(101), 10, knots=uneven_knots(DEFAULT_KNOT_SEGMENTS))


def test_gram_schmidt_rejects_dependent_rows(small_grid):
    rows = np.vstack([np.ones(small_grid.n), 2.0 * np.ones(small_grid.n)])
    with pytest.raises(ValidationError):
        gram_schmidt(rows, small_grid.weights)


# ---------------------------------------------------------------------------
# Escenarios
# ---------------------------------------------------------------------------

def test_case_delta_values():
    assert case_delta("I", 1) == 2.0
    assert case_delta("II", 4) == 4.0
    assert case_delta("III", 7) == pytest.approx(0.7)
    with pytest.raises(ValidationError):
        case_delta("IV", 1)


def test_shift_case_two():
    shift = oc_shift("II", 2, "all4")
    affected = np.zeros(66, dtype=bool)
    affected[15:29] = True
    assert np.allclose(shift[affected], 0.015)
    assert np.all(shift[~affected] == 0.0)


def test_shift_case_one():
    shift = oc_shift("I", 1, "all4")
    assert np.flatnonzero(shift[:, 0]).tolist() == list(range(29, 37))
    assert np.allclose(shift[29:37], 0.015)


def test_shift_case_three_first_two_channels():
    shift = oc_shift("III", 5, "FirstTwo")
    assert np.allclose(shift[:, :2], 0.0075)
    assert np.all(shift[:, 2:] == 0.0)


def test_shift_needs_enough_basis_functions():
    with pytest.raises(ValidationError):
        oc_shift("I", 1, "all4", n_basis=20)


def test_scenario_spec_aliases_and_label():
    spec = ScenarioSpec(case="II", h=3, channels="FirstTwo")
    assert spec.channels == "first2"
    assert spec.label == "II/first2/h=3"
    assert ScenarioSpec.in_control(m=40).label == "IC"
    assert ScenarioSpec.in_control(m=40).tau == 20


@pytest.mark.parametrize("kwargs", [dict(m=50, tau=50), dict(h=8), dict(channels="middle")])
def test_scenario_spec_rejects_invalid(kwargs):
    with pytest.raises(PydanticValidationError):
        ScenarioSpec(case="I", **kwargs)


# ---------------------------------------------------------------------------
# Generación y ajuste
# ---------------------------------------------------------------------------

def test_generate_dataset_deterministic(toy_model):
    scenario = ScenarioSpec(case="III", h=4, m=20, tau=8)
    a = generate_dataset(toy_model, scenario, seed=13)
    b = generate_dataset(toy_model, scenario, seed=13)
    c = generate_dataset(toy_model, scenario, seed=14)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_fit_generative_recovers_parameters(toy_model):
    m = 2000
    data = generate_dataset(toy_model, ScenarioSpec.in_control(m=m), seed=31)
    fitted = fit_generative_model(data, toy_model.basis)
    assert np.all(np.abs(fitted.means - toy_model.means) <= 4.5 * _mean_se(toy_model, m))

    variances = np.diagonal(toy_model.covs, axis1=1, axis2=2)
    cov_se = np.sqrt((variances[:, :, np.newaxis] * variances[:, np.newaxis, :] + toy_model.covs ** 2) / m)
    assert np.all(np.abs(fitted.covs - toy_model.covs) <= 5.0 * cov_se)
    assert not fitted.warnings


def test_fit_generative_zero_noise(toy_model):
    silent = GenerativeModel(toy_model.grid, toy_model.basis, toy_model.means, np.zeros_like(toy_model.covs))
    data = generate_dataset(silent, ScenarioSpec.in_control(m=10), seed=0)
    fitted = fit_generative_model(data, toy_model.basis)
    assert np.allclose(fitted.covs, 0.0, atol=1e-20)
    assert np.allclose(fitted.means, toy_model.means, atol=1e-8)


def test_fit_generative_few_curves_adds_ridge(toy_model):
    data = generate_dataset(toy_model, ScenarioSpec.in_control(m=4), seed=2)
    fitted = fit_generative_model(data, toy_model.basis)
    assert fitted.warnings
    for cov in fitted.covs:
        assert np.linalg.eigvalsh(cov).min() > 0.0


def test_fit_generative_basis_mismatch(toy_data):
    with pytest.raises(ValidationError):
        fit_generative_model(toy_data, np.ones((3, toy_data.n + 1)))


def test_generative_model_dict_round_trip(toy_model):
    back = GenerativeModel.from_dict(toy_model.to_dict())
    assert np.array_equal(back.basis, toy_model.basis)
    assert np.array_equal(back.covs, toy_model.covs)
    assert back.grid.same_as(toy_model.grid)


def test_generative_model_save_load(tmp_path):
    model = make_toy_model(n_points=21, n_basis=5, p=2)
    loaded = GenerativeModel.load(model.save(tmp_path / "gen.json"))
    assert np.array_equal(loaded.means, model.means)
    with pytest.raises(ValidationError):
        GenerativeModel.load(tmp_path / "missing.json")


# ---------------------------------------------------------------------------
# Modelo de referencia
# ---------------------------------------------------------------------------

def test_reference_model_shape(reference_101):
    assert reference_101.n_basis == 66
    assert reference_101.p == 4
    assert reference_101.grid.n == 101


def test_reference_model_refit_self_consistent(reference_101):
    m = 2000
    data = generate_dataset(reference_101, ScenarioSpec.in_control(m=m), seed=77)
    fitted = fit_generative_model(data, reference_101.basis)
    assert np.all(np.abs(fitted.means - reference_101.means) <= 4.5 * _mean_se(reference_101, m))


def test_case_two_shift_visible_in_coefficients(reference_101):
    m, tau = 2000, 1000
    data = generate_dataset(reference_101, ScenarioSpec(case="II", h=7, m=m, tau=tau), seed=19)
    coeffs = np.einsum("mpn,bn->mbp", data.values, reference_101.basis * data.grid.weights)
    diff = coeffs[tau:].mean(axis=0) - coeffs[:tau].mean(axis=0)

    expected = np.zeros_like(diff)
    expected[15:29] = 0.04
    se = np.sqrt(2.0) * _mean_se(reference_101, tau)
    assert np.all(np.abs(diff - expected) <= 4.5 * se)


def test_reference_config_missing(tmp_path):
    with pytest.raises(ConfigError):
        reference_model(SampleGrid.uniform(101), path=tmp_path / "nope.yaml")


def test_reference_config_invalid(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("p: 4\nknot_segments: []\nchannel_levels: [1.0]\nchannel_scales: [1.0]\nsd_groups: []\n",
                    encoding="utf-8")
    with pytest.raises(ConfigError):
        reference_model(SampleGrid.uniform(101), path=path)
