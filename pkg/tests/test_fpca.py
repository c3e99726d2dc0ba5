# tests/test_fpca.py
import numpy as np
import pytest

from core.errors import ValidationError
from modules.fpca import (
    BasisSet,
    CovarianceKernel,
    FittedModel,
    eigen_decompose,
    estimate_covariance_kernel,
    estimate_sigma_k,
    fit_model,
    load_model,
    save_model,
    variance_report,
)
from modules.profiles import ProfileSet, SampleGrid, inner_product
from modules.simgen import ScenarioSpec, build_bspline_basis, generate_dataset


def _planted_profiles(grid, rows, sigmas, m, seed):
    """X_i = Σ_k ξ_ik v_k con ξ_ik ~ N_p(0, Σ_k)."""
    rng = np.random.default_rng(seed)
    d, p = len(rows), sigmas.shape[1]
    factors = np.linalg.cholesky(sigmas)
    xi = np.einsum("kpq,ikq->ikp", factors, rng.standard_normal((m, d, p)))
    return ProfileSet(grid, np.einsum("ikp,kn->ipn", xi, rows))


# ---------------------------------------------------------------------------
# Núcleo
# ---------------------------------------------------------------------------

def test_kernel_of_identical_profiles_is_zero(constant_profiles):
    kernel = estimate_covariance_kernel(constant_profiles)
    assert np.all(kernel.matrix == 0.0)


def test_kernel_unit_difference_gives_half(small_grid):
    values = np.stack([np.zeros((1, small_grid.n)), np.ones((1, small_grid.n))])
    kernel = estimate_covariance_kernel(ProfileSet(small_grid, values))
    assert np.allclose(kernel.matrix, 0.5, atol=1e-15)


def test_kernel_symmetric_psd(toy_data):
    kernel = estimate_covariance_kernel(toy_data)
    assert np.max(np.abs(kernel.matrix - kernel.matrix.T)) <= 1e-10
    assert np.linalg.eigvalsh(kernel.weighted()).min() >= -1e-8


def test_kernel_top_eigenvalue_single_sine(sine_grid, sine_row):
    rng = np.random.default_rng(3)
    xi = rng.standard_normal(2000)
    data = ProfileSet(sine_grid, xi[:, np.newaxis, np.newaxis] * sine_row[np.newaxis, np.newaxis, :])
    basis = eigen_decompose(estimate_covariance_kernel(data), 1)
    assert abs(basis.eigenvalues[0] - 1.0) <= 0.15


# ---------------------------------------------------------------------------
# Autodescomposición
# ---------------------------------------------------------------------------

def test_rank_one_kernel(sine_grid, sine_row):
    kernel = CovarianceKernel(sine_grid, np.outer(sine_row, sine_row))
    basis = eigen_decompose(kernel, 2)
    assert abs(basis.eigenvalues[0] - 1.0) < 1e-10
    assert abs(basis.eigenvalues[1]) < 1e-10
    assert abs(abs(inner_product(basis.eigenfunctions[0], sine_row, sine_grid)) - 1.0) < 1e-8


def test_zero_kernel(small_grid):
    basis = eigen_decompose(CovarianceKernel(small_grid, np.zeros((small_grid.n, small_grid.n))), 3)
    assert np.all(basis.eigenvalues == 0.0)
    assert basis.variance_explained == 1.0


def test_eigenfunctions_orthonormal_and_sorted(toy_data):
    basis = eigen_decompose(estimate_covariance_kernel(toy_data), 6)
    assert np.allclose(basis.gram(), np.eye(6), atol=1e-8)
    assert np.all(np.diff(basis.eigenvalues) <= 1e-12)
    assert np.all(basis.eigenvalues >= 0.0)


def test_full_spectrum_explains_everything(toy_data):
    kernel = estimate_covariance_kernel(toy_data)
    basis = eigen_decompose(kernel, kernel.grid.n)
    assert abs(basis.variance_explained - 1.0) < 1e-8
    assert abs(basis.eigenvalues.sum() - kernel.weighted_trace()) <= 1e-10 * kernel.weighted_trace()


@pytest.mark.parametrize("d", [0, 42])
def test_invalid_d(toy_data, d):
    with pytest.raises(ValidationError):
        eigen_decompose(estimate_covariance_kernel(toy_data), d)


def test_asymmetric_kernel_rejected(small_grid):
    matrix = np.zeros((small_grid.n, small_grid.n))
    matrix[0, 1] = 1.0
    with pytest.raises(ValidationError):
        eigen_decompose(CovarianceKernel(small_grid, matrix), 1)


def test_planted_eigen_recovery():
    grid = SampleGrid.uniform(61)
    rows = build_bspline_basis(grid, 6)[[1, 3]]
    sigmas = np.array([[[4.0]], [[1.0]]])
    data = _planted_profiles(grid, rows, sigmas, m=20000, seed=21)
    basis = eigen_decompose(estimate_covariance_kernel(data), 2)
    assert np.allclose(basis.eigenvalues, [4.0, 1.0], rtol=0.05)
    for k in range(2):
        assert abs(inner_product(basis.eigenfunctions[k], rows[k], grid)) >= 0.99


def test_variance_report_monotone(toy_data):
    rows = variance_report(estimate_covariance_kernel(toy_data), [1, 3, 5, 41])
    explained = [r["variance_explained"] for r in rows]
    assert [r["d"] for r in rows] == [1, 3, 5, 41]
    assert all(a <= b + 1e-12 for a, b in zip(explained, explained[1:]))
    assert abs(explained[-1] - 1.0) < 1e-8


# ---------------------------------------------------------------------------
# Σ̂_k
# ---------------------------------------------------------------------------

def test_sigma_from_single_unit_projection(sine_grid, sine_row):
    basis = BasisSet(sine_grid, sine_row[np.newaxis], np.array([1.0]), 1.0)
    data = ProfileSet(sine_grid, np.stack([np.zeros((1, sine_grid.n)), sine_row[np.newaxis]]))
    cov = estimate_sigma_k(data, basis)
    assert abs(cov.sigmas[0, 0, 0] - 0.5) < 1e-10
    assert not cov.any_ridge


def test_identical_profiles_give_zero_sigma(constant_profiles):
    model = fit_model(constant_profiles, 3)
    assert np.all(model.channel_cov.sigmas == 0.0)
    assert np.all(model.basis.eigenvalues == 0.0)
    assert np.all(model.channel_cov.ridge_applied > 0.0)
    assert model.channel_cov.warnings
    assert model.is_degenerate


def test_planted_sigma_recovery():
    grid = SampleGrid.uniform(41)
    rows = build_bspline_basis(grid, 5)[:3]
    sigma = np.diag([1.0, 2.0, 3.0, 4.0])
    sigmas = np.repeat(sigma[np.newaxis], 3, axis=0)
    data = _planted_profiles(grid, rows, sigmas, m=20000, seed=8)
    basis = BasisSet(grid, rows, np.full(3, 10.0), 1.0)
    cov = estimate_sigma_k(data, basis)
    assert np.max(np.abs(cov.sigmas - sigmas)) <= 0.2


def test_factors_reproduce_regularized_sigma(toy_data):
    cov = fit_model(toy_data, 5).channel_cov
    for k in range(len(cov)):
        f = cov.factors[k]
        assert np.allclose(f @ f.T, cov.regularized(k), atol=1e-10)
        assert np.allclose(cov.sigmas[k], cov.sigmas[k].T, atol=1e-12)
        assert np.linalg.eigvalsh(cov.sigmas[k]).min() >= -1e-10


def test_rank_deficient_sigma_gets_ridge(small_grid):
    # canal 2 = canal 1: Σ̂_k singular
    rng = np.random.default_rng(0)
    base = rng.standard_normal((20, 1, small_grid.n))
    data = ProfileSet(small_grid, np.concatenate([base, base], axis=1))
    model = fit_model(data, 2)
    assert model.channel_cov.any_ridge
    assert not model.is_degenerate


# ---------------------------------------------------------------------------
# Modelo completo
# ---------------------------------------------------------------------------

def test_reference_model_variance_explained(reference_101):
    data = generate_dataset(reference_101, ScenarioSpec.in_control(m=200), seed=1)
    model = fit_model(data, 45)
    assert model.variance_explained >= 0.90
    assert model.d == 45 and model.p == 4 and model.m_fit == 200


def test_project_shape(toy_data):
    model = fit_model(toy_data, 4)
    assert model.project(toy_data).shape == (toy_data.m, 4, toy_data.p)


def test_model_round_trip(tmp_path, toy_data):
    model = fit_model(toy_data, 4)
    loaded = load_model(save_model(model, tmp_path / "model.json"))
    assert isinstance(loaded, FittedModel)
    assert np.allclose(loaded.basis.eigenfunctions, model.basis.eigenfunctions, atol=1e-14)
    assert np.allclose(loaded.channel_cov.sigmas, model.channel_cov.sigmas, atol=1e-14)
    assert loaded.m_fit == model.m_fit


def test_model_dict_missing_key(toy_data):
    payload = fit_model(toy_data, 2).to_dict()
    del payload["sigmas"]
    with pytest.raises(ValidationError):
        FittedModel.from_dict(payload)


# ---------------------------------------------------------------------------
# Invariancias del ajuste
# ---------------------------------------------------------------------------

def _max_rel_diff(a, b):
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


def _align_signs(functions, reference, grid):
    signs = np.sign(np.sum(functions * reference * grid.weights, axis=1))
    return functions * signs[:, np.newaxis]


def test_shift_leaves_fit_unchanged(toy_data):
    g = np.outer(np.arange(1, toy_data.p + 1), np.sin(3.0 * toy_data.grid.points))
    shifted = toy_data.shifted(g)
    base, moved = fit_model(toy_data, 4), fit_model(shifted, 4)

    k0, k1 = estimate_covariance_kernel(toy_data), estimate_covariance_kernel(shifted)
    assert _max_rel_diff(k1.matrix, k0.matrix) <= 1e-10
    assert np.allclose(moved.basis.eigenvalues, base.basis.eigenvalues, rtol=0, atol=1e-10)
    assert np.allclose(moved.basis.eigenfunctions, base.basis.eigenfunctions, rtol=0, atol=1e-10)
    assert _max_rel_diff(moved.channel_cov.sigmas, base.channel_cov.sigmas) <= 1e-10


@pytest.mark.parametrize("kappa", [0.1, 10.0])
def test_scale_multiplies_kernel_and_sigma(toy_data, kappa):
    scaled = toy_data.scaled(kappa)
    base, big = fit_model(toy_data, 4), fit_model(scaled, 4)

    k0, k1 = estimate_covariance_kernel(toy_data), estimate_covariance_kernel(scaled)
    assert _max_rel_diff(k1.matrix, kappa ** 2 * k0.matrix) <= 1e-10
    assert _max_rel_diff(big.channel_cov.sigmas, kappa ** 2 * base.channel_cov.sigmas) <= 1e-9
    aligned = _align_signs(big.basis.eigenfunctions, base.basis.eigenfunctions, toy_data.grid)
    assert np.allclose(aligned, base.basis.eigenfunctions, rtol=0, atol=1e-8)


def test_time_reversal_leaves_kernel_and_sigma_unchanged(toy_data):
    reversed_data = toy_data.reversed()
    k0, k1 = estimate_covariance_kernel(toy_data), estimate_covariance_kernel(reversed_data)
    assert _max_rel_diff(k1.matrix, k0.matrix) <= 1e-10

    basis = eigen_decompose(k0, 4)
    s0 = estimate_sigma_k(toy_data, basis).sigmas
    s1 = estimate_sigma_k(reversed_data, basis).sigmas
    assert _max_rel_diff(s1, s0) <= 1e-10

    refit = fit_model(reversed_data, 4)
    assert np.allclose(refit.basis.eigenvalues, basis.eigenvalues, rtol=1e-10, atol=1e-12)


def test_eigenvalue_matches_sigma_trace_on_planted_data():
    grid = SampleGrid.uniform(61)
    rows = build_bspline_basis(grid, 6)[[1, 3]]
    sigmas = np.array([[[3.0, 0.5], [0.5, 1.0]], [[1.0, 0.2], [0.2, 0.5]]])
    data = _planted_profiles(grid, rows, sigmas, m=2000, seed=17)
    model = fit_model(data, 2)
    traces = np.trace(model.channel_cov.sigmas, axis1=1, axis2=2)
    assert np.all(np.abs(model.basis.eigenvalues - traces) <= 0.10 * traces)
    # y ambos cerca de la traza planteada (4.0 y 1.5)
    assert np.allclose(traces, [4.0, 1.5], rtol=0.15)
