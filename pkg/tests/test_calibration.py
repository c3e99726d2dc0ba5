# tests/test_calibration.py
import logging

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, strategies as st

from core.errors import ValidationError
from modules.calibration import (
    calibrate_L,
    calibrate_many,
    generate_null_replicate,
    order_statistic_index,
    pilot_model,
    q_digest,
    simulate_null_q,
    threshold_from_sample,
)
from modules.fpca import fit_model
from modules.simgen import ScenarioSpec, generate_dataset
from modules.tuning import select_c2


@pytest.fixture(scope="module")
def toy_fitted(toy_data):
    return fit_model(toy_data, 4)


# ---------------------------------------------------------------------------
# Convención del cuantil
# ---------------------------------------------------------------------------

def test_threshold_hundred_samples():
    q = np.arange(1, 101, dtype=float)
    L = threshold_from_sample(q, 0.05)
    assert L == 95.0
    assert int(np.sum(q > L)) == 5


def test_threshold_four_samples():
    assert threshold_from_sample([4.0, 1.0, 3.0, 2.0], 0.5) == 2.0


def test_order_statistic_bounds():
    assert order_statistic_index(10, 0.999) == 1
    assert order_statistic_index(10, 1e-6) == 10


@given(st.lists(st.floats(-100, 100), min_size=1, max_size=200),
       st.floats(0.001, 0.999), st.floats(0.001, 0.999))
def test_threshold_nondecreasing_in_confidence(q, a1, a2):
    low_alpha, high_alpha = sorted([a1, a2])
    assert threshold_from_sample(q, low_alpha) >= threshold_from_sample(q, high_alpha)


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1])
def test_invalid_alpha(alpha):
    with pytest.raises(ValidationError):
        threshold_from_sample([1.0, 2.0], alpha)


def test_q_digest_depends_on_order():
    assert q_digest([1.0, 2.0]) != q_digest([2.0, 1.0])
    assert q_digest(np.array([1.0, 2.0])) == q_digest([1.0, 2.0])


# ---------------------------------------------------------------------------
# Réplicas nulas
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("source", ["generative", "fitted"])
def test_null_replicate_deterministic(source, toy_model, toy_fitted):
    model = toy_model if source == "generative" else toy_fitted
    a = generate_null_replicate(model, 12, seed=3, rep_index=4)
    b = generate_null_replicate(model, 12, seed=3, rep_index=4)
    c = generate_null_replicate(model, 12, seed=3, rep_index=5)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    assert (a.m, a.p, a.n) == (12, model.p, model.grid.n)


def test_bootstrap_mean_is_zero(toy_fitted):
    reps, m = 2000, 5
    draws = np.stack([generate_null_replicate(toy_fitted, m, seed=9, rep_index=r).values for r in range(reps)])
    flat = draws.reshape(-1, toy_fitted.p, toy_fitted.grid.n)
    mean = flat.mean(axis=0)
    se = flat.std(axis=0, ddof=1) / np.sqrt(flat.shape[0])
    mask = se > 0
    z = np.abs(mean[mask] / se[mask])
    assert np.mean(z > 3.0) < 0.05
    assert np.all(z < 5.0)


def test_null_replicate_rejects_small_m(toy_fitted):
    with pytest.raises(ValidationError):
        generate_null_replicate(toy_fitted, 1, seed=0, rep_index=0)


def test_pilot_model(toy_model, toy_fitted):
    assert pilot_model(toy_fitted, 20, seed=1, d=4) is toy_fitted
    pilot = pilot_model(toy_model, 20, seed=1, d=3)
    assert pilot.d == 3 and pilot.m_fit == 20


# ---------------------------------------------------------------------------
# Calibración
# ---------------------------------------------------------------------------

def test_calibration_reproducible(toy_model):
    a = calibrate_L(toy_model, 20, 0.1, 1.0, reps=25, seed=4, d=3)
    b = calibrate_L(toy_model, 20, 0.1, 1.0, reps=25, seed=4, d=3)
    assert a.L == b.L
    assert a.q_samples_digest == b.q_samples_digest
    assert a.to_dict()["seed"] == 4


def test_calibration_independent_of_workers(toy_model):
    serial = simulate_null_q(toy_model, 15, [0.0, 2.0], reps=12, seed=6, d=3, workers=1)
    threaded = simulate_null_q(toy_model, 15, [0.0, 2.0], reps=12, seed=6, d=3, workers=3)
    for c in serial:
        assert np.array_equal(serial[c], threaded[c])


def test_L_nonincreasing_in_c(toy_model):
    results = calibrate_many(toy_model, 20, 0.1, [0.0, 2.0, 6.0], reps=30, seed=2, d=3)
    Ls = [results[c].L for c in (0.0, 2.0, 6.0)]
    assert Ls[0] >= Ls[1] >= Ls[2]


def test_few_reps_warns(toy_model, caplog):
    with caplog.at_level(logging.WARNING):
        result = calibrate_L(toy_model, 12, 0.05, 0.0, reps=10, seed=1, d=2)
    assert result.warnings
    assert "pocas réplicas" in caplog.text


def test_refit_false_uses_fixed_model(toy_fitted):
    a = calibrate_L(toy_fitted, 20, 0.1, 0.0, reps=15, seed=8, refit=False)
    b = calibrate_L(toy_fitted, 20, 0.1, 0.0, reps=15, seed=8, refit=False)
    assert a.L == b.L and a.d == toy_fitted.d and a.refit is False


def test_dump_q(tmp_path, toy_model):
    result = calibrate_L(toy_model, 15, 0.2, 0.0, reps=8, seed=3, d=2, keep_samples=True)
    frame = pd.read_csv(result.dump_q(tmp_path / "q.csv"))
    assert list(frame.columns) == ["rep", "Q"]
    assert len(frame) == 8
    assert np.allclose(frame["Q"].to_numpy(), result.q_samples, rtol=0, atol=1e-12)


def test_dump_q_without_samples(tmp_path, toy_model):
    result = calibrate_L(toy_model, 15, 0.2, 0.0, reps=8, seed=3, d=2)
    with pytest.raises(ValidationError):
        result.dump_q(tmp_path / "q.csv")


def test_invalid_c_values(toy_model):
    with pytest.raises(ValidationError):
        simulate_null_q(toy_model, 15, [-1.0], reps=3, seed=0, d=2)


@pytest.mark.parametrize("d", [0, 42])
def test_d_outside_grid_rejected_before_replicates(toy_model, d):
    # toy_model vive en una rejilla de 41 puntos
    with pytest.raises(ValidationError, match="fuera de rango"):
        calibrate_L(toy_model, 15, 0.1, 0.0, reps=3, seed=0, d=d, workers=2)


# ---------------------------------------------------------------------------
# Aceptación: error de tipo I
# ---------------------------------------------------------------------------

@pytest.mark.slow
def test_type_one_error_reference_model(reference_101):
    m, d, alpha = 200, 45, 0.05
    c_values = [0.0, select_c2(4, d)]
    calibration = calibrate_many(reference_101, m, alpha, c_values, reps=1000, seed=101, d=d)
    fresh = simulate_null_q(reference_101, m, c_values, reps=1000, seed=202, d=d)
    for c in c_values:
        rate = float(np.mean(fresh[c] > calibration[c].L))
        assert 0.03 <= rate <= 0.07, (c, rate)


@pytest.mark.slow
def test_in_control_halves_exchangeable(reference_101):
    # test de dos muestras sobre la media del primer coeficiente
    from scipy import stats

    rejections = 0
    reps = 400
    for rep in range(reps):
        data = generate_dataset(reference_101, ScenarioSpec.in_control(m=60), seed=rep)
        coeffs = np.einsum("ipn,n->ip", data.values, reference_101.basis[20] * data.grid.weights)[:, 0]
        rejections += stats.ttest_ind(coeffs[:30], coeffs[30:]).pvalue < 0.05
    assert 0.02 <= rejections / reps <= 0.09
