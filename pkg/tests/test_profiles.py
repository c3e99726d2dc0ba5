# tests/test_profiles.py
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from core.errors import DomainError, InconsistencyError, ProfileParseError, ShapeMismatchError, ValidationError
from modules.profiles import ProfileFunction, ProfileSet, SampleGrid, inner_product, load_profiles, save_profiles

HEADER = "profile_id,channel,t_index,value\n"


def _write_csv(path, rows):
    path.write_text(HEADER + "".join(f"{r}\n" for r in rows), encoding="utf-8")
    return path


@st.composite
def sorted_grids(draw):
    inner = draw(st.lists(st.floats(min_value=0.001, max_value=0.999), min_size=1, max_size=30, unique=True))
    points = np.unique(np.round(np.concatenate([[0.0], inner, [1.0]]), 6))
    return SampleGrid.from_points(points)


# ---------------------------------------------------------------------------
# SampleGrid
# ---------------------------------------------------------------------------

def test_uniform_grid_default_has_401_points():
    grid = SampleGrid.uniform()
    assert grid.n == 401
    assert grid.points[0] == 0.0 and grid.points[-1] == 1.0
    assert abs(grid.weights.sum() - 1.0) < 1e-12


@given(sorted_grids())
def test_weights_sum_to_span(grid):
    assert abs(grid.weights.sum() - (grid.points[-1] - grid.points[0])) < 1e-12


@pytest.mark.parametrize("points", [[0.0, 0.5, 0.5, 1.0], [0.0, 1.2], [0.3, 0.1], [0.0]])
def test_invalid_grid_rejected(points):
    with pytest.raises(DomainError):
        SampleGrid.from_points(points)


def test_grid_is_read_only(small_grid):
    with pytest.raises(ValueError):
        small_grid.points[0] = 0.5


# ---------------------------------------------------------------------------
# inner_product
# ---------------------------------------------------------------------------

def test_inner_product_constant_one():
    grid = SampleGrid.uniform()
    one = np.ones(grid.n)
    assert abs(inner_product(one, one, grid) - 1.0) < 1e-12


def test_inner_product_sine_unit_norm():
    grid = SampleGrid.uniform(401)
    f = np.sqrt(2.0) * np.sin(2.0 * np.pi * grid.points)
    assert abs(inner_product(f, f, grid) - 1.0) < 1e-4


def test_inner_product_sine_cosine_orthogonal():
    grid = SampleGrid.uniform(401)
    f = np.sqrt(2.0) * np.sin(2.0 * np.pi * grid.points)
    g = np.sqrt(2.0) * np.cos(2.0 * np.pi * grid.points)
    assert abs(inner_product(f, g, grid)) < 1e-4


@given(sorted_grids(), st.floats(-5, 5), st.floats(-5, 5))
def test_quadrature_exact_for_linear_integrands(grid, a, b):
    f = a + b * grid.points
    expected = a * (grid.points[-1] - grid.points[0]) + 0.5 * b * (grid.points[-1] ** 2 - grid.points[0] ** 2)
    assert abs(inner_product(f, np.ones(grid.n), grid) - expected) < 1e-12


def test_inner_product_sums_channels(small_grid):
    f = ProfileFunction(small_grid, np.ones((3, small_grid.n)))
    assert abs(inner_product(f, f) - 3.0) < 1e-12


def test_inner_product_shape_mismatch(small_grid):
    with pytest.raises(ShapeMismatchError):
        inner_product(np.ones(small_grid.n), np.ones(small_grid.n - 1), small_grid)
    with pytest.raises(ShapeMismatchError):
        inner_product(np.ones(small_grid.n), np.ones(small_grid.n))


# ---------------------------------------------------------------------------
# ProfileSet
# ---------------------------------------------------------------------------

def test_profile_set_requires_two_profiles(small_grid):
    with pytest.raises(ValidationError):
        ProfileSet(small_grid, np.zeros((1, 2, small_grid.n)))


def test_profile_set_rejects_non_finite(small_grid):
    values = np.zeros((3, 1, small_grid.n))
    values[1, 0, 4] = np.nan
    with pytest.raises(DomainError):
        ProfileSet(small_grid, values)


def test_permute_channels_round_trip(toy_data):
    order = [2, 0, 1]
    back = toy_data.permute_channels(order).permute_channels(np.argsort(order))
    assert np.array_equal(back.values, toy_data.values)


def test_profile_and_mean_curve(toy_data):
    assert toy_data.profile(0).p == toy_data.p
    assert np.allclose(toy_data.mean_curve().values, toy_data.values.mean(axis=0))


# ---------------------------------------------------------------------------
# Ficheros
# ---------------------------------------------------------------------------

def test_load_small_csv(tmp_path):
    path = _write_csv(tmp_path / "two.csv", [
        "0,0,0,1.0", "0,0,1,2.0", "0,0,2,3.0",
        "1,0,0,1.5", "1,0,1,2.5", "1,0,2,3.5",
    ])
    data = load_profiles(path)
    assert (data.m, data.p, data.n) == (2, 1, 3)
    assert np.allclose(data.grid.points, [0.0, 0.5, 1.0])
    assert np.allclose(data.values[1, 0], [1.5, 2.5, 3.5])


def test_profiles_ordered_by_id(tmp_path):
    path = _write_csv(tmp_path / "order.csv", [
        "7,0,0,70", "7,0,1,71",
        "3,0,0,30", "3,0,1,31",
    ])
    data = load_profiles(path)
    assert np.allclose(data.values[:, 0, 0], [30, 70])


def test_missing_point_is_inconsistent(tmp_path):
    path = _write_csv(tmp_path / "ragged.csv", [
        "0,0,0,1.0", "0,0,1,2.0", "0,0,2,3.0",
        "1,0,0,1.5", "1,0,1,2.5",
    ])
    with pytest.raises(InconsistencyError, match="perfil 1 canal 0"):
        load_profiles(path)


def test_corrupted_row_reports_line(tmp_path):
    path = _write_csv(tmp_path / "bad.csv", ["0,0,0,1.0", "0,0,1,2.0", "1,0,0,abc", "1,0,1,2.5"])
    with pytest.raises(ProfileParseError) as info:
        load_profiles(path)
    assert info.value.row == 4
    assert "fila 4" in str(info.value)


def test_non_finite_value_is_domain_error(tmp_path):
    path = _write_csv(tmp_path / "nan.csv", ["0,0,0,1.0", "0,0,1,nan", "1,0,0,1.0", "1,0,1,2.0"])
    with pytest.raises(DomainError):
        load_profiles(path)


def test_missing_columns(tmp_path):
    path = tmp_path / "cols.csv"
    path.write_text("profile_id,value\n0,1.0\n", encoding="utf-8")
    with pytest.raises(ProfileParseError):
        load_profiles(path)


def test_missing_file(tmp_path):
    with pytest.raises(ValidationError):
        load_profiles(tmp_path / "nope.csv")


@pytest.mark.parametrize("suffix", ["csv", "json"])
def test_save_load_round_trip(tmp_path, toy_data, suffix):
    path = save_profiles(toy_data, tmp_path / f"data.{suffix}")
    loaded = load_profiles(path)
    assert loaded.values.shape == toy_data.values.shape
    assert np.max(np.abs(loaded.values - toy_data.values)) <= 1e-12
    assert loaded.grid.same_as(toy_data.grid)


def test_non_uniform_grid_sidecar(tmp_path):
    grid = SampleGrid.from_points([0.0, 0.1, 0.35, 0.8, 1.0])
    data = ProfileSet(grid, np.arange(20, dtype=float).reshape(2, 2, 5))
    path = save_profiles(data, tmp_path / "nu.csv")
    sidecar = json.loads((tmp_path / "nu.grid.json").read_text(encoding="utf-8"))
    assert sidecar["n"] == 5
    loaded = load_profiles(path)
    assert np.allclose(loaded.grid.points, grid.points)


def test_json_channel_count_mismatch(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"grid": [0.0, 1.0], "p": 2, "profiles": [[[1, 2], [3, 4]], [[1, 2]]]}), encoding="utf-8")
    with pytest.raises(InconsistencyError):
        load_profiles(path)


@pytest.mark.parametrize(
    "payload",
    [
        {"grid": [0.0, 0.5, 1.0], "p": 1, "profiles": [1, 2]},
        {"grid": [0.0, 0.5, 1.0], "p": 1, "profiles": [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]},
        {"grid": [0.0, 0.5, 1.0], "p": 1, "profiles": {"0": [[1.0, 2.0, 3.0]]}},
        {"grid": 3, "p": 1, "profiles": [[[1.0, 2.0, 3.0]], [[4.0, 5.0, 6.0]]]},
    ],
)
def test_json_wrong_nesting_is_parse_error(tmp_path, payload):
    path = tmp_path / "nested.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    with pytest.raises(ProfileParseError):
        load_profiles(path)
