"""CSV ingestion through recipes: parsing, scaling, subsampling, errors."""
import dataclasses
import json

import numpy as np
import pytest

from fairclust import (
    ConfigError,
    DatasetRecipe,
    IoFailure,
    MissingColumn,
    NonNumericCell,
    SingleGroup,
    dataset_balance,
    load_csv,
    load_recipe,
    validate_dataset,
)

from conftest import RECIPES


@pytest.fixture
def tiny_csv(tmp_path):
    path = tmp_path / "tiny.csv"
    path.write_text(
        "age, income, city, sex\n"
        "1, 10, x, f\n"
        "2, 20, y, m\n"
        "3, 30, x, f\n"
        "4, 40, z, m\n"
    )
    return path


def _recipe(**overrides):
    base = dict(
        name="tiny",
        feature_columns=("age", "income"),
        protected_column="sex",
    )
    base.update(overrides)
    return DatasetRecipe(**base)


def test_load_csv_basic(tiny_csv):
    ds = load_csv(tiny_csv, _recipe())
    assert ds.n == 4 and ds.d == 2 and ds.m == 2
    assert ds.points.tolist() == [[1, 10], [2, 20], [3, 30], [4, 40]]
    assert ds.label_names == ("f", "m")
    assert ds.groups.tolist() == [0, 1, 0, 1]


def test_load_csv_min_max_scaling(tiny_csv):
    ds = load_csv(tiny_csv, _recipe(scaling="min-max"))
    expected = [[0.0, 0.0], [1 / 3, 1 / 3], [2 / 3, 2 / 3], [1.0, 1.0]]
    assert np.allclose(ds.points, expected, atol=1e-15)
    assert ds.points.min() == 0.0 and ds.points.max() == 1.0


def test_load_csv_constant_feature_scales_to_zero(tmp_path):
    path = tmp_path / "const.csv"
    path.write_text("a,b,g\n5,1,x\n5,2,y\n")
    ds = load_csv(path, DatasetRecipe("c", ("a", "b"), "g", scaling="min-max"))
    assert ds.points[:, 0].tolist() == [0.0, 0.0]
    assert ds.points[:, 1].tolist() == [0.0, 1.0]


def test_load_csv_missing_column(tiny_csv):
    with pytest.raises(MissingColumn) as err:
        load_csv(tiny_csv, _recipe(feature_columns=("age", "zip")))
    assert err.value.column == "zip"


def test_load_csv_non_numeric_cell_reports_location(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,g\n1,x\noops,y\n3,z\n")
    with pytest.raises(NonNumericCell) as err:
        load_csv(path, DatasetRecipe("b", ("a",), "g"))
    assert err.value.row == 3  # header is line 1
    assert err.value.column == "a"
    assert err.value.value == "oops"


def test_load_csv_short_row_reports_line(tmp_path):
    path = tmp_path / "short.csv"
    path.write_text("a,b,g\n1,2,x\n3\n")
    with pytest.raises(IoFailure) as err:
        load_csv(path, DatasetRecipe("s", ("a", "b"), "g"))
    assert ":3:" in str(err.value)


def test_load_csv_missing_file():
    with pytest.raises(IoFailure):
        load_csv("/nonexistent/nowhere.csv", _recipe())


def test_load_csv_empty_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(IoFailure):
        load_csv(path, _recipe())


def test_subsample_keeps_file_order_and_is_deterministic(tmp_path):
    path = tmp_path / "big.csv"
    lines = ["v,g"] + [f"{i},{'a' if i % 2 else 'b'}" for i in range(100)]
    path.write_text("\n".join(lines) + "\n")
    recipe = DatasetRecipe("big", ("v",), "g", subsample_count=10, subsample_seed=5)
    ds = load_csv(path, recipe)
    assert ds.n == 10
    values = ds.points[:, 0].tolist()
    assert values == sorted(values)  # file order preserved
    assert np.array_equal(ds.points, load_csv(path, recipe).points)
    different = dataclasses.replace(recipe, subsample_seed=6)
    assert not np.array_equal(ds.points, load_csv(path, different).points)


def test_subsample_count_at_least_n_keeps_all(tmp_path):
    path = tmp_path / "small.csv"
    path.write_text("v,g\n1,a\n2,b\n")
    recipe = DatasetRecipe("s", ("v",), "g", subsample_count=5, subsample_seed=0)
    assert load_csv(path, recipe).n == 2


def test_recipe_validation():
    with pytest.raises(ConfigError):
        DatasetRecipe("x", (), "g")
    with pytest.raises(ConfigError):
        DatasetRecipe("x", ("g", "a"), "g")
    with pytest.raises(ConfigError):
        DatasetRecipe("x", ("a",), "g", scaling="z-score")
    with pytest.raises(ConfigError):
        DatasetRecipe("x", ("a",), "g", subsample_count=0)


def test_load_recipe_roundtrip(tmp_path):
    path = tmp_path / "r.json"
    path.write_text(
        json.dumps(
            {
                "name": "toy",
                "feature_columns": ["a", "b"],
                "protected_column": "g",
                "scaling": "min-max",
                "subsample": {"count": 7, "seed": 3},
            }
        )
    )
    recipe = load_recipe(path)
    assert recipe.feature_columns == ("a", "b")
    assert recipe.scaling == "min-max"
    assert recipe.subsample_count == 7 and recipe.subsample_seed == 3


def test_load_recipe_errors(tmp_path):
    with pytest.raises(IoFailure):
        load_recipe(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_recipe(bad)
    incomplete = tmp_path / "inc.json"
    incomplete.write_text(json.dumps({"name": "x"}))
    with pytest.raises(ConfigError):
        load_recipe(incomplete)


def test_shipped_recipes_parse():
    for name in ("adult.json", "bank.json", "diabetes.json", "census2.json"):
        recipe = load_recipe(RECIPES / name)
        assert recipe.feature_columns
        assert recipe.protected_column not in recipe.feature_columns


def test_dataset_balance():
    even = validate_dataset(np.arange(4.0), [0, 0, 1, 1])
    assert dataset_balance(even) == 1.0
    skewed = validate_dataset(np.arange(4.0), [0, 0, 0, 1])
    assert dataset_balance(skewed) == 1.0 / 3.0
    single = validate_dataset(np.arange(4.0), [0] * 4)
    with pytest.raises(SingleGroup):
        dataset_balance(single)


def test_benchmark_standin_loads_with_expected_group_counts(adult_like_csv):
    recipe = load_recipe(RECIPES / "adult.json")
    ds = load_csv(adult_like_csv, recipe)
    assert ds.n == 32561
    assert ds.label_names == ("Female", "Male")
    assert ds.group_counts.tolist() == [10771, 21790]
    assert ds.n == int(ds.group_counts.sum())


def test_benchmark_standin_subsample(adult_like_5k):
    assert adult_like_5k.n == 5000
    assert adult_like_5k.m == 2
