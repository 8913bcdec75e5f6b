"""CSV ingestion driven by dataset recipes.

A recipe names the feature columns, the protected column, an optional min-max
scaling step, and an optional seeded subsample. Recipes for the four benchmark
datasets ship in the repository's recipes/ directory as JSON files.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .core import Dataset, validate_dataset
from .exceptions import (
    ConfigError,
    IoFailure,
    MissingColumn,
    NonNumericCell,
    SingleGroup,
)

SCALING_MODES = ("none", "min-max")


@dataclass(frozen=True)
class DatasetRecipe:
    """How to turn one CSV file into a Dataset.

    Attributes:
        name: short dataset identifier.
        feature_columns: numeric columns forming the feature matrix.
        protected_column: column holding the group label (any string values).
        scaling: "none" (default) or "min-max" per feature.
        subsample_count / subsample_seed: optional uniform row subsample
            without replacement; rows keep file order.
    """

    name: str
    feature_columns: tuple
    protected_column: str
    scaling: str = "none"
    subsample_count: int | None = None
    subsample_seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "feature_columns", tuple(self.feature_columns))
        if not self.feature_columns:
            raise ConfigError("feature_columns must be nonempty")
        if self.protected_column in self.feature_columns:
            raise ConfigError(
                f"protected column {self.protected_column!r} may not be a feature"
            )
        if self.scaling not in SCALING_MODES:
            raise ConfigError(f"scaling must be one of {SCALING_MODES}")
        if self.subsample_count is not None and self.subsample_count < 1:
            raise ConfigError("subsample count must be >= 1")


def load_recipe(path) -> DatasetRecipe:
    """Parse a recipe JSON file (see recipes/ for the schema)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read recipe {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"recipe {path} is not valid JSON: {exc}") from None
    try:
        sub = raw.get("subsample") or {}
        return DatasetRecipe(
            name=raw["name"],
            feature_columns=tuple(raw["feature_columns"]),
            protected_column=raw["protected_column"],
            scaling=raw.get("scaling", "none"),
            subsample_count=sub.get("count"),
            subsample_seed=sub.get("seed"),
        )
    except KeyError as exc:
        raise ConfigError(f"recipe {path} missing key {exc}") from None


def load_csv(path, recipe: DatasetRecipe) -> Dataset:
    """Read a header-ed CSV into a Dataset per the recipe.

    Rows keep file order. Feature cells must parse as numbers (hard error,
    never a silent row drop — dropped rows would corrupt group counts). When
    a subsample is configured, a uniform sample without replacement is drawn
    under the recipe seed and kept in file order; counts >= n keep all rows.
    Min-max scaling, when enabled, is applied to the rows actually kept
    (constant features scale to 0).
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise IoFailure(f"{path} is empty") from None
            header = [h.strip() for h in header]
            col_index = {}
            for col in (*recipe.feature_columns, recipe.protected_column):
                if col not in header:
                    raise MissingColumn(col)
                col_index[col] = header.index(col)

            features: list[list[float]] = []
            labels: list[str] = []
            needed = max(col_index.values())
            for line_no, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) <= needed:
                    raise IoFailure(f"{path}:{line_no}: row has too few columns")
                parsed = []
                for col in recipe.feature_columns:
                    cell = row[col_index[col]].strip()
                    try:
                        parsed.append(float(cell))
                    except ValueError:
                        raise NonNumericCell(line_no, col, cell) from None
                features.append(parsed)
                labels.append(row[col_index[recipe.protected_column]].strip())
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from None

    points = np.asarray(features, dtype=np.float64)
    group_labels = np.asarray(labels)

    if recipe.subsample_count is not None and recipe.subsample_count < len(features):
        rng = np.random.default_rng(recipe.subsample_seed)
        keep = np.sort(rng.choice(len(features), size=recipe.subsample_count, replace=False))
        points = points[keep]
        group_labels = group_labels[keep]

    if recipe.scaling == "min-max":
        lo = points.min(axis=0)
        span = points.max(axis=0) - lo
        span[span == 0.0] = 1.0
        points = (points - lo) / span

    return validate_dataset(points, group_labels)


def dataset_balance(dataset: Dataset) -> float:
    """min over ordered group pairs of n_a / n_b = min count / max count."""
    if dataset.m < 2:
        raise SingleGroup("dataset balance needs at least two groups")
    counts = dataset.group_counts
    return float(counts.min() / counts.max())
