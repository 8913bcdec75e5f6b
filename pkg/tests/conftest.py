"""Shared fixtures: a deterministic census-like benchmark CSV.

The real census benchmark is not redistributable with the repository, so the
suite generates a stand-in with the same group proportions (21790 / 10771)
and plausible feature scales, written once per session and loaded through the
shipped recipe machinery exactly like the real file would be.
"""
from __future__ import annotations

import csv
import dataclasses
from pathlib import Path

import numpy as np
import pytest

from fairclust import load_csv, load_recipe

REPO_ROOT = Path(__file__).resolve().parent.parent
RECIPES = REPO_ROOT / "recipes"

GROUP_SIZES = {"Male": 21790, "Female": 10771}


def _synthesize_rows(rng: np.random.Generator) -> list[list]:
    n = sum(GROUP_SIZES.values())
    sexes = np.array(
        ["Male"] * GROUP_SIZES["Male"] + ["Female"] * GROUP_SIZES["Female"]
    )
    rng.shuffle(sexes)
    # Latent mixture so k-clustering has real structure to find.
    component = rng.integers(0, 5, size=n)
    age = np.clip(rng.normal(25 + 8 * component, 9.0), 17, 90).astype(np.int64)
    fnlwgt = np.clip(
        rng.normal(120_000 + 40_000 * component, 60_000.0), 12_285, 1_484_705
    ).astype(np.int64)
    education = np.clip(rng.normal(6 + 2 * component, 2.5), 1, 16).astype(np.int64)
    gain = np.where(
        rng.random(n) < 0.08, rng.integers(100, 20_000, size=n), 0
    ).astype(np.int64)
    hours = np.clip(rng.normal(30 + 3 * component, 9.0), 1, 99).astype(np.int64)
    rows = []
    for i in range(n):
        rows.append(
            [age[i], fnlwgt[i], education[i], gain[i], hours[i], sexes[i]]
        )
    return rows


@pytest.fixture(scope="session")
def adult_like_csv(tmp_path_factory) -> Path:
    """CSV with the benchmark's header and group counts, synthetic values."""
    path = tmp_path_factory.mktemp("bench") / "adult.csv"
    rows = _synthesize_rows(np.random.default_rng(20260816))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["age", "fnlwgt", "education_num", "capital_gain", "hours_per_week", "sex"]
        )
        writer.writerows(rows)
    return path


@pytest.fixture(scope="session")
def adult_like_5k(adult_like_csv):
    """The stand-in loaded through the shipped recipe, subsampled to 5000."""
    recipe = dataclasses.replace(
        load_recipe(RECIPES / "adult.json"),
        subsample_count=5000,
        subsample_seed=7,
    )
    return load_csv(adult_like_csv, recipe)
