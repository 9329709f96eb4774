"""Shared fixtures: the benchmark table cache and tolerance helpers."""

from __future__ import annotations

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from interpconst.bounds import compute_bound_report

#: The seven benchmark angles with their certificate degrees.
THETA_CASES = (
    ("pi/6", math.pi / 6, 9),
    ("pi/4", math.pi / 4, 8),
    ("pi/3", math.pi / 3, 10),
    ("pi/2", math.pi / 2, 9),
    ("2pi/3", 2 * math.pi / 3, 8),
    ("3pi/4", 3 * math.pi / 4, 10),
    ("5pi/6", 5 * math.pi / 6, 8),
)

THETA_BY_NAME = {name: (theta, degree) for name, theta, degree in THETA_CASES}


def printed_tol(printed: str, units: int) -> float:
    """Tolerance of ``units`` in the last printed decimal digit."""
    mantissa = printed.split("e")[0]
    digits = len(mantissa.split(".")[1]) if "." in mantissa else 0
    return units * 10.0 ** (-digits) + 1e-12


class TableRunner:
    """Lazily computes and memoizes the benchmark pipeline runs."""

    def __init__(self):
        self._cache = {}
        self.durations = {}

    def report(self, name: str, n_subdiv: int):
        key = (name, n_subdiv)
        if key not in self._cache:
            theta, degree = THETA_BY_NAME[name]
            t0 = time.time()
            self._cache[key] = compute_bound_report(
                1.0, theta, 1.0, n_subdiv, fit_degree=degree)
            self.durations[key] = time.time() - t0
        return self._cache[key]


@pytest.fixture(scope="session")
def table_runs() -> TableRunner:
    return TableRunner()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
