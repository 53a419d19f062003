from __future__ import annotations

import time

import pytest

from ctd.harness import compare_variants, run_scenario
from ctd.suite import scripted_suite


@pytest.fixture(scope="session")
def suite_runs():
    """All 30 scripted scenarios run once with the ddm circuit, with wall time."""
    scenarios = scripted_suite()
    t0 = time.perf_counter()
    runs = [(s, run_scenario(s)) for s in scenarios]
    elapsed = time.perf_counter() - t0
    return runs, elapsed


@pytest.fixture(scope="session")
def suite_compares():
    """Both circuit variants on identical sensing, for the metric orderings."""
    return [(s, compare_variants(s)) for s in scripted_suite()]
