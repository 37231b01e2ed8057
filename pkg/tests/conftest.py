"""Pytest configuration and shared fixtures.

This module provides:
- Pytest markers for test categorization (unit, integration, slow)
- SystemSpec fixtures parametrized over both variants
- Temporary directories and a deterministic worker count
"""

import tempfile
from collections.abc import Generator
from pathlib import Path

import numpy as np
import pytest

from banded.matrices import SystemSpec, Variant

SMALL_DIMENSIONS = (7, 8, 16)


# =============================================================================
# Pytest Configuration
# =============================================================================


def pytest_configure(config: pytest.Config) -> None:
    """Register custom markers for test categorization."""
    config.addinivalue_line("markers", "unit: mark test as a unit test (fast, isolated)")
    config.addinivalue_line("markers", "integration: mark test as an integration test")
    config.addinivalue_line("markers", "slow: mark test as slow running")


# =============================================================================
# Directory and Environment Fixtures
# =============================================================================


@pytest.fixture
def temp_data_dir() -> Generator[Path, None, None]:
    """Create a temporary directory for test artifacts."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def single_worker(monkeypatch: pytest.MonkeyPatch) -> None:
    """Pin the worker pool to one thread."""
    monkeypatch.setenv("HEPTAINV_THREADS", "1")


# =============================================================================
# SystemSpec Fixtures
# =============================================================================


@pytest.fixture(params=[Variant.TOEPLITZ, Variant.NEAR], ids=["toeplitz", "near"])
def variant(request: pytest.FixtureRequest) -> Variant:
    """Both matrix variants."""
    return request.param


@pytest.fixture(params=SMALL_DIMENSIONS, ids=lambda n: f"n={n}")
def small_spec(request: pytest.FixtureRequest, variant: Variant) -> SystemSpec:
    """Every (variant, n) pair over the small dimensions."""
    return SystemSpec(request.param, variant)


@pytest.fixture
def toeplitz7() -> SystemSpec:
    """Smallest Toeplitz member."""
    return SystemSpec(7, Variant.TOEPLITZ)


@pytest.fixture
def near7() -> SystemSpec:
    """Smallest near-Toeplitz member."""
    return SystemSpec(7, Variant.NEAR)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded random generator."""
    return np.random.default_rng(20240611)
