"""Shared fixtures."""

import math

import numpy as np
import pytest

from exclusion_codes.core.tasks import rec23_protocol, trine_exclusion_protocol

SQRT2 = math.sqrt(2)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def trine():
    return trine_exclusion_protocol()


@pytest.fixture
def rec23():
    return rec23_protocol()


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    """Keep tests in one process unless a test asks otherwise."""
    monkeypatch.setenv("EXCLUSION_CODES_WORKERS", "1")
