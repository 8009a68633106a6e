"""Shared fixtures"""
import numpy as np
import pytest
from loguru import logger

from src.prox.chambolle import ChambolleConfig


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def tight_chambolle():
    return ChambolleConfig(tau=0.25, tol=1e-7, max_iters=200000)


@pytest.fixture
def log_records():
    """(level, component, message) of every record emitted while the test runs"""
    records = []

    def sink(message):
        record = message.record
        records.append((record["level"].name, record["extra"].get("component"), record["message"]))

    handler = logger.add(sink, level="DEBUG")
    yield records
    logger.remove(handler)
