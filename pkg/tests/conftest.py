import json

import numpy as np
import pytest

from nugap.algebra.tfm import TransferMatrix
from nugap.config import DEFAULT_CONFIG
from nugap.gen.plants import GenConfig


@pytest.fixture
def cfg():
    return DEFAULT_CONFIG


@pytest.fixture
def delay():
    """P = 1/z."""
    return TransferMatrix.siso([1.0], [0.0, 1.0])


@pytest.fixture
def zero_plant():
    return TransferMatrix.zeros(1, 1)


def constant(value):
    return TransferMatrix.siso([value])


@pytest.fixture
def write_doc(tmp_path):
    """Write a JSON document into the test directory and return its path."""

    def write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)

    return write


def siso_doc(num, den=(1.0,), label=None):
    doc = {"schema_version": "1.0", "kind": "siso", "entries": {"num": list(num), "den": list(den)}}
    if label is not None:
        doc["label"] = label
    return doc


def unit_points(n=64):
    return np.exp(2j * np.pi * np.arange(n) / n)


def plant_family(plant_seed, mimo=False):
    """Generator settings for random SISO plants or random 2x2 plants."""
    if mimo:
        return GenConfig(seed=plant_seed, p=2, m=2, max_degree=1)
    return GenConfig(seed=plant_seed)
