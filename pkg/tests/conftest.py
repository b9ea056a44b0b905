import os

import numpy as np
import pytest

from proxy_audit.dataset import Population, load_csv
from proxy_audit.session import load_model

DATA = os.path.join(os.path.dirname(__file__), "..", "src", "proxy_audit",
                    "data")


def data_path(name: str) -> str:
    return os.path.abspath(os.path.join(DATA, name))


@pytest.fixture(scope="session")
def retailer() -> Population:
    return load_csv(data_path("retailer.csv"), protected="pregnant")


@pytest.fixture(scope="session")
def retailer64() -> Population:
    return load_csv(data_path("retailer64.csv"), protected="pregnant")


@pytest.fixture(scope="session")
def masked_model():
    return load_model(data_path("masked_model.json"))


@pytest.fixture(scope="session")
def explicit_model():
    return load_model(data_path("explicit_model.json"))


@pytest.fixture(scope="session")
def nouse_model():
    return load_model(data_path("nouse_model.json"))


@pytest.fixture(scope="session")
def redline_model():
    return load_model(data_path("redline_model.json"))


@pytest.fixture(scope="session")
def tree_example_model():
    return load_model(data_path("tree_example_model.json"))


def make_population(names, matrix, protected, label=None) -> Population:
    return Population(tuple(names),
                      np.ascontiguousarray(matrix, dtype=np.float64),
                      protected, label)
