import numpy as np
import pytest

from boltzmann_classifier import core, data


@pytest.fixture(scope="session")
def wdbc_path(tmp_path_factory):
    return data.export_bundled_wdbc(tmp_path_factory.mktemp("bcw") / "wdbc.data")


@pytest.fixture(scope="session")
def bcw(wdbc_path):
    return data.load_wdbc(wdbc_path)


@pytest.fixture(scope="session")
def bcw_split(bcw):
    return data.split_train_test(bcw, 0.2, 42)


def make_model(centroids, kT=1.0, metric="l1", class_names=None):
    """Model with identity scaling so inputs are already 'scaled'."""
    C = np.asarray(centroids, dtype=float)
    names = class_names or [f"c{i}" for i in range(C.shape[0])]
    scaler = core.ScalerParams(np.zeros(C.shape[1]), np.ones(C.shape[1]))
    return core.BoltzmannModel(C, tuple(names), kT, metric, scaler,
                               tuple(f"f{j}" for j in range(C.shape[1])))


def toy_dataset():
    X = np.array([[0.0, 0.0], [0.2, 0.1], [1.0, 1.0], [0.9, 0.8]])
    return core.LabeledDataset(X, np.array([0, 0, 1, 1]), ("a", "b"), ("u", "v"))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
