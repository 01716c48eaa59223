import numpy as np
import pytest

from mlbpknn.synthetic import write_pgm

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def write_image(tmp_path):
    def _write(name, img, binary=True):
        return write_pgm(tmp_path / name, img, binary=binary)
    return _write


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
