import json
import sys

import numpy as np
import pytest

from radsub.cones import OrthantCone
from radsub.conic import ConicProgram

CANONICAL = {
    "kind": "lp", "name": "canonical",
    "A": [[1, 1, 1]], "b": [3], "c": [1, 0, 0], "e": [1, 1, 1],
    "params": {"x_bar": [0.5, 2.5, 0], "z_star": 0},
}


def canonical_program():
    return ConicProgram([1, 0, 0], [[1, 1, 1]], [3], OrthantCone([1, 1, 1]), name="canonical")


@pytest.fixture
def canonical():
    return canonical_program()


@pytest.fixture
def x_bar():
    return np.array([0.5, 2.5, 0.0])


@pytest.fixture
def lp_file(tmp_path):
    path = tmp_path / "lp.json"
    path.write_text(json.dumps(CANONICAL))
    return path


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "SUMMARY_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
