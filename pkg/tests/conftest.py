import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from _report import ACCEPTANCE_LINES  # noqa: E402
from lemma_forge import build_graph, loads_trace  # noqa: E402

G5_TEXT = "A3\nA3\nC5 1 2\nC7 3 1\nC9 4 3\n"

REFERENCE_LISTING = """\
F13      #1, Definition (size 13): T <=> (\\A0. A0) = (\\A0. A0)
R9       #2, Reflexivity (size 9): (\\A0. A0) = (\\A0. A0)
R5       #3, Reflexivity (size 5): T <=> T
R5       #4, Reflexivity (size 5): (<=>) = (<=>)
C17 4 1  #5, Application(4,1):     (<=>) T = (<=>) ((\\A0. A0) = (\\A0. A0))
C21 5 3  #6, Application(5,3):     (T <=> T) <=> (\\A0. A0) = (\\A0. A0) <=> T
E13 6 3  #7, EQ_MP(6,3) (size 13): (\\A0. A0) = (\\A0. A0) <=> T
"""


@pytest.fixture
def g5_trace():
    return loads_trace(G5_TEXT)


@pytest.fixture
def g5(g5_trace):
    return build_graph(g5_trace, {5: "T"}, {"A"})


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
