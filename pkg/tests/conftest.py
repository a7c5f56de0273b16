import numpy as np
import pytest
from hypothesis import strategies as st

from treestat.tree_core import Tree, layout

ACCEPTANCE_RESULTS = {}


def close_bits(m, K, bits):
    lay = layout(m, K)
    keep = np.zeros(lay.size, dtype=bool)
    for i, b in enumerate(bits):
        keep[i] = b and (i == 0 or keep[lay.parent[i]])
    return Tree.from_indicator(m, keep)


def trees(m=2, K=3):
    size = layout(m, K).size
    return st.lists(st.booleans(), min_size=size, max_size=size).map(lambda bits: close_bits(m, K, bits))


@pytest.fixture
def record_acceptance():
    def record(number, passed, detail=""):
        ACCEPTANCE_RESULTS[number] = (passed, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
