from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import strategies as st

from swshapley.core import BitSourceModel, EntropyOracle, load_fixture

ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    ACCEPTANCE_LINES.append(f"[{status}] {criterion}" + (f" -- {detail}" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def ex1():
    return load_fixture("example1")


@pytest.fixture
def indep():
    return load_fixture("independent")


@pytest.fixture
def ex5():
    return load_fixture("decomposable")


@pytest.fixture
def two():
    return load_fixture("two_terminal")


@pytest.fixture
def oracle_of():
    return EntropyOracle


weights = st.builds(Fraction, st.integers(0, 12), st.integers(1, 6))


@st.composite
def models(draw, min_players=1, max_players=5, max_bits=7):
    n = draw(st.integers(min_players, max_players))
    k = draw(st.integers(0, max_bits))
    bits = tuple((f"w{j}", draw(weights)) for j in range(k))
    ids = [b for b, _ in bits]
    observes = tuple(
        frozenset(draw(st.lists(st.sampled_from(ids), unique=True)) if ids else ())
        for _ in range(n)
    )
    return BitSourceModel(n, bits, observes)
