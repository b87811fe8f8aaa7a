from __future__ import annotations

import functools

import pytest

from pc2 import Group, from_relations
from pc2.autcent import Analysis
from pc2.families import build

CRITERIA: list[str] = []


def extraspecial(p: int = 3) -> Group:
    """Order p^3, exponent p: [x2, x1] = x3."""
    return Group(from_relations(p, [1, 1, 1], [(1, 0, (0, 0, 1))], name=f"E({p}^3)"))


def small_groups() -> list[Group]:
    """Consistent class-2 presentations of order at most 3^5."""
    return [
        extraspecial(3),
        extraspecial(5),
        Group(from_relations(3, [2], [], name="C9")),
        Group(from_relations(3, [1, 1], [], name="C3xC3")),
        Group(from_relations(3, [2, 1], [(1, 0, (3, 0))], name="M27")),
        Group(from_relations(3, [1, 1, 1, 1], [(1, 0, (0, 0, 1, 0))], name="E27xC3")),
        Group(from_relations(3, [2, 1, 1], [(1, 0, (0, 0, 1))], name="81a")),
        Group(from_relations(3, [1, 1, 1, 1, 1],
                             [(1, 0, (0, 0, 0, 1, 0)), (2, 0, (0, 0, 0, 0, 1)), (2, 1, (0, 0, 0, 1, 2))],
                             name="243a")),
        Group(from_relations(3, [2, 1, 1, 1], [(1, 0, (3, 0, 0, 0)), (2, 0, (0, 0, 0, 1))], name="243b")),
    ]


@functools.lru_cache(maxsize=None)
def family(fam: str, p: int, n: int) -> Analysis:
    return Analysis(Group(build(fam, p, n)))


@pytest.fixture(scope="session")
def A33() -> Analysis:
    return family("A", 3, 3)


@pytest.fixture(scope="session")
def B33() -> Analysis:
    return family("B", 3, 3)


@pytest.fixture(scope="session")
def E27() -> Analysis:
    return Analysis(extraspecial(3))


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)
