from __future__ import annotations

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from pc2 import Group, from_relations, validate
from pc2.oracle import build_oracle, compare_with_engine, relators

from conftest import small_groups


@pytest.mark.parametrize("G", small_groups(), ids=lambda G: G.pres.name)
def test_cayley_table_agrees(G):
    rep = compare_with_engine(G)
    assert rep.order_matches and rep.bijective and rep.generator_actions and rep.full_table


def test_relator_count():
    G = small_groups()[0]
    # three power relators and three commutator relators
    assert len(relators(G.pres)) == 6


def test_oracle_order_of_extraspecial_125():
    assert build_oracle(small_groups()[1].pres).order == 125


@st.composite
def class2_presentations(draw):
    """Random consistent class-2 tables: commutators land in central generators."""
    p = 3
    a = draw(st.integers(2, 3))
    c = draw(st.integers(1, 5 - a))
    orders = [draw(st.integers(1, 2)) for _ in range(a)] + [draw(st.integers(1, 2)) for _ in range(c)]
    assume(sum(orders) <= 5)
    moduli = [p**e for e in orders]
    rels = []
    for l in range(a):
        for j in range(l):
            value = [0] * a + [draw(st.integers(0, moduli[a + t] - 1)) for t in range(c)]
            rels.append((l, j, value))
    return from_relations(p, orders, rels)


@settings(max_examples=40, deadline=None)
@given(class2_presentations())
def test_random_presentations_agree(pres):
    assume(validate(pres).ok)
    rep = compare_with_engine(Group(pres))
    assert rep.ok
