from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pc2 import Group, from_relations
from pc2.autcent import (
    Analysis,
    PreconditionError,
    adney_yen,
    autcent_order,
    basis_automorphisms,
    commutation_check,
    make_central_aut,
)
from pc2.maps import compose, is_automorphism, is_central

from conftest import family


@pytest.mark.parametrize("fam,p,n,log", [("A", 3, 3, 13), ("A", 3, 4, 14), ("A", 5, 3, 13),
                                         ("B", 3, 3, 20), ("B", 3, 4, 21)])
def test_autcent_order(fam, p, n, log):
    assert autcent_order(family(fam, p, n)) == p**log


@pytest.mark.parametrize("fam,p,n", [("A", 3, 3), ("A", 3, 4), ("A", 5, 3)])
def test_family_a_criterion_holds(fam, p, n):
    rep = adney_yen(family(fam, p, n))
    assert rep.r_equals_k and rep.cond_ii and rep.abelian
    assert rep.quotient_invariants == (p ** (n - 2),)
    assert rep.witness is not None


@pytest.mark.parametrize("n", [3, 4])
def test_family_b_criterion_fails(n):
    rep = adney_yen(family("B", 3, n))
    assert not rep.abelian
    assert rep.quotient_invariants == (3 ** (n - 2), 3)
    assert "not cyclic" in rep.cond_ii_reason


def test_commutation_matches_criterion(A33, B33):
    assert commutation_check(A33).abelian
    res = commutation_check(B33)
    assert not res.abelian
    w = res.witness
    assert w["first_then_second"] != w["second_then_first"]


def test_basis_automorphisms_are_central(B33):
    auts = basis_automorphisms(B33)
    assert len(auts) == len(B33.hom_basis.blocks)
    for a in auts:
        assert is_automorphism(B33.G, B33.frattini_quotient, a.images)
        assert is_central(B33.G, B33.S, a.images)


def test_make_central_aut_rejects_non_hom(A33):
    bad = np.zeros((4, 3), dtype=np.int64)
    bad[1, 0] = 1  # a C3 factor cannot map onto an element of order 9
    with pytest.raises(ValueError):
        make_central_aut(A33, bad)


def test_precondition_on_abelian_factor():
    # E27 x C3 has a direct abelian factor, so Z(G) is not inside Phi(G)
    G = Group(from_relations(3, [1, 1, 1, 1], [(1, 0, (0, 0, 1, 0))]))
    an = Analysis(G)
    assert not an.purely_non_abelian
    with pytest.raises(PreconditionError):
        autcent_order(an)


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_random_central_maps_commute_in_a33(data):
    an = family("A", 3, 3)
    hb = an.hom_basis
    draw = lambda: hb.combine([data.draw(st.integers(0, b.order - 1)) for b in hb.blocks])
    f, g = make_central_aut(an, draw()), make_central_aut(an, draw())
    assert np.array_equal(compose(an.G, f.images, g.images), compose(an.G, g.images, f.images))
