from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pc2 import Group, from_relations
from pc2.autcent import Analysis, PreconditionError, autcent_order
from pc2.autsearch import (
    LiftSystem,
    aut_order_and_centrality,
    characteristic_profile,
    lift_automorphism_indices,
    lift_solve,
    naive_backtrack,
    profile_matrices,
)
from pc2.maps import compose, is_automorphism, is_central
from pc2.modular import smith_form
from pc2.subgroups import BudgetExceeded

from conftest import extraspecial, family

# -- Smith form -------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 3), st.integers(1, 2), st.data())
def test_smith_form_diagonalizes(rows, cols, f, data):
    p, q = 3, 3**f
    C = np.array(data.draw(st.lists(st.lists(st.integers(0, q - 1), min_size=cols, max_size=cols),
                                    min_size=rows, max_size=rows)), dtype=np.int64)
    sf = smith_form(C, p, f)
    D = sf.U @ C @ sf.V % q
    for i in range(rows):
        for j in range(cols):
            want = p ** sf.vals[i] % q if i == j and i < len(sf.vals) else 0
            assert D[i, j] == want
    # count and solvability against exhaustive search over (Z/q)^cols
    zs = np.array(list(itertools.product(range(q), repeat=cols)), dtype=np.int64)
    images = zs @ C.T % q
    t = images[data.draw(st.integers(0, len(zs) - 1))]
    hits = int((images == t).all(axis=1).sum())
    assert sf.solvable(t[None])[0] and hits == sf.solution_count()
    z = sf.particular(t[None])[0]
    assert np.array_equal(C @ z % q, t)
    reach = {tuple(r) for r in images.tolist()}
    allt = np.array(list(itertools.product(range(q), repeat=rows)), dtype=np.int64)
    assert sf.solvable(allt).tolist() == [tuple(r) in reach for r in allt.tolist()]


# -- lift method --------------------------------------------------------------


@pytest.mark.parametrize("fam,p,n", [("A", 3, 3), ("A", 3, 4), ("A", 5, 3), ("B", 3, 3), ("B", 3, 4)])
def test_identity_lift_count_is_autcent(fam, p, n):
    an = family(fam, p, n)
    ident = an.frattini_quotient.identity_matrix
    res = lift_solve(an, ident)
    assert res.count == autcent_order(an)
    assert is_automorphism(an.G, an.frattini_quotient, res.sample)


def test_lift_count_independent_of_representatives(B33):
    G, S = B33.G, B33.S
    system = LiftSystem(B33)
    rng = np.random.default_rng(7)
    ident = B33.frattini_quotient.identity_matrix
    base = int(system.counts(ident[None])[0])
    zels = S.center.elements
    for _ in range(10):
        reps = zels[rng.integers(0, len(zels), size=G.k)]
        assert int(system.counts(ident[None], reps[None])[0]) == base


def test_non_invertible_matrix_rejected(A33):
    with pytest.raises(PreconditionError):
        lift_solve(A33, np.zeros((4, 4), dtype=np.int64))


def test_sampled_lifts_are_automorphisms(B33):
    system = LiftSystem(B33)
    rng = np.random.default_rng(3)
    imgs = system.sample(B33.frattini_quotient.identity_matrix, 200, rng)
    assert is_automorphism(B33.G, B33.frattini_quotient, imgs).all()
    assert is_central(B33.G, B33.S, imgs).all()


def test_composition_closed(A33):
    system = LiftSystem(A33)
    rng = np.random.default_rng(11)
    imgs = system.sample(A33.frattini_quotient.identity_matrix, 40, rng)
    comp = compose(A33.G, imgs[:20], imgs[20:])
    assert is_automorphism(A33.G, A33.frattini_quotient, comp).all()


def test_lift_needs_z_equals_phi():
    # C9: Z(G) = G but Phi(G) = <x^3>
    an = Analysis(Group(from_relations(3, [2], [])))
    with pytest.raises(PreconditionError):
        LiftSystem(an)


# -- census -------------------------------------------------------------------


@pytest.mark.parametrize("fam,p,n", [("A", 3, 3), ("A", 3, 4), ("B", 3, 3)])
def test_census_equals_autcent(fam, p, n):
    an = family(fam, p, n)
    res = aut_order_and_centrality(an)
    assert res.aut_order == autcent_order(an)
    assert res.all_central
    assert len(res.feasible_matrices) == 1


def test_refinement_keeps_totals(A33):
    rough = characteristic_profile(A33, refine=False)
    fine = characteristic_profile(A33, refine=True)
    assert fine.product_size < rough.product_size
    assert (aut_order_and_centrality(A33, refine=False).aut_order
            == aut_order_and_centrality(A33).aut_order)


def test_census_on_extraspecial(E27):
    # Aut(E(3^3)) acts as GL(2,3) on G/Phi, with 9 automorphisms over each matrix
    res = aut_order_and_centrality(E27)
    assert res.aut_order == 48 * 9
    assert not res.all_central
    assert len(res.feasible_matrices) == 48


def test_census_budget(A33):
    with pytest.raises(BudgetExceeded):
        aut_order_and_centrality(A33, budget=10)


# -- backtracking oracle -------------------------------------------------------


def test_backtrack_cyclic():
    an = Analysis(Group(from_relations(3, [2], [])))
    res = naive_backtrack(an)
    assert res.authoritative and res.count == 6


@pytest.mark.parametrize("p", [3, 5])
def test_backtrack_equals_lift_extraspecial(p):
    an = Analysis(extraspecial(p))
    bt = naive_backtrack(an)
    lifted = lift_automorphism_indices(an)
    assert bt.authoritative
    assert bt.count == (p**2 - 1) * (p**2 - p) * p**2
    assert np.array_equal(bt.automorphisms, lifted)


def test_backtrack_budget_not_authoritative(A33):
    res = naive_backtrack(A33, budget=1000, collect=False)
    assert not res.authoritative


def test_unrefined_profile_of_a33(A33):
    prof = characteristic_profile(A33, refine=False)
    mats = np.concatenate(list(profile_matrices(prof)))
    assert len(mats) == 46656
    # x4 stays in the omega layer; only the image of x1 has an x1-coordinate, and it is a unit
    assert not prof.columns[3][:, :3].any()
    assert {tuple(r) for r in mats[:, 0, :].tolist()} == {(1, 0, 0, 0), (2, 0, 0, 0)}


def test_profile_needs_z_equals_phi():
    an = Analysis(Group(from_relations(3, [1, 1, 1], [])))
    with pytest.raises(PreconditionError):
        characteristic_profile(an)
