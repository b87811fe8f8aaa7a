from __future__ import annotations

import pytest

from pc2.families import FamilyParams, build, structural_report
from pc2.presentation import PresentationError

from conftest import family


@pytest.mark.parametrize("fam,p,n", [("A", 3, 3), ("A", 3, 4), ("A", 5, 3), ("B", 3, 3), ("B", 3, 4)])
def test_structure(fam, p, n):
    an = family(fam, p, n)
    sr = structural_report(an.G, an.S)
    extra = 5 if fam == "A" else 7
    assert sr.order == p ** (n + extra)
    assert sr.exponent == p**n
    assert sr.nilpotency_class == 2
    assert sr.center_equals_frattini
    assert sr.derived_elementary_abelian
    assert sr.purely_non_abelian
    assert sr.rank == 4


@pytest.mark.parametrize("p,n", [(3, 3), (3, 4), (5, 3)])
def test_family_a_invariants(p, n):
    an = family("A", p, n)
    assert an.abelianization.factors == (p ** (n - 1), p, p, p)
    assert an.center_invariants.factors == (p ** (n - 1), p, p)


def test_a33_numbers(A33):
    sr = structural_report(A33.G, A33.S)
    assert (sr.order, sr.center_order, sr.derived_order) == (6561, 81, 27)
    assert not sr.special
    assert sr.exponent_method == "census"


def test_b33_numbers(B33):
    assert B33.center_invariants.factors == (9, 9, 3, 3)
    assert B33.abelianization.factors == (9, 9, 3, 3)
    assert B33.S.derived.order == 81


@pytest.mark.parametrize("args,msg", [(("A", 2, 3), "odd"), (("A", 9, 3), "prime"), (("B", 3, 2), "at least 3"),
                                      (("C", 3, 3), "family")])
def test_bad_parameters(args, msg):
    with pytest.raises(PresentationError, match=msg):
        FamilyParams(*args)


def test_build_accepts_params():
    assert build(FamilyParams("a", 3, 3)) == build("A", 3, 3)
    assert FamilyParams("b", 3, 4).log_order == 11
