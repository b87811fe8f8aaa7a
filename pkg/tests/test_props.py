from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pc2.autsearch import LiftSystem, lift_automorphisms
from pc2.maps import is_central
from pc2.props import (
    FAMILY_A_SYSTEM,
    FAMILY_B_SYSTEM,
    CoeffMatrix,
    check_prop1,
    check_prop2,
    conclusion_check,
    extract_coeffs,
    labels,
    rebuild,
    scan,
)

from conftest import family

ZERO = np.zeros((4, 4), dtype=np.int64)


def failing(verdicts: dict) -> set[str]:
    return {k for k, v in verdicts.items() if not v}


def test_labels():
    assert labels(FAMILY_A_SYSTEM) == ["e1", "e2", "e3", "e4", "e5"] + [f"e{i}" for i in range(7, 15)]
    assert labels(FAMILY_B_SYSTEM) == [f"f{i}" for i in range(1, 13)]


def test_zero_matrix_satisfies_everything():
    for p in (3, 5):
        assert not failing(check_prop1(ZERO, p))
        assert not failing(check_prop2(ZERO, p))
        assert conclusion_check(ZERO, p)


def test_single_entry_violations():
    a = ZERO.copy()
    a[1, 0] = 1
    assert failing(check_prop1(a, 3)) == {"e2"}
    b = ZERO.copy()
    b[3, 3] = 2
    assert failing(check_prop2(b, 3)) == {"f3", "f6"}
    c = ZERO.copy()
    c[3, 1] = 5  # multiples of p vanish
    assert not failing(check_prop1(c, 5))


def test_unit_diagonal_is_excluded():
    # a11 = 1 alone breaks the linear part of the family A system
    a = ZERO.copy()
    a[0, 0] = 1
    assert {"e3", "e7", "e9", "e10"} <= failing(check_prop1(a, 3))
    assert not conclusion_check(a, 3)


def test_coefficients_of_power_map(A33):
    G = A33.G
    imgs = np.eye(4, dtype=np.int64)
    imgs[0, 0] = 4
    co = extract_coeffs(G, imgs)
    assert co.a[0].tolist() == [3, 0, 0, 0]
    assert np.array_equal(rebuild(G, co), imgs)


def test_extract_checks_automorphism(A33):
    with pytest.raises(ValueError):
        extract_coeffs(A33.G, np.zeros((4, 4), dtype=np.int64), check=(A33.frattini_quotient, A33.S))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["A", "B"]), st.data())
def test_conclusion_iff_central(fam, data):
    an = family(fam, 3, 3)
    G = an.G
    shifts = np.array([[data.draw(st.integers(0, m - 1)) for m in G.mods.tolist()] for _ in range(G.k)])
    imgs = np.stack([G.mul(G.gen(i), shifts[i]) for i in range(G.k)])
    co = extract_coeffs(G, imgs)
    assert np.array_equal(rebuild(G, co), imgs)
    assert conclusion_check(co.a, 3) == is_central(G, an.S, imgs)


def test_prop1_on_all_automorphisms_of_a33(A33):
    summary = scan(A33.G, lift_automorphisms(A33), FAMILY_A_SYSTEM, "A")
    assert summary.checked == 3**13
    assert summary.ok and summary.violation_count == 0
    assert all(v == 3**13 for v in summary.counts.values())


def test_prop2_on_sampled_automorphisms_of_b33(B33):
    system = LiftSystem(B33)
    imgs = system.sample(B33.frattini_quotient.identity_matrix, 2000, np.random.default_rng(5))
    summary = scan(B33.G, [imgs], FAMILY_B_SYSTEM, "B")
    assert summary.ok and summary.checked == 2000
    assert summary.to_dict()["violationCount"] == 0


def test_scan_reports_violations(A33):
    G = A33.G
    imgs = np.eye(4, dtype=np.int64)[None].repeat(2, axis=0)
    imgs[1, 1] = G.mul(G.gen(1), G.gen(0))  # a21 = 1
    summary = scan(G, [imgs], FAMILY_A_SYSTEM, "A")
    assert summary.violation_count == 1
    assert set(summary.violations[0]["failed"]) >= {"e2", "conclusion"}


def test_coeff_matrix_mod_p():
    co = CoeffMatrix(np.array([[4, 3], [5, 9]]), 3)
    assert co.mod_p.tolist() == [[1, 0], [2, 0]]
