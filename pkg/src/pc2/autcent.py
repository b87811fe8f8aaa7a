"""Central automorphisms of purely non-abelian class-2 groups.

For such groups each ``f`` in ``Hom(G/G', Z(G))`` gives the central
automorphism ``x -> x f(xG')`` and every central automorphism arises this way.
The correspondence is checked per constructed map rather than assumed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .abelian import (
    AbelianInvariants,
    AbelianSection,
    HomBasis,
    decompose,
    heights,
    hom_basis,
    hom_count,
    is_hom_matrix,
    quotient_invariants,
    subgroup_invariants,
)
from .group import Group
from .maps import FrattiniQuotient, compose, is_automorphism, is_central
from .subgroups import StandardSubgroups, SubgroupData, closure, product_subgroup, standard_subgroups


class PreconditionError(ValueError):
    pass


class Analysis:
    """Lazily computed structure shared by the analysis modules."""

    def __init__(self, G: Group, S: StandardSubgroups | None = None):
        self.G = G
        self.S = S or standard_subgroups(G)

    @cached_property
    def center_invariants(self) -> AbelianInvariants:
        return subgroup_invariants(self.G, self.S.center)

    @cached_property
    def abelianization(self) -> AbelianInvariants:
        return quotient_invariants(self.G, self.S.derived, self.S)

    @cached_property
    def frattini_quotient(self) -> FrattiniQuotient:
        return FrattiniQuotient(self.G, self.S)

    @property
    def purely_non_abelian(self) -> bool:
        """Sufficient test ``Z(G) <= Phi(G)``."""
        return self.S.center.issubset(self.S.frattini)

    def require_purely_non_abelian(self) -> None:
        if not self.purely_non_abelian:
            raise PreconditionError("Z(G) <= Phi(G) fails, so purely non-abelian is not certified")

    @cached_property
    def hom_basis(self) -> HomBasis:
        return hom_basis(self.abelianization, self.center_invariants)


def autcent_order(an: Analysis) -> int:
    an.require_purely_non_abelian()
    return hom_count(an.abelianization, an.center_invariants)


@dataclass
class CentralAutomorphism:
    matrix: np.ndarray  # rows: G/G' basis, columns: Z(G) basis exponents
    images: np.ndarray  # (k, k)

    def image(self, G: Group, g):
        from .maps import evaluate

        return evaluate(G, self.images, g)


def central_images(an: Analysis, matrix) -> np.ndarray:
    """Generator images ``x_i f(x_i G')`` for a hom matrix (batched over matrices)."""
    G, Q, Z = an.G, an.abelianization, an.center_invariants
    mats = np.asarray(matrix, dtype=np.int64)
    single = mats.ndim == 2
    mats = mats[None] if single else mats
    gens = np.eye(G.k, dtype=np.int64)
    src = Q.coordinates(gens)  # (k, |Q basis|)
    zmods = np.array(Z.factors, dtype=np.int64)
    out = np.empty((mats.shape[0], G.k, G.k), dtype=np.int64)
    for i in range(G.k):
        zc = np.einsum("s,nst->nt", src[i], mats) % zmods
        f = Z.element(zc)
        out[:, i] = G.mul(np.broadcast_to(gens[i], f.shape), f)
    return out[0] if single else out


def make_central_aut(an: Analysis, matrix) -> CentralAutomorphism:
    """Central automorphism of a hom matrix, with relation and bijectivity checks."""
    an.require_purely_non_abelian()
    matrix = np.asarray(matrix, dtype=np.int64)
    Q, Z = an.abelianization, an.center_invariants
    if not is_hom_matrix(matrix, Q.factors, Z.factors):
        raise ValueError("matrix is not a homomorphism G/G' -> Z(G)")
    images = central_images(an, matrix)
    if not is_automorphism(an.G, an.frattini_quotient, images):
        raise AssertionError("constructed central map is not an automorphism")
    if not is_central(an.G, an.S, images):
        raise AssertionError("constructed map is not central")
    return CentralAutomorphism(matrix, images)


def basis_automorphisms(an: Analysis) -> list[CentralAutomorphism]:
    out = []
    for b in an.hom_basis.blocks:
        out.append(make_central_aut(an, np.array(b.matrix)))
    return out


@dataclass
class CommutationResult:
    abelian: bool
    pairs_checked: int
    witness: dict | None = None

    def to_dict(self) -> dict:
        return {"abelian": self.abelian, "pairs_checked": self.pairs_checked, "witness": self.witness}


def commutation_check(an: Analysis, auts: list[CentralAutomorphism] | None = None) -> CommutationResult:
    """Compose every pair of basis central automorphisms both ways."""
    auts = basis_automorphisms(an) if auts is None else auts
    G = an.G
    n = 0
    for (i, a), (j, b) in itertools.combinations(enumerate(auts), 2):
        n += 1
        ab = compose(G, a.images, b.images)
        ba = compose(G, b.images, a.images)
        diff = np.flatnonzero((ab != ba).any(axis=1))
        if diff.size:
            g = int(diff[0])
            blocks = an.hom_basis.blocks
            return CommutationResult(False, n, {
                "first": _block_label(blocks[i]),
                "second": _block_label(blocks[j]),
                "generator": g + 1,
                "first_then_second": list(map(int, ba[g])),
                "second_then_first": list(map(int, ab[g])),
            })
    return CommutationResult(True, n)


def _block_label(b) -> dict:
    return {"source_factor": b.source + 1, "target_factor": b.target + 1, "order": b.order}


# ---------------------------------------------------------------------------
# Adney-Yen criterion


@dataclass
class AdneyYenReport:
    a: int
    b: int
    c: int
    d: int
    R: SubgroupData = field(repr=False)
    K: SubgroupData = field(repr=False)
    r_equals_k: bool
    cond_ii: bool
    cond_ii_reason: str
    quotient_invariants: tuple[int, ...]
    witness: tuple[int, ...] | None = None

    @property
    def abelian(self) -> bool:
        return self.r_equals_k and self.cond_ii

    def to_dict(self) -> dict:
        return {
            "a": self.a, "b": self.b, "c": self.c, "d": self.d,
            "R_order": self.R.order, "K_order": self.K.order,
            "R_equals_K": self.r_equals_k,
            "condition_ii": self.cond_ii,
            "condition_ii_reason": self.cond_ii_reason,
            "R_mod_derived": list(self.quotient_invariants),
            "witness": None if self.witness is None else list(self.witness),
            "abelian": self.abelian,
        }


def _log(n: int, p: int) -> int:
    k = 0
    while n > 1:
        n //= p
        k += 1
    return k


def adney_yen(an: Analysis) -> AdneyYenReport:
    """Evaluate the abelian-Autcent criterion from computed subgroups.

    Condition (ii) depends on a chosen decomposition of ``G/G'``; it is decided
    existentially over all elements of maximal order in ``G/G'`` (each such
    element begins some basis) and the witness is recorded.
    """
    an.require_purely_non_abelian()
    G, S, p = an.G, an.S, an.G.p
    Z, D = S.center, S.derived
    if not D.issubset(Z) or D.order == 1:
        raise PreconditionError("criterion needs nilpotency class exactly 2")
    a = _log(an.center_invariants.exponent, p)
    b = _log(D.exponent(), p)
    c = _log(an.abelianization.exponent, p)
    d = min(a, c)

    zels = Z.elements
    small = G.element_order(zels) <= p**d
    mask = np.zeros(G.order, dtype=bool)
    mask[Z.indices[small]] = True
    R = closure(G, zels[small])
    if not np.array_equal(R.mask, mask):
        raise AssertionError("R is not a subgroup")

    K = product_subgroup(S.agemo(b), D)
    # K again from its height definition
    Q = an.abelianization
    hts = heights(Q, S.all_elements)
    if not np.array_equal(hts >= b, K.mask):
        raise AssertionError("K from heights disagrees with G^(p^b) G'")

    r_eq_k = R == K
    RD = decompose(AbelianSection(G, R, D))
    witness = None
    if d == b:
        cond, reason = True, "d = b"
    elif d < b:
        cond, reason = False, "d < b"
    elif len(RD.factors) > 1:
        cond, reason = False, f"d > b and R/G' is not cyclic: {list(RD.factors)}"
    else:
        section = AbelianSection(G, S.whole, D)
        reps = section.reps(section.codes)
        top = Q.exponent
        qord = np.array([_quotient_order(section, r) for r in reps])
        target = set(np.unique(AbelianSection(G, R, D).codes).tolist())
        cond, reason = False, "d > b and no maximal-order element has p^b-th power generating R/G'"
        for r in reps[qord == top]:
            cyc = _cyclic_codes(section, G.pow(r, p**b))
            if cyc == target:
                witness = tuple(int(v) for v in section.reps([section.code(r)])[0])
                cond, reason = True, "d > b and R/G' = <y^(p^b) G'> for a maximal-order y"
                break
    return AdneyYenReport(a, b, c, d, R, K, r_eq_k, cond, reason, RD.factors, witness)


def _quotient_order(section: AbelianSection, g) -> int:
    G = section.G
    ident = int(section.code(G.identity()))
    q = 1
    while int(section.code(g)) != ident:
        g = G.pow(g, G.p)
        q *= G.p
    return q


def _cyclic_codes(section: AbelianSection, g) -> set[int]:
    G = section.G
    out = set()
    cur = G.identity()
    while True:
        code = int(section.code(cur))
        if code in out:
            return out
        out.add(code)
        cur = G.mul(cur, g)
