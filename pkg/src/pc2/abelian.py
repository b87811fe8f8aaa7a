"""Abelian sections of a class-2 group: invariant factors, bases, Hom groups.

A section is ``H/N`` for subgroups ``N <= H`` with abelian quotient.  Its
elements are identified by coset labels (least element index in the coset),
so every operation reduces to group arithmetic followed by a label lookup.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .group import Group
from .presentation import Element
from .subgroups import StandardSubgroups, SubgroupData, coset_labels

INFINITE_HEIGHT = math.inf


class NotAbelian(ValueError):
    pass


class AbelianSection:
    def __init__(self, G: Group, H: SubgroupData, N: SubgroupData | None = None):
        self.G = G
        self.H = H
        self.N = N
        if N is None:
            self.labels = np.arange(G.order, dtype=np.int64)
        else:
            if not N.issubset(H):
                raise ValueError("N must be contained in H")
            self.labels = coset_labels(G, N)
        self.codes = np.unique(self.labels[H.indices])
        self.order = int(self.codes.size)

    def code(self, g) -> np.ndarray:
        return self.labels[self.G.index(g)]

    def reps(self, codes) -> np.ndarray:
        return self.G.element(np.asarray(codes, dtype=np.int64))

    def check_abelian(self) -> None:
        gens = list(self.H.generators)
        for a, b in itertools.combinations(gens, 2):
            if self.code(self.G.comm(a, b)) != self.code(self.G.identity()):
                raise NotAbelian(f"generators {a} and {b} do not commute in the section")


@dataclass
class AbelianInvariants:
    p: int
    factors: tuple[int, ...]
    basis: list[Element] = field(default_factory=list)
    section: AbelianSection | None = field(default=None, repr=False, compare=False)
    coords: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(_vp(f, self.p) for f in self.factors)

    @property
    def exponent(self) -> int:
        return max(self.factors, default=1)

    def coordinates(self, g) -> np.ndarray:
        """Basis coordinates of (the coset of) ``g``; ``-1`` rows for non-members."""
        return self.coords[self.section.code(g)]

    def element(self, coords) -> np.ndarray:
        """Group element ``prod basis_i^coords_i`` (a representative)."""
        G = self.section.G
        coords = np.atleast_2d(np.asarray(coords, dtype=np.int64))
        out = np.zeros((coords.shape[0], G.k), dtype=np.int64)
        for b, c in zip(self.basis, coords.T):
            out = G.mul(out, G.pow(np.broadcast_to(b, out.shape), c))
        return out


def _vp(n: int, p: int) -> int:
    k = 0
    while n % p == 0 and n > 1:
        n //= p
        k += 1
    return k


def decompose(section: AbelianSection) -> AbelianInvariants:
    """Greedy invariant-factor decomposition with a certified basis.

    Repeatedly picks an element of maximal order modulo the span of the basis
    found so far, corrects it so its order equals that quotient order, and
    adjoins it.  The span is enumerated as it grows, so independence is
    certified by the absence of collisions.
    """
    section.check_abelian()
    G, p = section.G, section.G.p
    in_span = np.zeros(G.order, dtype=bool)
    ident = int(section.code(G.identity()))
    in_span[ident] = True
    span_codes = np.array([ident], dtype=np.int64)
    span_coords = np.zeros((1, 0), dtype=np.int64)
    basis: list[Element] = []
    factors: list[int] = []
    reps = section.reps(section.codes)

    while span_codes.size < section.order:
        # quotient order of every element modulo the current span
        cur = reps.copy()
        qord = np.zeros(len(reps), dtype=np.int64)
        live = ~in_span[section.code(cur)]
        f = 0
        while live.any():
            f += 1
            qord[live] = f
            cur = G.pow(cur, p)
            live &= ~in_span[section.code(cur)]
        pick = int(np.argmax(qord))
        f = int(qord[pick])
        a = reps[pick]
        pf = p**f
        h = G.pow(a, pf)
        c = _span_coords(span_codes, span_coords, int(section.code(h)))
        for ci, fi in zip(c, factors):
            if ci % pf:
                raise AssertionError("greedy basis step failed: power not divisible")
        corr = a
        for b, ci, fi in zip(basis, c, factors):
            corr = G.mul(corr, G.pow(b, -(int(ci) // pf)))
        if int(section.code(G.pow(corr, pf))) != ident:
            raise AssertionError("corrected basis element has the wrong order")

        new_codes, new_coords = [span_codes], [np.hstack([span_coords, np.zeros((len(span_codes), 1), np.int64)])]
        span_reps = section.reps(span_codes)
        step = corr
        for t in range(1, pf):
            moved = section.code(G.mul(span_reps, np.broadcast_to(step, span_reps.shape)))
            if in_span[moved].any():
                raise AssertionError("basis is not independent")
            in_span[moved] = True
            new_codes.append(moved)
            new_coords.append(np.hstack([span_coords, np.full((len(span_codes), 1), t, np.int64)]))
            step = G.mul(step, corr)
        span_codes = np.concatenate(new_codes)
        span_coords = np.vstack(new_coords)
        basis.append(tuple(int(v) for v in corr))
        factors.append(pf)

    coords = np.full((G.order, len(basis)), -1, dtype=np.int64)
    coords[span_codes] = span_coords
    inv = AbelianInvariants(p, tuple(factors), basis, section, coords)
    for b, fi in zip(basis, factors):
        if _section_order(section, b) != fi:
            raise AssertionError("basis element order changed")
    return inv


def _span_coords(codes: np.ndarray, coords: np.ndarray, code: int) -> np.ndarray:
    hit = np.flatnonzero(codes == code)
    return coords[int(hit[0])]


def _section_order(section: AbelianSection, g) -> int:
    G = section.G
    ident = int(section.code(G.identity()))
    q = 1
    while int(section.code(g)) != ident:
        g = G.pow(g, G.p)
        q *= G.p
    return q


def subgroup_invariants(G: Group, H: SubgroupData) -> AbelianInvariants:
    return decompose(AbelianSection(G, H))


def quotient_invariants(G: Group, N: SubgroupData, S: StandardSubgroups | None = None) -> AbelianInvariants:
    """Invariant factors of ``G/N`` for ``N`` containing the derived subgroup."""
    from .subgroups import standard_subgroups

    S = S or standard_subgroups(G)
    if not S.derived.issubset(N):
        raise NotAbelian("N does not contain the derived subgroup, so G/N is not abelian (or N not normal)")
    return decompose(AbelianSection(G, S.whole, N))


def height(inv: AbelianInvariants, x) -> float | int:
    """Largest ``k`` with ``xN`` in ``(G/N)^(p^k)``; :data:`INFINITE_HEIGHT` for the identity."""
    c = inv.coordinates(x)
    if (c < 0).any():
        raise ValueError("element is not in the section")
    if not c.any():
        return INFINITE_HEIGHT
    return min(_vp(int(v), inv.p) for v in c if v)


def heights(inv: AbelianInvariants, els) -> np.ndarray:
    """Batched :func:`height`, with ``inf`` for the identity coset."""
    c = inv.coordinates(els)
    out = np.full(c.shape[0], np.inf)
    v = 0
    rem = c.copy()
    while True:
        nz = rem != 0
        if not nz.any():
            break
        hit = nz.any(axis=1) & np.isinf(out)
        hit &= ((rem % inv.p != 0) & nz).any(axis=1)
        out[hit] = v
        rem = np.where(rem % inv.p == 0, rem // inv.p, 0)
        rem[hit] = 0
        v += 1
    return out


# ---------------------------------------------------------------------------
# Hom groups between abelian p-groups


def hom_count(A: AbelianInvariants | tuple, B: AbelianInvariants | tuple) -> int:
    fa = A.factors if isinstance(A, AbelianInvariants) else tuple(A)
    fb = B.factors if isinstance(B, AbelianInvariants) else tuple(B)
    out = 1
    for a in fa:
        for b in fb:
            out *= math.gcd(a, b)
    return out


@dataclass(frozen=True)
class HomBlock:
    source: int
    target: int
    order: int
    matrix: tuple[tuple[int, ...], ...]


@dataclass
class HomBasis:
    source: tuple[int, ...]
    target: tuple[int, ...]
    blocks: list[HomBlock]

    @property
    def count(self) -> int:
        return math.prod(b.order for b in self.blocks)

    def combine(self, coeffs) -> np.ndarray:
        """Matrix of ``sum coeffs[i] * blocks[i]`` reduced mod the target orders."""
        mat = np.zeros((len(self.source), len(self.target)), dtype=np.int64)
        for c, b in zip(coeffs, self.blocks):
            mat = mat + int(c) * np.array(b.matrix, dtype=np.int64)
        return mat % np.array(self.target, dtype=np.int64)

    def all_matrices(self):
        for coeffs in itertools.product(*(range(b.order) for b in self.blocks)):
            yield self.combine(coeffs)


def hom_basis(A: AbelianInvariants | tuple, B: AbelianInvariants | tuple) -> HomBasis:
    """One cyclic generator per factor pair, sending the source generator to
    the element of exact order ``gcd`` in the target factor."""
    fa = A.factors if isinstance(A, AbelianInvariants) else tuple(A)
    fb = B.factors if isinstance(B, AbelianInvariants) else tuple(B)
    blocks = []
    for i, a in enumerate(fa):
        for j, b in enumerate(fb):
            d = math.gcd(a, b)
            if d == 1:
                continue
            mat = [[0] * len(fb) for _ in fa]
            mat[i][j] = b // d
            blocks.append(HomBlock(i, j, d, tuple(tuple(r) for r in mat)))
    return HomBasis(tuple(fa), tuple(fb), blocks)


def is_hom_matrix(mat, source: tuple[int, ...], target: tuple[int, ...]) -> bool:
    mat = np.asarray(mat, dtype=np.int64)
    return bool(np.all((np.array(source)[:, None] * mat) % np.array(target)[None, :] == 0))
