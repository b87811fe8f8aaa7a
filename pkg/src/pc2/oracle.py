"""Independent arithmetic oracle for small groups.

The group is rebuilt from its relators alone by coset enumeration over the
trivial subgroup (Hasselgrove-Leech-Trotter with coincidence processing).
The resulting regular permutation action gives a Cayley table that never
touches the collection code, so it can be used to check the engine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .group import Group
from .presentation import PcPresentation

# letters: 2*i is x_i, 2*i + 1 is x_i^-1


def _inv(letter: int) -> int:
    return letter ^ 1


def _power(i: int, e: int) -> list[int]:
    return [2 * i] * e if e >= 0 else [2 * i + 1] * (-e)


def relators(pres: PcPresentation) -> list[list[int]]:
    """Power relators ``x_i^(m_i)`` and ``[x_l, x_j] w^-1`` as letter lists."""
    rels = []
    for i, m in enumerate(pres.moduli):
        rels.append(_power(i, m))
    for l in range(pres.ngens):
        for j in range(l):
            w = pres.commutator_value(l, j)
            word = [2 * l + 1, 2 * j + 1, 2 * l, 2 * j]
            for m in reversed(range(pres.ngens)):
                word += _power(m, -w[m]) if w[m] else []
            rels.append(word)
    return rels


class CosetTable:
    def __init__(self, ngens: int, max_cosets: int):
        self.nl = 2 * ngens
        self.max = max_cosets
        self.table: list[list[int]] = [[-1] * self.nl]
        self.parent = [0]  # union-find for coincidences
        self.live = [True]

    def new(self) -> int:
        if len(self.table) >= self.max:
            raise RuntimeError("coset enumeration exceeded its limit")
        self.table.append([-1] * self.nl)
        self.parent.append(len(self.parent))
        self.live.append(True)
        return len(self.table) - 1

    def rep(self, c: int) -> int:
        while self.parent[c] != c:
            self.parent[c] = self.parent[self.parent[c]]
            c = self.parent[c]
        return c

    def define(self, c: int, x: int) -> int:
        d = self.new()
        self.table[c][x] = d
        self.table[d][_inv(x)] = c
        return d

    def coincidence(self, a: int, b: int) -> None:
        queue = [(a, b)]
        while queue:
            a, b = queue.pop()
            a, b = self.rep(a), self.rep(b)
            if a == b:
                continue
            if a > b:
                a, b = b, a
            self.parent[b] = a
            self.live[b] = False
            for x in range(self.nl):
                d = self.table[b][x]
                if d < 0:
                    continue
                self.table[b][x] = -1
                if self.table[d][_inv(x)] == b:
                    self.table[d][_inv(x)] = -1
                ra, rd = self.rep(a), self.rep(d)
                e = self.table[ra][x]
                if e >= 0:
                    queue.append((e, rd))
                else:
                    self.table[ra][x] = rd
                f = self.table[rd][_inv(x)]
                if f >= 0:
                    queue.append((f, ra))
                else:
                    self.table[rd][_inv(x)] = ra

    def scan_and_fill(self, c: int, word: list[int]) -> None:
        n = len(word)
        while True:
            f, i = c, 0
            while i < n and self.table[f][word[i]] >= 0:
                f = self.table[f][word[i]]
                i += 1
            if i == n:
                if f != c:
                    self.coincidence(f, c)
                return
            b, j = c, n - 1
            while j >= i and self.table[b][_inv(word[j])] >= 0:
                b = self.table[b][_inv(word[j])]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if j == i:
                self.table[f][word[i]] = b
                self.table[b][_inv(word[i])] = f
                return
            self.define(f, word[i])


def enumerate_cosets(pres: PcPresentation, max_cosets: int = 200_000) -> np.ndarray:
    """Compressed coset table of the trivial subgroup, shape ``(|G|, 2k)``."""
    rels = relators(pres)
    T = CosetTable(pres.ngens, max_cosets)
    c = 0
    while c < len(T.table):
        if T.live[c]:
            for r in rels:
                if not T.live[c]:
                    break
                T.scan_and_fill(c, r)
            if T.live[c]:
                for x in range(T.nl):
                    if T.table[c][x] < 0:
                        T.define(c, x)
        c += 1
    live = [i for i in range(len(T.table)) if T.live[i]]
    renum = {old: new for new, old in enumerate(live)}
    out = np.array([[renum[T.rep(T.table[i][x])] for x in range(T.nl)] for i in live], dtype=np.int64)
    return out


@dataclass
class CayleyOracle:
    """Regular action on cosets plus a transversal of words from coset 0."""

    table: np.ndarray
    words: list[list[int]]

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def act(self, c, word: list[int]):
        c = np.asarray(c, dtype=np.int64)
        for x in word:
            c = self.table[c, x]
        return c


def build_oracle(pres: PcPresentation, max_cosets: int = 200_000) -> CayleyOracle:
    table = enumerate_cosets(pres, max_cosets)
    words: list[list[int] | None] = [None] * table.shape[0]
    words[0] = []
    frontier = [0]
    while frontier:
        nxt = []
        for c in frontier:
            for x in range(0, table.shape[1], 2):  # positive letters suffice in a finite group
                d = int(table[c, x])
                if words[d] is None:
                    words[d] = words[c] + [x]
                    nxt.append(d)
        frontier = nxt
    if any(w is None for w in words):
        raise AssertionError("coset table is not connected")
    return CayleyOracle(table, words)  # type: ignore[arg-type]


@dataclass
class OracleReport:
    order_matches: bool
    bijective: bool
    generator_actions: bool
    full_table: bool | None

    @property
    def ok(self) -> bool:
        return self.order_matches and self.bijective and self.generator_actions and self.full_table is not False


def compare_with_engine(G: Group, oracle: CayleyOracle | None = None, *, full_table: bool = True) -> OracleReport:
    """Match oracle cosets to engine elements and compare multiplication."""
    oracle = oracle or build_oracle(G.pres)
    n = oracle.order
    order_ok = n == G.order
    elems = np.array([G.word([(x // 2, 1) for x in w]) for w in oracle.words], dtype=np.int64)
    idx = G.index(elems)
    bij = order_ok and np.unique(idx).size == n
    if not bij:
        return OracleReport(order_ok, False, False, None)
    gen_ok = True
    for i in range(G.k):
        right = G.mul(elems, np.broadcast_to(G.gen(i), elems.shape))
        gen_ok &= bool(np.array_equal(G.index(right), idx[oracle.table[:, 2 * i]]))
    full = None
    if full_table:
        # a * b in the oracle: follow b's word from a's coset
        full = True
        cs = np.arange(n)
        for b in range(n):
            prod = oracle.act(cs, oracle.words[b])
            eng = G.mul(elems, np.broadcast_to(elems[b], elems.shape))
            if not np.array_equal(G.index(eng), idx[prod]):
                full = False
                break
    return OracleReport(order_ok, bool(bij), bool(gen_ok), full)
