"""Subgroup enumeration: closures, the standard characteristic subgroups, cosets."""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .group import Group
from .presentation import Element

DEFAULT_ELEMENT_BUDGET = 2_000_000


class BudgetExceeded(RuntimeError):
    pass


class NotASubgroup(RuntimeError):
    pass


def element_budget() -> int:
    """Enumeration budget, overridable through ``PC2_BUDGET``.

    ``PC2_BUDGET`` is either a bare integer or ``key=value`` pairs separated by
    commas; the ``elements`` key (or the bare integer) sets this budget.
    """
    return budgets().get("elements", DEFAULT_ELEMENT_BUDGET)


def budgets() -> dict[str, int]:
    raw = os.environ.get("PC2_BUDGET", "").strip()
    if not raw:
        return {}
    if raw.isdigit():
        return {"elements": int(raw)}
    out = {}
    for part in raw.split(","):
        key, _, value = part.partition("=")
        out[key.strip()] = int(float(value))
    return out


def check_budget(G: Group, budget: int | None = None) -> None:
    budget = element_budget() if budget is None else budget
    if G.order > budget:
        raise BudgetExceeded(f"|G| = {G.order} exceeds the enumeration budget {budget}")


@dataclass
class SubgroupData:
    group: Group
    generators: list[Element]
    mask: np.ndarray  # boolean over element indices

    @cached_property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @property
    def elements(self) -> np.ndarray:
        return self.group.element(self.indices)

    @property
    def order(self) -> int:
        return int(self.mask.sum())

    def contains(self, g) -> np.ndarray | bool:
        idx = self.group.index(g)
        out = self.mask[idx]
        return bool(out) if np.ndim(out) == 0 else out

    def __eq__(self, other) -> bool:
        return isinstance(other, SubgroupData) and np.array_equal(self.mask, other.mask)

    def issubset(self, other: "SubgroupData") -> bool:
        return bool(np.all(other.mask[self.mask]))

    def exponent(self) -> int:
        return int(self.group.element_order(self.elements).max())

    def is_elementary_abelian(self) -> bool:
        els = self.elements
        return self.exponent() <= self.group.p and _commute_all(self.group, els, _small_gens(self))


def _small_gens(H: SubgroupData) -> np.ndarray:
    return np.array(H.generators, dtype=np.int64).reshape(-1, H.group.k)


def _commute_all(G: Group, els: np.ndarray, gens: np.ndarray) -> bool:
    for g in gens:
        if G.comm(els, g).any():
            return False
    return True


def closure(G: Group, gens, *, budget: int | None = None) -> SubgroupData:
    """Subgroup generated by ``gens``, built by breadth-first multiplication."""
    gens = [tuple(int(v) for v in g) for g in np.asarray(gens, dtype=np.int64).reshape(-1, G.k)]
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    kept: list[Element] = []
    for g in gens:
        if mask[G.index(g)]:
            continue
        kept.append(g)
        mask = _extend(G, mask, kept, budget)
    return SubgroupData(G, kept, mask)


def _extend(G: Group, mask: np.ndarray, gens: list[Element], budget) -> np.ndarray:
    budget = element_budget() if budget is None else budget
    frontier = np.flatnonzero(mask)
    garr = np.array(gens, dtype=np.int64)
    while frontier.size:
        els = G.element(frontier)
        new = []
        for g in garr:
            idx = G.index(G.mul(els, np.broadcast_to(g, els.shape)))
            new.append(idx)
        new = np.unique(np.concatenate(new))
        new = new[~mask[new]]
        mask[new] = True
        if mask.sum() > budget:
            raise BudgetExceeded(f"subgroup closure exceeded budget {budget}")
        frontier = new
    return mask


def closure_of_set(G: Group, elements, *, budget: int | None = None) -> SubgroupData:
    """Closure of a (possibly large) set, choosing generators greedily."""
    els = np.asarray(elements, dtype=np.int64).reshape(-1, G.k)
    idx = np.unique(G.index(els))
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    kept: list[Element] = []
    for i in idx:
        if mask[i]:
            continue
        kept.append(G.element(int(i)))
        mask = _extend(G, mask, kept, budget)
    return SubgroupData(G, kept, mask)


def product_subgroup(A: SubgroupData, B: SubgroupData) -> SubgroupData:
    return closure(A.group, list(A.generators) + list(B.generators))


class StandardSubgroups:
    """Centre, derived and Frattini subgroups, agemo and omega layers."""

    def __init__(self, G: Group, *, budget: int | None = None):
        check_budget(G, budget)
        self.G = G
        self.budget = budget
        self._agemo: dict[int, SubgroupData] = {}
        self._omega: dict[int, SubgroupData] = {}

    @cached_property
    def all_elements(self) -> np.ndarray:
        return self.G.elements()

    @cached_property
    def element_orders(self) -> np.ndarray:
        return self.G.element_order(self.all_elements)

    @cached_property
    def whole(self) -> SubgroupData:
        return SubgroupData(self.G, [self.G.gen(i) for i in range(self.G.k)], np.ones(self.G.order, bool))

    @cached_property
    def trivial(self) -> SubgroupData:
        mask = np.zeros(self.G.order, bool)
        mask[0] = True
        return SubgroupData(self.G, [], mask)

    @cached_property
    def center(self) -> SubgroupData:
        G, els = self.G, self.all_elements
        mask = np.ones(G.order, dtype=bool)
        for i in range(G.k):
            mask &= ~G.comm(els, np.broadcast_to(G.gen(i), els.shape)).any(axis=1)
        return _as_subgroup(G, mask, self.budget)

    @cached_property
    def derived(self) -> SubgroupData:
        values = list(self.G.pres.comm.values()) or [self.G.identity()]
        return closure(self.G, values, budget=self.budget)

    @cached_property
    def frattini(self) -> SubgroupData:
        return product_subgroup(self.derived, self.agemo(1))

    def agemo(self, k: int) -> SubgroupData:
        """``G^(p^k)``: generated by all ``p^k``-th powers."""
        if k not in self._agemo:
            powers = self.G.pow(self.all_elements, self.G.p**k)
            self._agemo[k] = closure_of_set(self.G, powers, budget=self.budget)
        return self._agemo[k]

    def omega(self, k: int) -> SubgroupData:
        """``G_(p^k)``: elements of order dividing ``p^k``; must be closed."""
        if k not in self._omega:
            mask = self.element_orders <= self.G.p**k
            self._omega[k] = _as_subgroup(self.G, mask, self.budget)
        return self._omega[k]

    @property
    def max_level(self) -> int:
        return max(self.G.pres.orders)

    def characteristic_series(self) -> dict[str, SubgroupData]:
        """Named characteristic subgroups used as automorphism invariants."""
        out = {"center": self.center, "derived": self.derived, "frattini": self.frattini}
        for k in range(1, self.max_level + 1):
            out[f"omega{k}"] = self.omega(k)
            out[f"agemo{k}"] = self.agemo(k)
        return out


def _as_subgroup(G: Group, mask: np.ndarray, budget) -> SubgroupData:
    """Wrap a subset as :class:`SubgroupData`, verifying closure."""
    H = closure_of_set(G, G.element(np.flatnonzero(mask)), budget=budget)
    if not np.array_equal(H.mask, mask):
        raise NotASubgroup(
            f"set of {int(mask.sum())} elements is not closed (closure has {H.order})"
        )
    return H


def standard_subgroups(G: Group, *, budget: int | None = None) -> StandardSubgroups:
    return StandardSubgroups(G, budget=budget)


# ---------------------------------------------------------------------------
# cosets of a normal subgroup


def coset_labels(G: Group, N: SubgroupData) -> np.ndarray:
    """Map each element index to the least index in its coset ``gN``."""
    els = G.element(np.arange(G.order))
    labels = np.arange(G.order, dtype=np.int64)
    perms = [G.index(G.mul(els, np.broadcast_to(n, els.shape))) for n in N.generators]
    while True:
        new = labels
        for perm in perms:
            new = np.minimum(new, labels[perm])
            new = np.minimum(new, new[perm])
        if np.array_equal(new, labels):
            return labels
        labels = new
