"""The two four-generator families and their structural report."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .group import Group
from .presentation import PcPresentation, PresentationError, from_relations, is_prime
from .subgroups import StandardSubgroups, standard_subgroups

FAMILIES = ("A", "B")


@dataclass(frozen=True)
class FamilyParams:
    family: str
    p: int
    n: int

    def __post_init__(self):
        fam = self.family.upper()
        object.__setattr__(self, "family", fam)
        if fam not in FAMILIES:
            raise PresentationError(f"unknown family {self.family!r}; expected A or B")
        if self.p == 2:
            raise PresentationError("p must be odd (both families are defined for odd primes only)")
        if not is_prime(self.p):
            raise PresentationError(f"p = {self.p} is not prime")
        if self.n < 3:
            raise PresentationError(f"n = {self.n} must be at least 3 (a natural number greater than 2)")

    @property
    def log_order(self) -> int:
        return self.n + (5 if self.family == "A" else 7)


def build(params: FamilyParams | str, p: int | None = None, n: int | None = None) -> PcPresentation:
    if not isinstance(params, FamilyParams):
        params = FamilyParams(params, p, n)
    p, n = params.p, params.n

    def x(i, e):
        v = [0, 0, 0, 0]
        v[i] = p**e
        return v

    if params.family == "A":
        orders = [n, 2, 2, 1]
        rels = [
            (0, 1, x(1, 1)),
            (0, 2, x(2, 1)),
            (0, 3, x(2, 1)),
            (1, 2, x(0, n - 1)),
            (1, 3, x(1, 1)),
            (2, 3, [0, 0, 0, 0]),
        ]
    else:
        orders = [n, 3, 2, 2]
        rels = [
            (0, 1, x(1, 2)),
            (0, 2, x(2, 1)),
            (0, 3, x(3, 1)),
            (1, 2, x(0, n - 1)),
            (1, 3, x(1, 2)),
            (2, 3, x(3, 1)),
        ]
    return from_relations(p, orders, rels, name=f"{params.family}({p},{n})")


@dataclass
class StructuralReport:
    order: int
    log_order: int
    nilpotency_class: int
    exponent: int
    exponent_method: str
    center_order: int
    derived_order: int
    frattini_order: int
    center_equals_frattini: bool
    center_in_frattini: bool
    purely_non_abelian: bool
    derived_elementary_abelian: bool
    special: bool
    rank: int

    def to_dict(self) -> dict:
        return asdict(self)


def exponent_of(G: Group, S: StandardSubgroups | None = None, *, census_limit: int = 10**6,
                samples: int = 4000, seed: int = 0) -> tuple[int, str]:
    """Exponent as the largest generator order, cross-checked against element orders.

    Every element order is computed when ``|G| <= census_limit``; otherwise a
    random sample is checked.  A counterexample raises ``AssertionError``.
    """
    expo = max(G.element_order(G.gen(i)) for i in range(G.k))
    if G.order <= census_limit:
        orders = S.element_orders if S is not None else G.element_order(G.elements())
        observed, method = int(orders.max()), "census"
    else:
        rng = np.random.default_rng(seed)
        observed, method = int(G.element_order(G.random_elements(rng, samples)).max()), "sampled"
    if observed > expo or (method == "census" and observed != expo):
        raise AssertionError(f"exponent mismatch: generators give {expo}, elements give {observed}")
    return expo, method


def structural_report(G: Group, S: StandardSubgroups | None = None) -> StructuralReport:
    S = S or standard_subgroups(G)
    Z, D, F = S.center, S.derived, S.frattini
    if D.order == 1:
        cls = 1
    elif D.issubset(Z):
        cls = 2
    else:
        raise AssertionError("derived subgroup is not central")
    expo, method = exponent_of(G, S)
    p = G.p
    rank = _log(G.order // F.order, p)
    elem = D.is_elementary_abelian()
    special = cls == 2 and Z == D and D == F and elem
    return StructuralReport(
        order=G.order,
        log_order=_log(G.order, p),
        nilpotency_class=cls,
        exponent=expo,
        exponent_method=method,
        center_order=Z.order,
        derived_order=D.order,
        frattini_order=F.order,
        center_equals_frattini=Z == F,
        center_in_frattini=Z.issubset(F),
        purely_non_abelian=Z.issubset(F),
        derived_elementary_abelian=elem,
        special=special,
        rank=rank,
    )


def _log(n: int, p: int) -> int:
    k = 0
    while n > 1:
        if n % p:
            raise ValueError(f"{n} is not a power of {p}")
        n //= p
        k += 1
    return k
