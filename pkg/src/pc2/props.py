"""Coefficient matrices of automorphisms and the congruence systems they satisfy.

For an automorphism ``alpha`` write ``alpha(x_i) = x_i prod_j x_j^(a_ij)``.
The congruences below are stored as data: each is a list of signed
monomials in the ``a_ij`` together with a mode saying whether the sum must
vanish or must not vanish modulo ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .group import Group
from .maps import FrattiniQuotient, is_automorphism
from .subgroups import StandardSubgroups

# a monomial is (coefficient, ((i, j), ...)) with 1-based indices; () is the constant 1
Monomial = tuple[int, tuple[tuple[int, int], ...]]


@dataclass(frozen=True)
class Congruence:
    name: str
    terms: tuple[Monomial, ...]
    vanishes: bool = True  # False means "not congruent to 0"

    def evaluate(self, a: np.ndarray, p: int) -> np.ndarray:
        """Verdicts for a batch ``a`` of shape ``(N, 4, 4)`` (or a single matrix)."""
        a = np.asarray(a, dtype=np.int64) % p
        single = a.ndim == 2
        A = a[None] if single else a
        total = np.zeros(A.shape[0], dtype=np.int64)
        for coef, factors in self.terms:
            t = np.full(A.shape[0], coef % p, dtype=np.int64)
            for i, j in factors:
                t = t * A[:, i - 1, j - 1] % p
            total = (total + t) % p
        ok = (total == 0) if self.vanishes else (total != 0)
        return bool(ok[0]) if single else ok


def _v(*cells: tuple[int, int]) -> Monomial:
    return (1, cells)


def _neg(*cells: tuple[int, int]) -> Monomial:
    return (-1, cells)


ONE: Monomial = (1, ())

FAMILY_A_SYSTEM = (
    Congruence("e1[a41]", (_v((4, 1)),)),
    Congruence("e1[a42]", (_v((4, 2)),)),
    Congruence("e1[a43]", (_v((4, 3)),)),
    Congruence("e2", (_v((2, 1)),)),
    Congruence("e3", (_v((1, 1)), _v((1, 1), (2, 2)), _neg((1, 4)), _v((1, 2), (2, 4)), _neg((1, 4), (2, 2)))),
    Congruence("e4", (_v((1, 1), (2, 3)), _v((2, 4)), _v((1, 1), (2, 4)))),
    Congruence("e5", (_v((3, 1)),)),
    Congruence("e7", (_v((1, 1)), _v((1, 1), (3, 3)), _v((3, 4)), _v((1, 1), (3, 4)))),
    Congruence("e8", (_v((1, 2)), _neg((3, 2)), _v((1, 2), (4, 4)))),
    Congruence("e9", (_v((4, 4)), _neg((3, 3)), _v((1, 1)), _v((1, 1), (4, 4)))),
    Congruence("e10", (_v((3, 3)), _v((2, 2)), _v((2, 2), (3, 3)), _neg((2, 3), (3, 2)), _neg((1, 1)))),
    Congruence("e11", (_v((3, 4)), _v((2, 2), (3, 4)), _neg((2, 4), (3, 2)))),
    Congruence("e12", (_v((4, 4)), _v((2, 2), (4, 4)))),
    Congruence("e13", (_v((2, 3)),)),
    Congruence("e14", (_v((3, 2)), _v((3, 2), (4, 4)))),
)

FAMILY_B_SYSTEM = (
    Congruence("f1[a31]", (_v((3, 1)),)),
    Congruence("f1[a32]", (_v((3, 2)),)),
    Congruence("f1[a41]", (_v((4, 1)),)),
    Congruence("f1[a42]", (_v((4, 2)),)),
    Congruence("f2", (_v((4, 3)),)),
    Congruence("f3", (ONE, _v((4, 4))), vanishes=False),
    Congruence("f4", (_v((3, 3)),)),
    Congruence("f5", (_v((2, 1)),)),
    Congruence("f6", (_v((4, 4)), _v((4, 4), (2, 2)))),
    Congruence("f7", (_v((2, 3)),)),
    Congruence("f8", (_v((2, 2)), _neg((1, 1)))),
    Congruence("f9", (_v((2, 4)),)),
    Congruence("f10", (_v((1, 1)),)),
    Congruence("f11", (_v((1, 3), (3, 4)), _neg((1, 4)))),
    Congruence("f12", (_v((1, 3)),)),
)


def _label(name: str) -> str:
    return name.split("[", 1)[0]


def labels(system) -> list[str]:
    out: list[str] = []
    for c in system:
        if _label(c.name) not in out:
            out.append(_label(c.name))
    return out


def evaluate_system(system, a, p: int) -> dict[str, np.ndarray | bool]:
    """Per-label verdicts; sub-items of a label are combined with ``and``."""
    out: dict = {}
    for c in system:
        v = c.evaluate(a, p)
        key = _label(c.name)
        out[key] = v if key not in out else (out[key] & v)
    return out


def check_prop1(a, p: int) -> dict:
    return evaluate_system(FAMILY_A_SYSTEM, a, p)


def check_prop2(a, p: int) -> dict:
    return evaluate_system(FAMILY_B_SYSTEM, a, p)


def conclusion_check(a, p: int, family: str | None = None) -> np.ndarray | bool:
    """Every ``a_ij`` divisible by ``p``."""
    a = np.asarray(a, dtype=np.int64)
    ok = ~(a % p).any(axis=(-2, -1))
    return bool(ok) if a.ndim == 2 else ok


@dataclass
class CoeffMatrix:
    a: np.ndarray  # full residues, shape (..., k, k)
    p: int

    @property
    def mod_p(self) -> np.ndarray:
        return self.a % self.p


def extract_coeffs(G: Group, images, *, check: tuple[FrattiniQuotient, StandardSubgroups] | None = None) -> CoeffMatrix:
    """``a_ij`` = exponent of ``x_j`` in ``x_i^-1 alpha(x_i)`` (batched over images)."""
    images = np.asarray(images, dtype=np.int64)
    if check is not None:
        ok = np.all(is_automorphism(G, check[0], images))
        if not ok:
            raise ValueError("input is not an automorphism")
    a = np.empty(images.shape, dtype=np.int64)
    for i in range(G.k):
        a[..., i, :] = G.mul(np.broadcast_to(G.inv(G.gen(i)), images[..., i, :].shape), images[..., i, :])
    return CoeffMatrix(a, G.p)


def rebuild(G: Group, coeffs: CoeffMatrix) -> np.ndarray:
    """Generator images ``x_i prod_j x_j^(a_ij)``."""
    a = np.asarray(coeffs.a, dtype=np.int64)
    out = np.empty(a.shape, dtype=np.int64)
    for i in range(G.k):
        out[..., i, :] = G.mul(np.broadcast_to(G.gen(i), a[..., i, :].shape), a[..., i, :])
    return out


@dataclass
class PropSummary:
    system: str
    checked: int
    violations: list[dict]
    counts: dict[str, int]  # label -> number of automorphisms where it holds
    violation_count: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "checked": self.checked,
            "holds": dict(self.counts),
            "violationCount": self.violation_count,
            "violations": self.violations,
        }


def scan(G: Group, image_batches, system, name: str, *, max_reported: int = 20) -> PropSummary:
    """Evaluate ``system`` (plus the divisibility conclusion) on a stream of image batches."""
    keys = labels(system) + ["conclusion"]
    counts = {k: 0 for k in keys}
    violations: list[dict] = []
    checked = nbad = 0
    for imgs in image_batches:
        co = extract_coeffs(G, imgs)
        verdicts = evaluate_system(system, co.a, G.p)
        verdicts["conclusion"] = conclusion_check(co.a, G.p)
        bad = np.zeros(len(imgs), dtype=bool)
        for k in keys:
            counts[k] += int(verdicts[k].sum())
            bad |= ~verdicts[k]
        nbad += int(bad.sum())
        for idx in np.flatnonzero(bad)[: max(0, max_reported - len(violations))]:
            violations.append({
                "automorphism": (np.asarray(imgs[idx]).tolist()),
                "failed": [k for k in keys if not verdicts[k][idx]],
            })
        checked += len(imgs)
    return PropSummary(name, checked, violations, counts, nbad)
