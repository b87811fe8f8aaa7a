"""Class-2 power-commutator presentations and their JSON file format.

A presentation is a prime ``p``, generator orders ``p**e_i`` and a table of
commutator values ``[x_i, x_j]`` for ``i > j``.  Indices are 0-based in the
API and 1-based in the JSON file, matching the usual ``x_1 .. x_k`` naming.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

Element = tuple[int, ...]
Pair = tuple[int, int]


class PresentationError(ValueError):
    """Raised for malformed or unsupported presentations."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PcPresentation:
    p: int
    orders: tuple[int, ...]
    comm: Mapping[Pair, Element] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(int(e) for e in self.orders))
        k = len(self.orders)
        if k == 0:
            raise PresentationError("presentation needs at least one generator")
        table = {}
        for (i, j), value in self.comm.items():
            if not (0 <= j < i < k):
                raise PresentationError(f"commutator pair ({i}, {j}) must satisfy 0 <= j < i < {k}")
            value = tuple(int(v) for v in value)
            if len(value) != k:
                raise PresentationError(f"value of [x_{i + 1}, x_{j + 1}] has length {len(value)}, expected {k}")
            for v, m in zip(value, self.moduli):
                if not 0 <= v < m:
                    raise PresentationError(
                        f"value of [x_{i + 1}, x_{j + 1}] is not reduced: {value}"
                    )
            if any(value):
                table[(i, j)] = value
        object.__setattr__(self, "comm", dict(sorted(table.items())))

    @property
    def ngens(self) -> int:
        return len(self.orders)

    @property
    def moduli(self) -> tuple[int, ...]:
        return tuple(self.p**e for e in self.orders)

    @property
    def order(self) -> int:
        """The order the presentation claims, ``prod p**e_i``."""
        out = 1
        for m in self.moduli:
            out *= m
        return out

    def identity(self) -> Element:
        return (0,) * self.ngens

    def gen(self, i: int, power: int = 1) -> Element:
        exps = [0] * self.ngens
        exps[i] = power % self.moduli[i]
        return tuple(exps)

    def commutator_value(self, i: int, j: int) -> Element:
        """Stored value of ``[x_i, x_j]`` for ``i > j`` (identity if absent)."""
        return self.comm.get((i, j), self.identity())

    # -- file format ----------------------------------------------------

    def to_dict(self) -> dict:
        out = {
            "p": self.p,
            "orders": list(self.orders),
            "comm": [
                {"i": i + 1, "j": j + 1, "value": list(v)} for (i, j), v in self.comm.items()
            ],
        }
        if self.name:
            out["name"] = self.name
        return out

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "PcPresentation":
        try:
            p = int(data["p"])
            orders = [int(e) for e in data["orders"]]
            entries = list(data.get("comm", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise PresentationError(f"bad presentation document: {exc}") from exc
        rels = []
        for entry in entries:
            i, j = int(entry["i"]) - 1, int(entry["j"]) - 1
            rels.append((i, j, [int(v) for v in entry["value"]]))
        return from_relations(p, orders, rels, name=str(data.get("name", "")))

    @classmethod
    def from_json(cls, text: str) -> "PcPresentation":
        return cls.from_dict(json.loads(text))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "PcPresentation":
        return cls.from_json(Path(path).read_text())


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def from_relations(
    p: int,
    orders: Sequence[int],
    relations: Iterable[tuple[int, int, Sequence[int]]],
    name: str = "",
) -> PcPresentation:
    """Build a presentation from ``(i, j, value)`` meaning ``[x_i, x_j] = value``.

    Pairs with ``i < j`` are stored as ``[x_j, x_i] = value**-1``.  Only values
    whose support is a single generator can be inverted before the arithmetic
    exists; anything else must be given in the ``i > j`` orientation.
    """
    orders = list(orders)
    moduli = [p**e for e in orders]
    k = len(orders)
    table: dict[Pair, Element] = {}
    for i, j, value in relations:
        i, j = int(i), int(j)
        value = [int(v) % m for v, m in zip(value, moduli)]
        if len(value) != k:
            raise PresentationError(f"value of [x_{i + 1}, x_{j + 1}] has wrong length")
        if i == j:
            if any(value):
                raise PresentationError(f"[x_{i + 1}, x_{i + 1}] must be trivial")
            continue
        if i < j:
            support = [t for t, v in enumerate(value) if v]
            if len(support) > 1:
                raise PresentationError(
                    f"give [x_{j + 1}, x_{i + 1}] directly: cannot invert a multi-generator value"
                )
            value = [(-v) % m for v, m in zip(value, moduli)]
            i, j = j, i
        if (i, j) in table and table[(i, j)] != tuple(value):
            raise PresentationError(f"conflicting values for [x_{i + 1}, x_{j + 1}]")
        table[(i, j)] = tuple(value)
    return PcPresentation(p=p, orders=tuple(orders), comm=table, name=name)
