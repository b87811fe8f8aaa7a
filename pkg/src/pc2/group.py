"""Exact arithmetic in class-2 groups given by a :class:`PcPresentation`.

Elements are exponent vectors in the normal form ``x_1^a_1 ... x_k^a_k``.
Every operation accepts either a single vector (shape ``(k,)``) or a stack of
them (shape ``(N, k)``) and returns the same shape, so subgroup enumeration
and automorphism censuses run as numpy batches over the same code path as
single-element arithmetic.

Collection uses the class-2 identities

    x^a * x^b = x^(a+b) * prod_{l>j} [x_l, x_j]^(a_l b_j)
    (x^a)^m   = x^(m a) * prod_{l>j} [x_l, x_j]^(C(m,2) a_l a_j)

with the central correction folded back into normal form recursively.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .presentation import Element, PcPresentation, PresentationError, is_prime

MAX_COLLECTION_DEPTH = 48
# Residues and their pairwise products must stay inside int64.
MAX_MODULUS = 2**31


class CollectionError(RuntimeError):
    """Collection did not reach a normal form (presentation is not class 2)."""


class Group:
    """Arithmetic and element indexing for one presentation."""

    def __init__(self, pres: PcPresentation, *, check_width: bool = True):
        if check_width and max(pres.moduli) >= MAX_MODULUS:
            raise PresentationError(
                f"generator modulus {max(pres.moduli)} overflows 64-bit residue arithmetic"
            )
        self.pres = pres
        self.p = pres.p
        self.k = pres.ngens
        self.order = pres.order
        self.mods = np.array(pres.moduli, dtype=np.int64)
        strides = np.ones(self.k, dtype=np.int64)
        for i in range(1, self.k):
            strides[i] = strides[i - 1] * self.mods[i - 1]
        self.strides = strides

        pairs = [(l, j) for l in range(self.k) for j in range(l)]
        self._L = np.array([l for l, _ in pairs], dtype=np.intp)
        self._J = np.array([j for _, j in pairs], dtype=np.intp)
        self._T = np.array(
            [pres.commutator_value(l, j) for l, j in pairs] or np.zeros((0, self.k)),
            dtype=np.int64,
        ).reshape(len(pairs), self.k)
        # [x_l, x_j]^q = 1 for q = p^min(e_l, e_j) on consistent input; refined below.
        self._q = np.array(
            [self.p ** min(pres.orders[l], pres.orders[j]) for l, j in pairs], dtype=np.int64
        )
        self._refresh_pairs()
        orders = [self._order_of_value(t) for t in range(len(pairs))]
        if all(q % o == 0 for q, o in zip(self._q, orders)):
            self._q = np.array(orders, dtype=np.int64)
            self._refresh_pairs()

    def _refresh_pairs(self):
        self._inv2 = np.array([pow(2, -1, int(q)) if q > 1 else 0 for q in self._q], dtype=np.int64)
        self._active = [t for t in range(len(self._q)) if self._q[t] > 1 and self._T[t].any()]

    def _order_of_value(self, t: int) -> int:
        val = self._T[t]
        if not val.any():
            return 1
        g = val[None, :]
        q = 1
        while q <= self._q[t]:
            if not g.any():
                return q
            g = self._pow(g, np.array([self.p]), 0)
            q *= self.p
        return int(self._q[t])

    # -- core batch kernels (2-D arrays) -------------------------------

    def _fold(self, s: np.ndarray, m: np.ndarray, depth: int) -> np.ndarray:
        """Normal form of ``x^s * prod_t T_t^(m_t)`` for a batch."""
        s = s % self.mods
        for t in self._active:
            e = m[:, t] % self._q[t]
            rows = np.nonzero(e)[0]
            if rows.size == 0:
                continue
            if depth > MAX_COLLECTION_DEPTH:
                raise CollectionError("collection did not terminate; is the presentation class 2?")
            w = self._pow(np.broadcast_to(self._T[t], (rows.size, self.k)), e[rows], depth + 1)
            s[rows] = self._mul(s[rows], w, depth + 1)
        return s

    def _mul(self, a: np.ndarray, b: np.ndarray, depth: int) -> np.ndarray:
        q = self._q
        m = (a[:, self._L] % q) * (b[:, self._J] % q) % q
        return self._fold(a + b, m, depth)

    def _pow(self, g: np.ndarray, m: np.ndarray, depth: int) -> np.ndarray:
        m = np.asarray(m, dtype=np.int64)
        s = (m[:, None] % self.mods) * g % self.mods
        q = self._q
        mm = m[:, None] % q
        binom = mm * ((mm - 1) % q) % q * self._inv2 % q
        corr = binom * (g[:, self._L] % q) % q * (g[:, self._J] % q) % q
        return self._fold(s, corr, depth)

    def _comm(self, g: np.ndarray, h: np.ndarray) -> np.ndarray:
        q = self._q
        m = ((g[:, self._L] % q) * (h[:, self._J] % q) - (g[:, self._J] % q) * (h[:, self._L] % q)) % q
        return self._fold(np.zeros_like(g), m, 0)

    # -- public API ----------------------------------------------------

    @staticmethod
    def _prep(*xs):
        arrs = [np.asarray(x, dtype=np.int64) for x in xs]
        single = all(a.ndim == 1 for a in arrs)
        arrs = [np.atleast_2d(a) for a in arrs]
        n = max(a.shape[0] for a in arrs)
        arrs = [np.broadcast_to(a, (n, a.shape[1])).copy() if a.shape[0] != n else a for a in arrs]
        return single, arrs

    @staticmethod
    def _out(single, arr):
        return tuple(int(v) for v in arr[0]) if single else arr

    def reduce(self, g):
        single, (g,) = self._prep(g)
        return self._out(single, g % self.mods)

    def identity(self) -> Element:
        return (0,) * self.k

    def gen(self, i: int, power: int = 1) -> Element:
        return self.pres.gen(i, power)

    def mul(self, a, b):
        single, (a, b) = self._prep(a, b)
        return self._out(single, self._mul(a % self.mods, b % self.mods, 0))

    def pow(self, g, m):
        single, (g,) = self._prep(g)
        m = np.asarray(m, dtype=np.int64)
        if m.ndim == 0:
            m = np.full(g.shape[0], int(m), dtype=np.int64)
        else:
            single = False
        if m.shape[0] != g.shape[0]:
            g = np.broadcast_to(g, (m.shape[0], self.k)).copy()
        return self._out(single, self._pow(g % self.mods, m, 0))

    def inv(self, g):
        return self.pow(g, -1)

    def comm(self, g, h):
        """``[g, h] = g^-1 h^-1 g h`` via bilinearity of the commutator table."""
        single, (g, h) = self._prep(g, h)
        return self._out(single, self._comm(g % self.mods, h % self.mods))

    def comm_by_definition(self, g, h):
        """``[g, h]`` computed literally as ``g^-1 h^-1 g h`` with :meth:`mul`."""
        gi, hi = self.inv(g), self.inv(h)
        return self.mul(self.mul(gi, hi), self.mul(g, h))

    def product(self, *gs):
        out = gs[0]
        for g in gs[1:]:
            out = self.mul(out, g)
        return out

    def word(self, letters) -> Element:
        """Evaluate a word given as ``(generator, power)`` pairs."""
        out = self.identity()
        for i, e in letters:
            out = self.mul(out, self.gen(i, e))
        return out

    def is_identity(self, g):
        g = np.asarray(g)
        return ~np.atleast_2d(g).any(axis=1) if g.ndim == 2 else not g.any()

    def element_order(self, g):
        """Least ``p**k`` with ``g**(p**k) = 1`` (batched)."""
        single, (g,) = self._prep(g)
        g = g % self.mods
        out = np.ones(g.shape[0], dtype=np.int64)
        live = g.any(axis=1)
        q = 1
        while live.any():
            g = self._pow(g, np.full(g.shape[0], self.p), 0)
            q *= self.p
            out[live] = q
            live &= g.any(axis=1)
        return int(out[0]) if single else out

    # -- indexing --------------------------------------------------------

    def index(self, g):
        g = np.asarray(g, dtype=np.int64)
        return (g % self.mods) @ self.strides

    def element(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        out = (idx[..., None] // self.strides) % self.mods
        return tuple(int(v) for v in out) if out.ndim == 1 else out

    def elements(self) -> np.ndarray:
        """All elements in index order, shape ``(|G|, k)``."""
        return self.element(np.arange(self.order, dtype=np.int64))

    def random_elements(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.integers(0, self.mods, size=(n, self.k), dtype=np.int64)


# ---------------------------------------------------------------------------
# validation


@dataclass
class ConsistencyReport:
    checks: dict[str, bool] = field(default_factory=dict)
    messages: list[str] = field(default_factory=list)
    failure_pair: tuple[int, int] | None = None
    enumerated_order: int | None = None

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": dict(self.checks),
            "messages": list(self.messages),
            "failure_pair": None if self.failure_pair is None else [self.failure_pair[0] + 1, self.failure_pair[1] + 1],
            "enumerated_order": self.enumerated_order,
        }


def _value_commutator_with_gen(pres: PcPresentation, value, i: int) -> list[int]:
    """Exponent sum of ``[value, x_i]`` by table bilinearity (needs no collection)."""
    k = pres.ngens
    acc = [0] * k
    for j, c in enumerate(value):
        if c == 0 or j == i:
            continue
        if j > i:
            t, sign = pres.commutator_value(j, i), 1
        else:
            t, sign = pres.commutator_value(i, j), -1
        for r in range(k):
            acc[r] += sign * c * t[r]
    return [a % m for a, m in zip(acc, pres.moduli)]


def validate(pres: PcPresentation, *, enumerate_budget: int | None = None) -> ConsistencyReport:
    """Check the class-2 consistency conditions of a presentation.

    Closure enumeration of the generated group runs only when ``|G|`` is at most
    ``enumerate_budget``.
    """
    rep = ConsistencyReport()
    p = pres.p
    rep.checks["odd_prime"] = is_prime(p) and p != 2
    if not rep.checks["odd_prime"]:
        rep.messages.append(f"p = {p} is not an odd prime")
    rep.checks["orders_positive"] = all(e >= 1 for e in pres.orders)
    if not rep.checks["orders_positive"]:
        rep.messages.append("every generator order exponent must be >= 1")
    rep.checks["width"] = max(pres.moduli) < MAX_MODULUS
    if not rep.checks["width"]:
        rep.messages.append("generator modulus overflows 64-bit residues")

    central = True
    for (a, b), value in pres.comm.items():
        for i in range(pres.ngens):
            if any(_value_commutator_with_gen(pres, value, i)):
                central = False
                rep.failure_pair = rep.failure_pair or (a, b)
                rep.messages.append(
                    f"[x_{a + 1}, x_{b + 1}] = {list(value)} does not commute with x_{i + 1}"
                )
                break
        if not central:
            break
    rep.checks["central"] = central

    if not (central and rep.checks["width"] and rep.checks["orders_positive"] and rep.checks["odd_prime"]):
        rep.checks["order_divisibility"] = False
        return rep

    G = Group(pres)
    divides = True
    for (a, b), value in pres.comm.items():
        o = G.element_order(value)
        bound = p ** min(pres.orders[a], pres.orders[b])
        if bound % o:
            divides = False
            rep.failure_pair = rep.failure_pair or (a, b)
            rep.messages.append(
                f"[x_{a + 1}, x_{b + 1}] has order {o}, which does not divide {bound}"
            )
            break
    rep.checks["order_divisibility"] = divides

    if divides and enumerate_budget is not None and pres.order <= enumerate_budget:
        from .subgroups import closure

        H = closure(G, [G.gen(i) for i in range(pres.ngens)], budget=enumerate_budget)
        rep.enumerated_order = H.order
        rep.checks["closure_order"] = H.order == pres.order
        if not rep.checks["closure_order"]:
            rep.messages.append(f"closure has {H.order} elements, expected {pres.order}")
    return rep
