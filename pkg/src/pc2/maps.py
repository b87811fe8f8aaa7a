"""Maps given by generator images: evaluation, relation checks, induced matrices.

A map is an array ``images`` of shape ``(k, k)`` (row ``i`` is the image of
``x_i``) or a batch of shape ``(N, k, k)``.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .group import Group
from .subgroups import StandardSubgroups


def evaluate(G: Group, images: np.ndarray, g) -> np.ndarray:
    """Image of ``g = x^a`` under the map: ``prod_m images[m]^(a_m)`` in order."""
    images = np.asarray(images, dtype=np.int64)
    single = images.ndim == 2
    Y = images[None] if single else images
    g = np.asarray(g, dtype=np.int64)
    g = np.broadcast_to(g, (Y.shape[0], G.k))
    out = np.zeros((Y.shape[0], G.k), dtype=np.int64)
    for m in range(G.k):
        e = g[:, m]
        if e.any():
            out = G.mul(out, G.pow(Y[:, m], e))
    return out[0] if single else out


def compose(G: Group, outer: np.ndarray, inner: np.ndarray) -> np.ndarray:
    """Images of ``outer o inner`` (apply ``inner`` first)."""
    inner = np.asarray(inner, dtype=np.int64)
    outer = np.asarray(outer, dtype=np.int64)
    single = inner.ndim == 2 and outer.ndim == 2
    I = inner[None] if inner.ndim == 2 else inner
    O = outer[None] if outer.ndim == 2 else outer
    n = max(I.shape[0], O.shape[0])
    I = np.broadcast_to(I, (n,) + I.shape[1:])
    O = np.broadcast_to(O, (n,) + O.shape[1:])
    out = np.stack([evaluate(G, O, I[:, i]) for i in range(G.k)], axis=1)
    return out[0] if single else out


def relations_hold(G: Group, images: np.ndarray) -> np.ndarray | bool:
    """Whether the images satisfy every defining relation (batched)."""
    images = np.asarray(images, dtype=np.int64)
    single = images.ndim == 2
    Y = images[None] if single else images
    ok = np.ones(Y.shape[0], dtype=bool)
    pres = G.pres
    for i, m in enumerate(pres.moduli):
        ok &= ~G.pow(Y[:, i], m).any(axis=1)
    for l in range(G.k):
        for j in range(l):
            lhs = G.comm(Y[:, l], Y[:, j])
            rhs = evaluate(G, Y, pres.commutator_value(l, j))
            ok &= (lhs == rhs).all(axis=1)
    return bool(ok[0]) if single else ok


def rank_mod_p(mats: np.ndarray, p: int) -> np.ndarray:
    """Rank over ``F_p`` of each matrix in a batch of shape ``(N, r, c)``."""
    A = np.array(mats, dtype=np.int64) % p
    if A.ndim == 2:
        return int(rank_mod_p(A[None], p)[0])
    N, r, c = A.shape
    rank = np.zeros(N, dtype=np.int64)
    rows = np.arange(N)
    inv = np.array([pow(int(v), -1, p) for v in range(1, p)], dtype=np.int64)
    for col in range(c):
        # rows at or below the current rank with a nonzero entry in this column
        pos = np.arange(r)[None, :] >= rank[:, None]
        cand = (A[:, :, col] != 0) & pos
        has = cand.any(axis=1)
        if not has.any():
            continue
        piv = np.argmax(cand, axis=1)
        sel = rows[has]
        pr, tr = piv[has], rank[has]
        # swap pivot row into position `rank`
        prow = A[sel, pr].copy()
        A[sel, pr] = A[sel, tr]
        A[sel, tr] = prow
        scale = inv[prow[:, col] - 1]
        prow = prow * scale[:, None] % p
        A[sel, tr] = prow
        factors = A[sel, :, col].copy()
        factors[np.arange(sel.size), tr] = 0
        A[sel] = (A[sel] - factors[:, :, None] * prow[:, None, :]) % p
        rank[has] += 1
    return rank


class FrattiniQuotient:
    """Coordinates on ``G/Phi(G)`` read off the exponents of essential generators.

    Requires that ``Phi(G)`` is exactly the set of elements whose essential
    exponents are divisible by ``p``; this holds for both families and for the
    small test groups, and is verified on construction.
    """

    def __init__(self, G: Group, S: StandardSubgroups):
        self.G = G
        self.p = G.p
        F = S.frattini
        self.essential = [i for i in range(G.k) if not F.contains(G.gen(i))]
        els = S.all_elements
        kernel = ~(els[:, self.essential] % self.p).any(axis=1)
        if not np.array_equal(kernel, F.mask):
            raise ValueError("Frattini subgroup is not cut out by the essential generator exponents")
        self.rank = len(self.essential)

    def project(self, g) -> np.ndarray:
        g = np.asarray(g, dtype=np.int64)
        return g[..., self.essential] % self.p

    def lift(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        out = np.zeros(v.shape[:-1] + (self.G.k,), dtype=np.int64)
        out[..., self.essential] = v % self.p
        return out

    def induced_matrix(self, images: np.ndarray) -> np.ndarray:
        """Column ``c`` is the projection of the image of essential generator ``c``."""
        images = np.asarray(images, dtype=np.int64)
        cols = images[..., self.essential, :]
        return np.swapaxes(self.project(cols), -1, -2)

    @cached_property
    def identity_matrix(self) -> np.ndarray:
        return np.eye(self.rank, dtype=np.int64)

    def bijective(self, images: np.ndarray) -> np.ndarray | bool:
        return rank_mod_p(self.induced_matrix(images), self.p) == self.rank


def is_automorphism(G: Group, fq: FrattiniQuotient, images) -> np.ndarray | bool:
    rel = relations_hold(G, images)
    bij = fq.bijective(images)
    return rel & bij


def is_central(G: Group, S: StandardSubgroups, images) -> np.ndarray | bool:
    """``x_i^-1 alpha(x_i)`` central for every generator."""
    images = np.asarray(images, dtype=np.int64)
    single = images.ndim == 2
    Y = images[None] if single else images
    ok = np.ones(Y.shape[0], dtype=bool)
    for i in range(G.k):
        e = G.mul(G.inv(G.gen(i)), Y[:, i])
        ok &= S.center.contains(e)
    return bool(ok[0]) if single else ok


def inner_automorphism(G: Group, g) -> np.ndarray:
    """Images of conjugation ``x -> g^-1 x g``."""
    gi = G.inv(g)
    return np.array([G.mul(G.mul(gi, G.gen(i)), g) for i in range(G.k)], dtype=np.int64)


def images_to_indices(G: Group, images: np.ndarray) -> np.ndarray:
    return G.index(images)
