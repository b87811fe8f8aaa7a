"""Linear algebra over ``Z/p^f``: Smith form with transforms, solving, counting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _val(x: int, p: int, f: int) -> int:
    if x == 0:
        return f
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@dataclass
class SmithForm:
    """``U @ C @ V == diag(p^v_0, p^v_1, ...)`` modulo ``p^f``.

    ``vals[i] == f`` marks a zero diagonal entry.
    """

    p: int
    f: int
    U: np.ndarray
    V: np.ndarray
    vals: list[int]
    nrows: int
    ncols: int

    @property
    def modulus(self) -> int:
        return self.p**self.f

    def solution_count(self) -> int:
        """Solutions of ``C z = t`` when solvable (independent of ``t``)."""
        out = 1
        for i in range(self.ncols):
            out *= self.p ** (self.vals[i] if i < len(self.vals) else self.f)
        return out

    def transform(self, t: np.ndarray) -> np.ndarray:
        """``U t`` for a batch ``t`` of shape ``(B, nrows)``."""
        return (t % self.modulus) @ self.U.T % self.modulus

    def solvable(self, t: np.ndarray) -> np.ndarray:
        tt = self.transform(t)
        ok = np.ones(tt.shape[0], dtype=bool)
        for i in range(self.nrows):
            v = self.vals[i] if i < len(self.vals) else self.f
            ok &= tt[:, i] % (self.p**v) == 0
        return ok

    def particular(self, t: np.ndarray) -> np.ndarray:
        """One solution ``z`` per solvable row of ``t``."""
        tt = self.transform(t)
        y = np.zeros((tt.shape[0], self.ncols), dtype=np.int64)
        for i in range(min(self.ncols, len(self.vals))):
            v = self.vals[i]
            if v < self.f:
                y[:, i] = tt[:, i] // (self.p**v)
        return y @ self.V.T % self.modulus

    def kernel_generators(self) -> list[tuple[np.ndarray, int]]:
        """Generators of the solution set of ``C z = 0`` with their orders."""
        gens = []
        q = self.modulus
        for i in range(self.ncols):
            v = self.vals[i] if i < len(self.vals) else self.f
            if v == 0:
                continue
            col = self.V[:, i] * (self.p ** (self.f - v) if v < self.f else 1) % q
            gens.append((col, self.p**v if v < self.f else q))
        return gens


def smith_form(C, p: int, f: int) -> SmithForm:
    q = p**f
    A = [[int(x) % q for x in row] for row in np.asarray(C, dtype=np.int64)]
    R, K = len(A), len(A[0]) if A else 0
    U = [[int(i == j) for j in range(R)] for i in range(R)]
    V = [[int(i == j) for j in range(K)] for i in range(K)]
    vals = []
    for t in range(min(R, K)):
        best = None
        for i in range(t, R):
            for j in range(t, K):
                if A[i][j]:
                    v = _val(A[i][j], p, f)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            vals.extend([f] * (min(R, K) - t))
            break
        v, i, j = best
        A[t], A[i] = A[i], A[t]
        U[t], U[i] = U[i], U[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        for row in V:
            row[t], row[j] = row[j], row[t]
        unit_inv = pow(A[t][t] // p**v, -1, q)
        A[t] = [x * unit_inv % q for x in A[t]]
        U[t] = [x * unit_inv % q for x in U[t]]
        pv = p**v
        for i in range(R):
            if i != t and A[i][t]:
                c = A[i][t] // pv
                A[i] = [(x - c * y) % q for x, y in zip(A[i], A[t])]
                U[i] = [(x - c * y) % q for x, y in zip(U[i], U[t])]
        for j in range(K):
            if j != t and A[t][j]:
                c = A[t][j] // pv
                for row in A:
                    row[j] = (row[j] - c * row[t]) % q
                for row in V:
                    row[j] = (row[j] - c * row[t]) % q
        vals.append(v)
    return SmithForm(p, f, np.array(U, dtype=np.int64).reshape(R, R),
                     np.array(V, dtype=np.int64).reshape(K, K), vals, R, K)
