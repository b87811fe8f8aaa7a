"""Automorphism censuses for class-2 groups with ``Z(G) = Phi(G)``.

Every automorphism is an invertible action on ``G/Phi`` together with a
central correction of each generator image.  For a fixed induced matrix the
corrections satisfy a linear system over ``Z(G)`` whose coefficients depend
only on the presentation, so the census puts all matrices through one
batched solvability test.  :func:`naive_backtrack` is an independent oracle
that searches generator images directly.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .abelian import subgroup_invariants
from .autcent import Analysis, PreconditionError
from .maps import FrattiniQuotient, evaluate, rank_mod_p
from .modular import SmithForm, smith_form
from .subgroups import BudgetExceeded, budgets

DEFAULT_CENSUS_BUDGET = 10**7
DEFAULT_NODE_BUDGET = 10**9
CHUNK = 1 << 15


def census_budget() -> int:
    return budgets().get("census", DEFAULT_CENSUS_BUDGET)


def node_budget() -> int:
    return budgets().get("nodes", DEFAULT_NODE_BUDGET)


def _require_z_equals_phi(an: Analysis) -> None:
    if an.S.center != an.S.frattini:
        raise PreconditionError("the lift method needs Z(G) = Phi(G)")


# ---------------------------------------------------------------------------
# characteristic profile


@dataclass
class Profile:
    p: int
    rank: int
    levels: dict[int, np.ndarray]  # k -> boolean membership table over F_p^rank codes
    columns: list[np.ndarray]  # allowed vectors per column, lexicographic
    comm_rank: np.ndarray | None = None  # rank of [g, G] per F_p^rank code

    @property
    def product_size(self) -> int:
        return math.prod(len(c) for c in self.columns)

    def column_sizes(self) -> list[int]:
        return [len(c) for c in self.columns]


def _vec_codes(v: np.ndarray, p: int) -> np.ndarray:
    r = v.shape[-1]
    weights = p ** np.arange(r - 1, -1, -1, dtype=np.int64)
    return (v % p) @ weights


def _all_vectors(p: int, r: int) -> np.ndarray:
    codes = np.arange(p**r, dtype=np.int64)
    weights = p ** np.arange(r - 1, -1, -1, dtype=np.int64)
    return (codes[:, None] // weights) % p


def commutator_ranks(an: Analysis, vectors: np.ndarray) -> np.ndarray:
    """Rank of ``[g, G]`` modulo ``Phi(G')`` for lifts ``g`` of ``G/Phi`` vectors.

    With ``Phi(G)`` central this depends only on ``g Phi`` and is preserved by
    every automorphism.
    """
    G = an.G
    els = an.frattini_quotient.lift(vectors)
    D = subgroup_invariants(G, an.S.derived)
    comms = np.stack([D.coordinates(G.comm(els, np.broadcast_to(G.gen(i), els.shape)))
                      for i in range(G.k)], axis=1)
    return rank_mod_p(comms % G.p, G.p)


def characteristic_profile(an: Analysis, *, refine: bool = True) -> Profile:
    """Allowed columns of the induced matrix.

    ``alpha`` preserves each ``Omega_k(G) Phi / Phi``, so the image of a
    generator lies in such a layer exactly when the generator does.  With
    ``refine`` the image must also keep the rank of ``[x, G]``.
    """
    _require_z_equals_phi(an)
    fq: FrattiniQuotient = an.frattini_quotient
    p, r = an.G.p, fq.rank
    allv = _all_vectors(p, r)
    levels = {}
    for k in range(1, an.S.max_level + 1):
        table = np.zeros(p**r, dtype=bool)
        table[_vec_codes(fq.project(an.S.omega(k).elements), p)] = True
        levels[k] = table
    crank = commutator_ranks(an, allv) if refine else None
    columns = []
    for c in range(r):
        ecode = p ** (r - 1 - c)
        keep = np.ones(len(allv), dtype=bool)
        for table in levels.values():
            keep &= table == table[ecode]
        if crank is not None:
            keep &= crank == crank[ecode]
        columns.append(allv[keep])
    return Profile(p, r, levels, columns, crank)


def profile_matrices(profile: Profile, start: int = 0, stop: int | None = None,
                     chunk: int = CHUNK) -> Iterator[np.ndarray]:
    """Invertible matrices from the profile in lexicographic column order.

    Yields batches of shape ``(B, r, r)``; column ``c`` varies slowest for ``c = 0``.
    """
    sizes = [len(c) for c in profile.columns]
    total = profile.product_size
    stop = total if stop is None else min(stop, total)
    radix = np.array([math.prod(sizes[c + 1:]) for c in range(len(sizes))], dtype=np.int64)
    for lo in range(start, stop, chunk):
        lin = np.arange(lo, min(lo + chunk, stop), dtype=np.int64)
        mats = np.empty((lin.size, profile.rank, profile.rank), dtype=np.int64)
        for c, col in enumerate(profile.columns):
            mats[:, :, c] = col[(lin // radix[c]) % sizes[c]]
        ok = rank_mod_p(mats, profile.p) == profile.rank
        if ok.any():
            yield mats[ok]


# ---------------------------------------------------------------------------
# lift system


@dataclass
class LiftResult:
    count: int
    matrix: np.ndarray
    sample: np.ndarray | None = None


class LiftSystem:
    """Central-correction constraints ``C z = t(M)`` over the coordinates of ``Z(G)``."""

    def __init__(self, an: Analysis):
        _require_z_equals_phi(an)
        self.an = an
        self.G = an.G
        self.fq = an.frattini_quotient
        self.Z = an.center_invariants
        G, pres = self.G, self.G.pres
        k = G.k
        rows, kinds = [], []
        for i, m in enumerate(pres.moduli):
            row = np.zeros(k, dtype=np.int64)
            row[i] = m
            rows.append(row)
            kinds.append(("power", i))
        for l in range(k):
            for j in range(l):
                rows.append(np.array(pres.commutator_value(l, j), dtype=np.int64))
                kinds.append(("comm", l, j))
        self.C = np.array(rows, dtype=np.int64)
        self.kinds = kinds
        self.smith: dict[int, SmithForm] = {}
        for fm in self.Z.factors:
            e = _log(fm, G.p)
            if e not in self.smith:
                self.smith[e] = smith_form(self.C, G.p, e)
        self.fexps = [_log(fm, G.p) for fm in self.Z.factors]
        self.count_if_solvable = math.prod(self.smith[e].solution_count() for e in self.fexps)

    # lifts of matrix columns
    def lifts(self, mats: np.ndarray, reps: np.ndarray | None = None) -> np.ndarray:
        """Coset representatives ``u_i`` for a batch of induced matrices."""
        G = self.G
        B = mats.shape[0]
        u = np.zeros((B, G.k, G.k), dtype=np.int64)
        for c, i in enumerate(self.fq.essential):
            u[:, i] = self.fq.lift(mats[:, :, c])
        if reps is not None:
            u = np.stack([G.mul(u[:, i], reps[:, i]) for i in range(G.k)], axis=1)
        return u

    def targets(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Right-hand sides in ``Z(G)`` coordinates and a mask of central targets."""
        G, pres = self.G, self.G.pres
        B = u.shape[0]
        t = np.empty((B, len(self.kinds), len(self.Z.factors)), dtype=np.int64)
        ok = np.ones(B, dtype=bool)
        for r, kind in enumerate(self.kinds):
            if kind[0] == "power":
                i = kind[1]
                w = G.inv(G.pow(u[:, i], pres.moduli[i]))
            else:
                _, l, j = kind
                w = G.mul(G.comm(u[:, l], u[:, j]), G.inv(evaluate(G, u, pres.commutator_value(l, j))))
            c = self.Z.coordinates(w)
            ok &= (c >= 0).all(axis=1)
            t[:, r] = np.where(c >= 0, c, 0)
        return t, ok

    def solvable(self, t: np.ndarray, ok: np.ndarray) -> np.ndarray:
        for m, e in enumerate(self.fexps):
            ok = ok & self.smith[e].solvable(t[:, :, m])
        return ok

    def counts(self, mats: np.ndarray, reps: np.ndarray | None = None) -> np.ndarray:
        u = self.lifts(mats, reps)
        t, ok = self.targets(u)
        return np.where(self.solvable(t, ok), self.count_if_solvable, 0)

    def _solution_space(self, mat: np.ndarray):
        """Lift ``u``, particular solution and kernel generators for one matrix (or ``None``)."""
        G = self.G
        u = self.lifts(mat[None])
        t, ok = self.targets(u)
        if not self.solvable(t, ok)[0]:
            return None
        base = np.zeros((G.k, len(self.fexps)), dtype=np.int64)
        gens, orders = [], []
        for m, e in enumerate(self.fexps):
            sf = self.smith[e]
            base[:, m] = sf.particular(t[:, :, m])[0]
            for col, order in sf.kernel_generators():
                g = np.zeros((G.k, len(self.fexps)), dtype=np.int64)
                g[:, m] = col
                gens.append(g)
                orders.append(order)
        gstack = np.array(gens, dtype=np.int64).reshape(len(gens), G.k, len(self.fexps))
        return u[0], base, gstack, orders

    def _images(self, u: np.ndarray, z: np.ndarray) -> np.ndarray:
        G = self.G
        imgs = np.empty((z.shape[0], G.k, G.k), dtype=np.int64)
        for i in range(G.k):
            zi = self.Z.element(z[:, i])
            imgs[:, i] = G.mul(np.broadcast_to(u[i], zi.shape), zi)
        return imgs

    def sample(self, mat: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
        """``n`` uniformly random automorphisms inducing ``mat``."""
        space = self._solution_space(np.asarray(mat, dtype=np.int64))
        if space is None:
            return np.zeros((0, self.G.k, self.G.k), dtype=np.int64)
        u, base, gstack, orders = space
        coef = np.stack([rng.integers(0, o, size=n) for o in orders], axis=1) if orders else np.zeros((n, 0), np.int64)
        zmods = np.array(self.Z.factors, dtype=np.int64)
        z = (base[None] + np.einsum("ng,gkm->nkm", coef, gstack)) % zmods
        return self._images(u, z)

    def solutions(self, mat: np.ndarray, chunk: int = 1 << 16) -> Iterator[np.ndarray]:
        """All automorphisms with induced matrix ``mat``, as ``(B, k, k)`` image batches."""
        space = self._solution_space(np.asarray(mat, dtype=np.int64))
        if space is None:
            return
        u, base, gstack, orders = space
        total = math.prod(orders)
        zmods = np.array(self.Z.factors, dtype=np.int64)
        radix = np.array([math.prod(orders[i + 1:]) for i in range(len(orders))], dtype=np.int64)
        omods = np.array(orders, dtype=np.int64)
        for lo in range(0, total, chunk):
            lin = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
            coef = (lin[:, None] // radix[None, :]) % omods[None, :]
            z = (base[None] + np.einsum("ng,gkm->nkm", coef, gstack)) % zmods
            yield self._images(u, z)


def _log(n: int, p: int) -> int:
    k = 0
    while n > 1:
        n //= p
        k += 1
    return k


def lift_solve(an: Analysis, M, *, reps: np.ndarray | None = None, system: LiftSystem | None = None) -> LiftResult:
    """Number of automorphisms inducing ``M`` on ``G/Phi`` (and one of them)."""
    system = system or LiftSystem(an)
    M = np.asarray(M, dtype=np.int64) % an.G.p
    if rank_mod_p(M, an.G.p) != M.shape[0]:
        raise PreconditionError("induced matrix is not invertible")
    if reps is not None:
        reps = np.asarray(reps, dtype=np.int64)[None]
    count = int(system.counts(M[None], reps)[0])
    sample = None
    if count:
        sample = next(system.solutions(M), None)
        sample = None if sample is None else sample[0]
    return LiftResult(count, M, sample)


@dataclass
class CensusResult:
    aut_order: int
    all_central: bool
    feasible_matrices: list[np.ndarray]
    matrices_checked: int
    identity_count: int
    timings: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "autOrder": self.aut_order,
            "allCentral": self.all_central,
            "feasibleMatrices": [m.tolist() for m in self.feasible_matrices],
            "matricesChecked": self.matrices_checked,
            "identityCount": self.identity_count,
        }


_WORKER: dict = {}


def _census_range(args):
    lo, hi = args
    system, profile = _WORKER["system"], _WORKER["profile"]
    return _scan(system, profile, lo, hi)


def _scan(system: LiftSystem, profile: Profile, lo: int, hi: int):
    total, checked, feasible = 0, 0, []
    for mats in profile_matrices(profile, lo, hi):
        counts = system.counts(mats)
        checked += len(mats)
        total += int(counts.sum())
        feasible.extend(mats[counts > 0])
    return total, checked, feasible


def aut_order_and_centrality(an: Analysis, *, budget: int | None = None, jobs: int = 1,
                             refine: bool = True) -> CensusResult:
    """Sum lift counts over every profile-surviving matrix."""
    t0 = time.perf_counter()
    profile = characteristic_profile(an, refine=refine)
    budget = census_budget() if budget is None else budget
    if profile.product_size > budget:
        raise BudgetExceeded(
            f"matrix census of {profile.product_size} candidates exceeds budget {budget}"
        )
    system = LiftSystem(an)
    ident = an.frattini_quotient.identity_matrix
    identity_count = int(system.counts(ident[None])[0])
    t1 = time.perf_counter()
    total_size = profile.product_size
    if jobs > 1:
        _WORKER.update(system=system, profile=profile)
        step = max(CHUNK, -(-total_size // (jobs * 8)))
        ranges = [(lo, min(lo + step, total_size)) for lo in range(0, total_size, step)]
        with ProcessPoolExecutor(jobs) as ex:
            parts = list(ex.map(_census_range, ranges))
    else:
        parts = [_scan(system, profile, 0, total_size)]
    total = sum(p[0] for p in parts)
    checked = sum(p[1] for p in parts)
    feasible = [m for p in parts for m in p[2]]
    feasible.sort(key=lambda m: (not np.array_equal(m, ident), m.T.ravel().tolist()))
    all_central = len(feasible) == 1 and np.array_equal(feasible[0], ident)
    return CensusResult(
        aut_order=total,
        all_central=all_central,
        feasible_matrices=feasible,
        matrices_checked=checked,
        identity_count=identity_count,
        timings={"identity": t1 - t0, "census": time.perf_counter() - t1},
    )


def lift_automorphisms(an: Analysis, matrices=None, chunk: int = 1 << 16) -> Iterator[np.ndarray]:
    """Stream every automorphism found by the lift method (image batches)."""
    system = LiftSystem(an)
    if matrices is None:
        matrices = aut_order_and_centrality(an).feasible_matrices
    for M in matrices:
        yield from system.solutions(np.asarray(M), chunk)


# ---------------------------------------------------------------------------
# naive backtracking oracle


@dataclass
class BacktrackResult:
    count: int
    nodes: int
    authoritative: bool
    automorphisms: np.ndarray | None = None  # (count, k) element indices, sorted


def element_signatures(an: Analysis) -> np.ndarray:
    """Automorphism-invariant signature of every element.

    Columns: element order, membership in each characteristic subgroup, and
    the rank of ``[g, G]`` modulo ``Phi(G')``.
    """
    G, S = an.G, an.S
    cols = [S.element_orders]
    for H in S.characteristic_series().values():
        cols.append(H.mask.astype(np.int64))
    els = S.all_elements
    if S.derived.order > 1:
        D = subgroup_invariants(G, S.derived)
        comms = np.stack([D.coordinates(G.comm(els, np.broadcast_to(G.gen(i), els.shape)))
                          for i in range(G.k)], axis=1)
        cols.append(rank_mod_p(comms % G.p, G.p))
    return np.stack(cols, axis=1)


def naive_backtrack(an: Analysis, *, budget: int | None = None, collect: bool = True,
                    chunk: int = 1 << 18, table_limit: int = 4 * 10**6) -> BacktrackResult:
    """Depth-first search over generator images.

    Candidates for each generator share its signature (order, characteristic
    memberships, commutator rank) and satisfy its power relation.  Each level
    checks the commutator relations whose generators are all assigned and that
    the chosen images stay independent modulo ``Phi``.  Commutators between
    candidate sets are tabulated once as element indices, so a node check is
    an index comparison.
    """
    G, pres = an.G, an.G.pres
    k, p = G.k, G.p
    budget = node_budget() if budget is None else budget
    sig = element_signatures(an)
    els = an.S.all_elements
    cands = []
    for i in range(k):
        s = sig[G.index(G.gen(i))]
        c = els[(sig == s).all(axis=1)]
        # the power relation only involves the image itself
        cands.append(c[~G.pow(c, pres.moduli[i]).any(axis=1)])
    checks: list[list[tuple[int, int]]] = [[] for _ in range(k)]
    for l in range(k):
        for j in range(l):
            supp = [m for m, v in enumerate(pres.commutator_value(l, j)) if v]
            checks[max([l] + supp)].append((l, j))

    # lookup tables: commutators of candidate pairs, right-hand sides
    comm_tab: dict[tuple[int, int], np.ndarray] = {}
    rhs_tab: dict[tuple[int, int], tuple[int, np.ndarray] | None] = {}
    for lvl in range(k):
        for l, j in checks[lvl]:
            if len(cands[l]) * len(cands[j]) <= table_limit:
                tab = np.empty((len(cands[l]), len(cands[j])), dtype=np.int64)
                step = max(1, (1 << 18) // max(1, len(cands[j])))
                for lo in range(0, len(cands[l]), step):
                    a = cands[l][lo:lo + step]
                    pa = np.repeat(a, len(cands[j]), axis=0)
                    pb = np.tile(cands[j], (len(a), 1))
                    tab[lo:lo + len(a)] = G.index(G.comm(pa, pb)).reshape(len(a), len(cands[j]))
                comm_tab[l, j] = tab
            w = pres.commutator_value(l, j)
            supp = [m for m, v in enumerate(w) if v]
            if not supp:
                rhs_tab[l, j] = (-1, np.zeros(1, dtype=np.int64))
            elif len(supp) == 1:
                m = supp[0]
                rhs_tab[l, j] = (m, G.index(G.pow(cands[m], w[m])))
            else:
                rhs_tab[l, j] = None
    fq = an.frattini_quotient
    proj = [fq.project(c) for c in cands]
    ess_rank = [sum(1 for i in fq.essential if i <= lvl) for lvl in range(k)]

    state = {"nodes": 0, "count": 0}
    found: list[np.ndarray] = []

    def images(P: np.ndarray) -> np.ndarray:
        Y = np.zeros(P.shape + (k,), dtype=np.int64)
        for i in range(P.shape[1]):
            Y[:, i] = cands[i][P[:, i]]
        return Y

    def level_filter(P: np.ndarray, lvl: int) -> np.ndarray:
        ok = np.ones(P.shape[0], dtype=bool)
        for l, j in checks[lvl]:
            sub = np.flatnonzero(ok)
            if (l, j) in comm_tab:
                lhs = comm_tab[l, j][P[sub, l], P[sub, j]]
            else:
                lhs = G.index(G.comm(cands[l][P[sub, l]], cands[j][P[sub, j]]))
            r = rhs_tab[l, j]
            if r is None:
                rhs = G.index(evaluate(G, images(P[sub]), pres.commutator_value(l, j)))
            elif r[0] < 0:
                rhs = 0
            else:
                rhs = r[1][P[sub, r[0]]]
            ok[sub] = lhs == rhs
        if lvl in fq.essential:
            sub = np.flatnonzero(ok)
            cols = [i for i in fq.essential if i <= lvl]
            mats = np.stack([proj[i][P[sub, i]] for i in cols], axis=2)
            ok[sub] = rank_mod_p(mats, p) == ess_rank[lvl]
        return ok

    def expand(prefix: np.ndarray, lvl: int):
        nc = len(cands[lvl])
        per = max(1, chunk // max(1, nc))
        for lo in range(0, prefix.shape[0], per):
            part = prefix[lo:lo + per]
            state["nodes"] += part.shape[0] * nc
            if state["nodes"] > budget:
                raise BudgetExceeded("backtracking node budget exhausted")
            P = np.repeat(part, nc, axis=0)
            P[:, lvl] = np.tile(np.arange(nc), part.shape[0])
            P = P[level_filter(P, lvl)]
            if not P.size:
                continue
            if lvl == k - 1:
                state["count"] += len(P)
                if collect:
                    found.append(G.index(images(P)))
            else:
                expand(P, lvl + 1)

    root = np.zeros((1, k), dtype=np.int64)
    authoritative = True
    try:
        expand(root, 0)
    except BudgetExceeded:
        authoritative = False
    autos = None
    if collect:
        autos = canonical_rows(np.concatenate(found) if found else np.zeros((0, k), np.int64))
    return BacktrackResult(state["count"], state["nodes"], authoritative, autos)


def canonical_rows(a: np.ndarray) -> np.ndarray:
    """Rows sorted lexicographically (for set comparison)."""
    if a.shape[0] == 0:
        return a
    order = np.lexsort(a.T[::-1])
    return a[order]


def lift_automorphism_indices(an: Analysis, matrices=None) -> np.ndarray:
    parts = [an.G.index(b) for b in lift_automorphisms(an, matrices)]
    return canonical_rows(np.concatenate(parts) if parts else np.zeros((0, an.G.k), np.int64))
