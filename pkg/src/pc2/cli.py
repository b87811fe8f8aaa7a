"""Command-line pipeline: construct, analyze, search and verify class-2 groups.

Exit codes: 0 when every reported claim holds, 1 when a claim fails,
2 for usage and validation errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import gap
from .abelian import hom_count
from .autcent import Analysis, PreconditionError, adney_yen, autcent_order, central_images, commutation_check
from .autsearch import (
    LiftSystem,
    aut_order_and_centrality,
    canonical_rows,
    lift_automorphisms,
    lift_solve,
    naive_backtrack,
)
from .families import FamilyParams, build, structural_report
from .group import CollectionError, Group, validate
from .presentation import PcPresentation, PresentationError, canonical_json
from .props import FAMILY_A_SYSTEM, FAMILY_B_SYSTEM, scan
from .subgroups import BudgetExceeded

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_SEED = 0
SAMPLE_SIZE = 10_000
ENUMERATE_LIMIT = 10**7
BACKTRACK_ORDER_LIMIT = 3**8


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# shared pieces


def regularity_check(G: Group, pairs: int, seed: int) -> bool:
    """``(xy)^p = x^p y^p`` on random pairs."""
    rng = np.random.default_rng(seed)
    x, y = G.random_elements(rng, pairs), G.random_elements(rng, pairs)
    lhs = G.pow(G.mul(x, y), G.p)
    rhs = G.mul(G.pow(x, G.p), G.pow(y, G.p))
    return bool((lhs == rhs).all())


def random_central_automorphisms(an: Analysis, n: int, rng: np.random.Generator) -> np.ndarray:
    hb = an.hom_basis
    coeffs = np.stack([rng.integers(0, b.order, size=n) for b in hb.blocks], axis=1)
    blocks = np.array([b.matrix for b in hb.blocks], dtype=np.int64)
    mats = np.einsum("nb,bst->nst", coeffs, blocks) % np.array(hb.target, dtype=np.int64)
    return central_images(an, mats)


def edge_central_automorphisms(an: Analysis) -> np.ndarray:
    """One map per source factor: its blocks at the largest coefficient, all others zero."""
    hb = an.hom_basis
    out = []
    for src in range(len(hb.source)):
        coeffs = [b.order - 1 if b.source == src else 0 for b in hb.blocks]
        out.append(hb.combine(coeffs))
    return central_images(an, np.array(out, dtype=np.int64))


def lift_sample(an: Analysis, matrices, n: int, rng: np.random.Generator) -> np.ndarray:
    system = LiftSystem(an)
    picks = rng.integers(0, len(matrices), size=n)
    parts = []
    for m in range(len(matrices)):
        k = int((picks == m).sum())
        if k:
            parts.append(system.sample(np.asarray(matrices[m]), k, rng))
    return np.concatenate(parts)


def batches(arr: np.ndarray, size: int = 1 << 16):
    for lo in range(0, len(arr), size):
        yield arr[lo:lo + size]


# ---------------------------------------------------------------------------
# verification checklist


@dataclass
class VerificationChecklist:
    family: str
    p: int
    n: int
    claims: list[dict] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    def add(self, cid: str, description: str, expected, computed, ok: bool | None = None) -> bool:
        ok = (expected == computed) if ok is None else ok
        self.claims.append({"id": cid, "description": description, "expected": expected,
                            "computed": computed, "pass": bool(ok)})
        return bool(ok)

    @property
    def passed(self) -> bool:
        return bool(self.claims) and all(c["pass"] for c in self.claims)

    def canonical(self) -> dict:
        return {"family": self.family, "p": self.p, "n": self.n, "claims": self.claims, "pass": self.passed}

    def text(self) -> str:
        lines = [f"verify family {self.family} p={self.p} n={self.n}"]
        for c in self.claims:
            mark = "PASS" if c["pass"] else "FAIL"
            lines.append(f"  [{mark}] {c['id']}: {c['description']} (expected {c['expected']}, computed {c['computed']})")
        lines.append("result: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def _stage(chk: VerificationChecklist, name: str, fn):
    t = time.perf_counter()
    try:
        return fn()
    except (BudgetExceeded, PreconditionError, CollectionError, AssertionError, ValueError) as exc:
        chk.add(name, f"stage {name} completed", "completed", f"{type(exc).__name__}: {exc}", ok=False)
        return None
    finally:
        chk.timings[name] = round(time.perf_counter() - t, 3)


def verify(family: str, p: int, n: int, *, backtrack: bool = False, seed: int = DEFAULT_SEED,
           sample: int = SAMPLE_SIZE, jobs: int = 1, external: dict | None = None) -> VerificationChecklist:
    chk = VerificationChecklist(family.upper(), p, n)
    try:
        params = FamilyParams(family, p, n)
    except PresentationError as exc:
        chk.add("input", "parameters satisfy the family hypotheses", "odd prime p, n >= 3", str(exc), ok=False)
        return chk
    chk.add("input", "parameters satisfy the family hypotheses", True, True)
    fam = params.family
    pres = build(params)
    rep = validate(pres)
    if not chk.add("consistency", "presentation passes the class-2 consistency checks", True, rep.ok):
        return chk
    G = Group(pres)
    an = Analysis(G)

    sr = _stage(chk, "structure", lambda: structural_report(G, an.S))
    if sr is None:
        return chk
    chk.add("order", f"|G| = p^{params.log_order}", p**params.log_order, sr.order)
    chk.add("exponent", "exponent of G is p^n", p**n, sr.exponent)
    chk.add("class", "nilpotency class", 2, sr.nilpotency_class)
    chk.add("center-frattini", "Z(G) = Phi(G)", True, sr.center_equals_frattini)
    chk.add("derived-elementary", "G' is elementary abelian", True, sr.derived_elementary_abelian)
    chk.add("regular", f"(xy)^p = x^p y^p on {sample} random pairs", True, regularity_check(G, sample, seed))

    hc = _stage(chk, "autcent", lambda: autcent_order(an))
    if hc is not None:
        if fam == "A":
            chk.add("autcent-order", "|Autcent(G)| = p^(n+10)", p ** (n + 10), hc)
        else:
            chk.add("autcent-order", "|Autcent(G)| = |Hom(G/G', Z(G))| (computed, not a closed form)",
                    hom_count(an.abelianization, an.center_invariants), hc)
        ident = lift_solve(an, an.frattini_quotient.identity_matrix).count
        chk.add("lift-identity", "lift count of the identity matrix equals |Hom(G/G', Z(G))|", hc, ident)

    ay = _stage(chk, "adney-yen", lambda: adney_yen(an))
    want_abelian = fam == "A"
    if ay is not None:
        chk.add("adney-yen", "criterion verdict: Autcent(G) abelian", want_abelian, ay.abelian)
        want = [p ** (n - 2)] if fam == "A" else [p ** (n - 2), p]
        chk.add("r-mod-derived", "R/G' invariants", want, list(ay.quotient_invariants))
    cc = _stage(chk, "commutation", lambda: commutation_check(an))
    if cc is not None:
        chk.add("commutation", "central basis automorphisms commute", want_abelian, cc.abelian)

    census = _stage(chk, "census", lambda: aut_order_and_centrality(an, jobs=jobs))
    if census is not None:
        chk.add("all-central", "identity is the only feasible induced matrix (Aut = Autcent)", True, census.all_central)
        if fam == "A":
            chk.add("aut-order", "|Aut(G)| = p^(n+10)", p ** (n + 10), census.aut_order)
        elif hc is not None:
            chk.add("aut-order", "|Aut(G)| equals |Autcent(G)| (computed)", hc, census.aut_order)

    if backtrack and census is not None and G.order > BACKTRACK_ORDER_LIMIT:
        print(f"warning: |G| = {G.order} is above {BACKTRACK_ORDER_LIMIT}; backtracking skipped", file=sys.stderr)
    elif backtrack and census is not None:
        bt = _stage(chk, "backtrack", lambda: naive_backtrack(an))
        if bt is not None:
            chk.add("backtrack-authoritative", "backtracking finished within budget", True, bt.authoritative)
            chk.add("backtrack-count", "backtracking count equals lift census", census.aut_order, bt.count)
            lift = _stage(chk, "lift-set", lambda: _lift_indices(an, census.feasible_matrices))
            if lift is not None:
                chk.add("backtrack-set", "backtracking and lift give the same automorphism set", True,
                        bool(np.array_equal(lift, bt.automorphisms)))

    if census is not None:
        rng = np.random.default_rng(seed)
        system = FAMILY_A_SYSTEM if fam == "A" else FAMILY_B_SYSTEM
        name = "prop1" if fam == "A" else "prop2"
        if census.aut_order <= ENUMERATE_LIMIT:
            stream = lambda: lift_automorphisms(an, census.feasible_matrices)
            what = "every automorphism"
        else:
            stream = lambda: batches(lift_sample(an, census.feasible_matrices, sample, rng))
            what = f"{sample} random automorphisms"
        summ = _stage(chk, name, lambda: scan(G, stream(), system, name))
        if summ is not None:
            chk.add(name, f"congruence system holds for {what}", 0, summ.violation_count)
            chk.add("conclusion", f"a_ij = 0 mod p for {what}", summ.checked, summ.counts["conclusion"])
        if fam == "B":
            imgs = np.concatenate([random_central_automorphisms(an, sample, rng), edge_central_automorphisms(an)])
            s2 = _stage(chk, "prop2-central", lambda: scan(G, batches(imgs), system, name))
            if s2 is not None:
                chk.add("prop2-central", f"congruence system holds on {sample} sampled central automorphisms and the edge maps",
                        0, s2.violation_count)

    if external is not None:
        cmp = gap.compare(external, expected_block(an, census))
        chk.add("external-cas", "external computer algebra results agree", True, cmp.agree)
    return chk


def _lift_indices(an: Analysis, matrices) -> np.ndarray:
    parts = [an.G.index(b) for b in lift_automorphisms(an, matrices)]
    return canonical_rows(np.concatenate(parts) if parts else np.zeros((0, an.G.k), np.int64))


def expected_block(an: Analysis, census=None) -> dict:
    census = census or aut_order_and_centrality(an)
    sr = structural_report(an.G, an.S)
    return {
        "Size": sr.order,
        "Exponent": sr.exponent,
        "AutSize": census.aut_order,
        "AutAbelian": commutation_check(an).abelian if census.all_central else False,
    }


# ---------------------------------------------------------------------------
# argument handling


def _load(args) -> PcPresentation:
    if getattr(args, "file", None):
        return PcPresentation.load(args.file)
    if args.family is None or args.p is None or args.n is None:
        raise UsageError("give a presentation FILE or --family, --p and --n")
    return build(args.family, args.p, args.n)


def _budget_env(args) -> None:
    import os

    parts = []
    if getattr(args, "budget", None):
        parts.append(f"nodes={args.budget}")
    if getattr(args, "census_budget", None):
        parts.append(f"census={args.census_budget}")
    if parts:
        prev = os.environ.get("PC2_BUDGET", "")
        if prev and "=" not in prev:
            prev = f"elements={prev}"
        os.environ["PC2_BUDGET"] = ",".join(filter(None, [prev] + parts))


def _flatten(obj, prefix: str = "") -> list[str]:
    if isinstance(obj, dict):
        return [line for k in sorted(obj) for line in _flatten(obj[k], f"{prefix}{k}.")]
    if isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        return [line for i, v in enumerate(obj) for line in _flatten(v, f"{prefix}{i}.")]
    return [f"{prefix[:-1]}: {json.dumps(obj)}"]


def _emit(args, payload: dict, text: str | None = None) -> None:
    if args.text:
        out = text if text is not None else "\n".join(_flatten(payload))
    else:
        out = canonical_json(payload)
    if getattr(args, "out", None):
        Path(args.out).write_text(out + "\n")
    else:
        print(out)


def _group_args(sp: argparse.ArgumentParser, file_arg: bool = True) -> None:
    if file_arg:
        sp.add_argument("file", nargs="?", help="presentation JSON file")
    sp.add_argument("--family", type=str.upper, choices=["A", "B"])
    sp.add_argument("--p", type=int)
    sp.add_argument("--n", type=int)


def _common(sp: argparse.ArgumentParser) -> None:
    fmt = sp.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="text", action="store_false", help="canonical JSON output (default)")
    fmt.add_argument("--text", dest="text", action="store_true", help="human-readable output")
    sp.set_defaults(text=False)
    sp.add_argument("--out", help="write the report to FILE")
    sp.add_argument("--budget", type=int, help="backtracking node budget")
    sp.add_argument("--census-budget", type=int, help="matrix census budget")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes for the matrix census")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pc2", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("construct", help="write a family presentation as JSON")
    _group_args(sp, file_arg=False)
    _common(sp)

    sp = sub.add_parser("analyze", help="consistency and structural report")
    _group_args(sp)
    _common(sp)

    sp = sub.add_parser("autcent", help="central automorphisms: order, criterion, commutation")
    _group_args(sp)
    _common(sp)

    sp = sub.add_parser("aut", help="automorphism census")
    _group_args(sp)
    _common(sp)
    sp.add_argument("--method", choices=["lift", "backtrack", "both"], default="lift")
    sp.add_argument("--emit-automorphisms", metavar="FILE", help="write generator images, one JSON object per line")

    sp = sub.add_parser("props", help="check the congruence systems on automorphisms")
    _group_args(sp)
    _common(sp)
    sp.add_argument("--which", choices=["prop1", "prop2"])
    sp.add_argument("--source", choices=["enumerate", "sample"], default="enumerate")
    sp.add_argument("--samples", type=int, default=SAMPLE_SIZE)

    sp = sub.add_parser("verify", help="run the full checklist for a family instance")
    _group_args(sp, file_arg=False)
    _common(sp)
    sp.add_argument("--method", choices=["lift", "both"], default="lift")
    sp.add_argument("--samples", type=int, default=SAMPLE_SIZE)
    sp.add_argument("--gap-result", help="GAP output to compare against")
    sp.add_argument("--no-timings", action="store_true")
    sp.add_argument("--allow-large", action="store_true", help="permit instances beyond the default grid")

    sp = sub.add_parser("gap-export", help="write a GAP script for external cross-checks")
    _group_args(sp)
    _common(sp)
    sp.add_argument("--no-expected", action="store_true", help="omit the computed expected block")

    sp = sub.add_parser("gap-import", help="compare GAP output with computed values")
    sp.add_argument("result", help="GAP output file")
    _group_args(sp)
    _common(sp)
    return ap


DEFAULT_GRID = {("A", 3, 3), ("A", 3, 4), ("A", 5, 3), ("B", 3, 3), ("B", 3, 4)}


def _analysis(args) -> Analysis:
    pres = _load(args)
    rep = validate(pres)
    if not rep.ok:
        raise UsageError("presentation failed validation: " + "; ".join(rep.messages))
    return Analysis(Group(pres))


def cmd_construct(args) -> int:
    pres = _load(args)
    _emit(args, pres.to_dict())
    return EXIT_OK


def cmd_analyze(args) -> int:
    pres = _load(args)
    rep = validate(pres)
    payload = {"name": pres.name, "consistency": rep.to_dict()}
    if rep.ok:
        an = Analysis(Group(pres))
        payload["structure"] = structural_report(an.G, an.S).to_dict()
        payload["center_invariants"] = list(an.center_invariants.factors)
        payload["abelianization_invariants"] = list(an.abelianization.factors)
    _emit(args, payload)
    return EXIT_OK if rep.ok else EXIT_USAGE


def cmd_autcent(args) -> int:
    an = _analysis(args)
    payload = {
        "autcentOrder": autcent_order(an),
        "adneyYen": adney_yen(an).to_dict(),
        "commutation": commutation_check(an).to_dict(),
    }
    _emit(args, payload)
    return EXIT_OK


def cmd_aut(args) -> int:
    an = _analysis(args)
    payload: dict = {}
    timings: dict = {}
    census = None
    ok = True
    if args.method in ("lift", "both"):
        census = aut_order_and_centrality(an, jobs=args.jobs)
        payload.update(census.to_dict())
        timings.update({f"lift_{k}": round(v, 3) for k, v in census.timings.items()})
        ok &= census.aut_order >= autcent_order(an) if an.purely_non_abelian else True
    if args.method in ("backtrack", "both"):
        t = time.perf_counter()
        bt = naive_backtrack(an, collect=args.method == "both")
        timings["backtrack"] = round(time.perf_counter() - t, 3)
        payload["backtrack"] = {"count": bt.count, "nodes": bt.nodes, "authoritative": bt.authoritative}
        if census is not None:
            same = bool(np.array_equal(_lift_indices(an, census.feasible_matrices), bt.automorphisms))
            payload["backtrack"]["sameSet"] = same
            ok &= same and bt.authoritative
        if args.method == "backtrack":
            payload["autOrder"] = bt.count
    payload["timings"] = timings
    if args.emit_automorphisms:
        if census is None:
            census = aut_order_and_centrality(an, jobs=args.jobs)
        with open(args.emit_automorphisms, "w") as fh:
            for batch in lift_automorphisms(an, census.feasible_matrices):
                for img in batch.tolist():
                    fh.write(json.dumps({"images": img}) + "\n")
    _emit(args, payload)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_props(args) -> int:
    an = _analysis(args)
    which = args.which
    if which is None:
        which = "prop2" if args.family == "B" else "prop1"
    system = FAMILY_A_SYSTEM if which == "prop1" else FAMILY_B_SYSTEM
    rng = np.random.default_rng(args.seed)
    if args.source == "enumerate":
        stream = lift_automorphisms(an)
    elif which == "prop2":
        stream = batches(np.concatenate([random_central_automorphisms(an, args.samples, rng),
                                          edge_central_automorphisms(an)]))
    else:
        census = aut_order_and_centrality(an, jobs=args.jobs)
        stream = batches(lift_sample(an, census.feasible_matrices, args.samples, rng))
    summ = scan(an.G, stream, system, which)
    _emit(args, summ.to_dict())
    return EXIT_OK if summ.ok else EXIT_FAIL


def cmd_verify(args) -> int:
    if args.family is None or args.p is None or args.n is None:
        raise UsageError("verify needs --family, --p and --n")
    if (args.family, args.p, args.n) not in DEFAULT_GRID and not args.allow_large and args.p > 2 and args.n >= 3:
        print(f"warning: ({args.p},{args.n}) is outside the default grid; pass --allow-large to run it",
              file=sys.stderr)
        return EXIT_USAGE
    external = gap.parse_result_block(Path(args.gap_result).read_text()) if args.gap_result else None
    chk = verify(args.family, args.p, args.n, backtrack=args.method == "both", seed=args.seed,
                 sample=args.samples, jobs=args.jobs, external=external)
    payload = {"report": chk.canonical()}
    if not args.no_timings:
        payload["timings"] = chk.timings
    _emit(args, payload, chk.text())
    if chk.claims and chk.claims[0]["id"] == "input" and not chk.claims[0]["pass"]:
        return EXIT_USAGE
    return EXIT_OK if chk.passed else EXIT_FAIL


def cmd_gap_export(args) -> int:
    an = _analysis(args)
    expected = None if args.no_expected else expected_block(an)
    script = gap.gap_script(an.G.pres, expected)
    if args.out:
        Path(args.out).write_text(script)
    else:
        print(script, end="")
    return EXIT_OK


def cmd_gap_import(args) -> int:
    an = _analysis(args)
    cmp = gap.gap_import(args.result, expected_block(an))
    _emit(args, cmp.to_dict())
    return EXIT_OK if cmp.agree else EXIT_FAIL


COMMANDS = {
    "construct": cmd_construct,
    "analyze": cmd_analyze,
    "autcent": cmd_autcent,
    "aut": cmd_aut,
    "props": cmd_props,
    "verify": cmd_verify,
    "gap-export": cmd_gap_export,
    "gap-import": cmd_gap_import,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _budget_env(args)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, PresentationError, PreconditionError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
