"""GAP script export and result import for external cross-checks.

The script rebuilds the group as a finitely presented group on the
presentation's relators, takes its class-2 ``p``-quotient (which is the group
itself), and prints a block of ``key=value`` lines between markers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .presentation import PcPresentation

BEGIN = "PC2-RESULT-BEGIN"
END = "PC2-RESULT-END"
KEYS = ("Size", "Exponent", "AutSize", "AutAbelian")


def _gap_power(i: int, e: int) -> str:
    return f"f.{i + 1}" if e == 1 else f"f.{i + 1}^{e}"


def gap_relators(pres: PcPresentation) -> list[str]:
    rels = [_gap_power(i, m) for i, m in enumerate(pres.moduli)]
    for l in range(pres.ngens):
        for j in range(l):
            w = pres.commutator_value(l, j)
            word = "*".join(_gap_power(m, e) for m, e in enumerate(w) if e)
            c = f"Comm(f.{l + 1},f.{j + 1})"
            rels.append(c if not word else f"{c}*({word})^-1")
    return rels


def gap_script(pres: PcPresentation, expected: dict | None = None) -> str:
    lines = []
    if expected:
        lines.append("# expected result block:")
        lines.append(f"# {BEGIN}")
        for k in KEYS:
            if k in expected:
                lines.append(f"# {k}={_fmt(expected[k])}")
        lines.append(f"# {END}")
    lines += [
        'LoadPackage("autpgrp");',
        f"f := FreeGroup({pres.ngens});",
        "rels := [",
        ",\n".join(f"  {r}" for r in gap_relators(pres)),
        "];",
        "g := f / rels;",
        f"G := Image(EpimorphismPGroup(g, {pres.p}, 2));",
        "A := AutomorphismGroup(G);",
        f'Print("{BEGIN}\\n");',
        'Print("Size=", Size(G), "\\n");',
        'Print("Exponent=", Exponent(G), "\\n");',
        'Print("AutSize=", Size(A), "\\n");',
        'Print("AutAbelian=", IsAbelian(A), "\\n");',
        f'Print("{END}\\n");',
        "QUIT;",
        "",
    ]
    return "\n".join(lines)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def gap_export(pres: PcPresentation, path: str | Path, expected: dict | None = None) -> Path:
    path = Path(path)
    path.write_text(gap_script(pres, expected))
    return path


_LINE = re.compile(r"^\s*#?\s*(\w+)\s*=\s*(true|false|-?\d+)\s*$")


def parse_result_block(text: str) -> dict:
    """Last ``BEGIN``/``END`` block in GAP output (comment markers allowed)."""
    blocks = re.findall(rf"{BEGIN}(.*?){END}", text, flags=re.S)
    if not blocks:
        raise ValueError("no result block found")
    out: dict = {}
    for line in blocks[-1].splitlines():
        m = _LINE.match(line)
        if not m:
            continue
        key, val = m.groups()
        out[key] = (val == "true") if val in ("true", "false") else int(val)
    return out


@dataclass
class GapComparison:
    agree: bool
    rows: list[dict]

    def to_dict(self) -> dict:
        return {"agree": self.agree, "rows": self.rows}


def compare(external: dict, expected: dict) -> GapComparison:
    rows = []
    for k in KEYS:
        if k in external and k in expected:
            rows.append({"key": k, "external": external[k], "computed": expected[k],
                         "pass": external[k] == expected[k]})
    agree = bool(rows) and all(r["pass"] for r in rows)
    return GapComparison(agree, rows)


def gap_import(path: str | Path, expected: dict) -> GapComparison:
    return compare(parse_result_block(Path(path).read_text()), expected)
