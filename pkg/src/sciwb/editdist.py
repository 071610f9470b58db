"""Sequence edit distance and minimal edit scripts.

Distance calls go through a compiled kernel when the optional extension
built, with a pure-Python twin selected at import time otherwise. Set
SCIWB_PURE_PYTHON=1 (before import) to force the fallback; the two
backends are interchangeable and parity-tested. The edit-script backtrace
runs once per critique against a single nearest case, so it stays in
Python.
"""

from __future__ import annotations

import os
from array import array
from dataclasses import dataclass
from typing import Hashable, Optional, Sequence

try:
    from sciwb import _speedups
except ImportError:
    _speedups = None


def levenshtein_py(a: Sequence[Hashable], b: Sequence[Hashable]) -> int:
    """Two-row dynamic program, unit insert/delete/substitute costs."""
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    prev = list(range(lb + 1))
    curr = [0] * (lb + 1)
    for i in range(1, la + 1):
        curr[0] = i
        ai = a[i - 1]
        for j in range(1, lb + 1):
            sub = prev[j - 1] + (0 if ai == b[j - 1] else 1)
            dele = prev[j] + 1
            ins = curr[j - 1] + 1
            curr[j] = sub if sub <= dele and sub <= ins else (dele if dele <= ins else ins)
        prev, curr = curr, prev
    return prev[lb]


def _encode(a: Sequence[Hashable], b: Sequence[Hashable]) -> tuple[array, array]:
    codes: dict[Hashable, int] = {}
    ea = array("i", (codes.setdefault(s, len(codes)) for s in a))
    eb = array("i", (codes.setdefault(s, len(codes)) for s in b))
    return ea, eb


def _levenshtein_c(a: Sequence[Hashable], b: Sequence[Hashable]) -> int:
    ea, eb = _encode(a, b)
    return _speedups.levenshtein_i32(ea, eb)


if _speedups is not None and os.environ.get("SCIWB_PURE_PYTHON") != "1":
    BACKEND = "c"
    levenshtein = _levenshtein_c
else:
    BACKEND = "python"
    levenshtein = levenshtein_py


@dataclass(frozen=True)
class EditOp:
    """One step turning a source sequence into a target.

    ``pos`` indexes the *source*: delete/substitute act on source[pos],
    insert places ``new`` before source[pos] (pos == len(source) appends).
    """

    kind: str  # "insert" | "delete" | "substitute"
    pos: int
    old: Optional[Hashable] = None
    new: Optional[Hashable] = None


def edit_script(a: Sequence[Hashable], b: Sequence[Hashable]) -> tuple[EditOp, ...]:
    """A minimal edit script from ``a`` to ``b``; len(script) == levenshtein(a, b).

    Backtrace preference is fixed (match, substitute, delete, insert) so the
    script is deterministic for a given pair.
    """
    la, lb = len(a), len(b)
    d = [[0] * (lb + 1) for _ in range(la + 1)]
    for i in range(la + 1):
        d[i][0] = i
    for j in range(lb + 1):
        d[0][j] = j
    for i in range(1, la + 1):
        ai = a[i - 1]
        row = d[i]
        prow = d[i - 1]
        for j in range(1, lb + 1):
            cost = 0 if ai == b[j - 1] else 1
            row[j] = min(prow[j - 1] + cost, prow[j] + 1, row[j - 1] + 1)

    ops: list[EditOp] = []
    i, j = la, lb
    while i > 0 or j > 0:
        if i > 0 and j > 0 and a[i - 1] == b[j - 1] and d[i][j] == d[i - 1][j - 1]:
            i -= 1
            j -= 1
        elif i > 0 and j > 0 and d[i][j] == d[i - 1][j - 1] + 1:
            ops.append(EditOp("substitute", i - 1, old=a[i - 1], new=b[j - 1]))
            i -= 1
            j -= 1
        elif i > 0 and d[i][j] == d[i - 1][j] + 1:
            ops.append(EditOp("delete", i - 1, old=a[i - 1]))
            i -= 1
        else:
            ops.append(EditOp("insert", i, new=b[j - 1]))
            j -= 1
    ops.reverse()
    return tuple(ops)


def apply_script(a: Sequence[Hashable], script: Sequence[EditOp]) -> list:
    """Apply an edit_script to its source; used to sanity-check scripts."""
    out: list = []
    k = 0
    for op in script:
        while k < op.pos:
            out.append(a[k])
            k += 1
        if op.kind == "insert":
            out.append(op.new)
        elif op.kind == "delete":
            k += 1
        elif op.kind == "substitute":
            out.append(op.new)
            k += 1
        else:
            raise ValueError(f"unknown edit op kind {op.kind!r}")
    out.extend(a[k:])
    return out
