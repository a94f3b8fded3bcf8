"""Reproducible sweeps over generator families, emitted as CSV tables."""

from __future__ import annotations

import csv
import io
import math
from typing import Iterable, Sequence

from .core import FamilyParams, Structure, generate
from .decomp import find_decomposition
from .qftypes import DEFAULT_BUDGET, census

BOUNDEDNESS_COLUMNS = ["family", "m", "base_kind", "len", "count"]
LOWER_BOUND_COLUMNS = ["family", "m", "s", "base_kind", "len", "count"]
SWEEP_COLUMNS = ["family", "size_param", "k", "method", "found", "base_size", "max_part"]


def mated_transversal(m: int) -> list[int]:
    """One element from every pair of mated-pairs(m)."""
    return list(range(m))


def mated_closed_base(m: int) -> list[int]:
    """Whole pairs 0..ceil(m/2)-1 together with their mates: a union of Gaifman components."""
    h = (m + 1) // 2
    return list(range(h)) + list(range(m, m + h))


def class_transversal(m: int, s: int) -> list[int]:
    """The least element of each class of equivalence(m, s)."""
    return [c * s for c in range(m)]


def boundedness(ms: Iterable[int], max_len: int = 2, budget: int = DEFAULT_BUDGET) -> list[dict]:
    rows = []
    for m in ms:
        s = generate("mated-pairs", m=m)
        for kind, base in (("transversal", mated_transversal(m)), ("closed", mated_closed_base(m))):
            rep = census(s, base, max_len, budget=budget)
            for n in range(1, max_len + 1):
                rows.append({"family": "mated-pairs", "m": m, "base_kind": kind, "len": n,
                             "count": rep.count_all(n)})
    return rows


def lower_bound(ms: Iterable[int], s: int = 3, max_len: int = 2, budget: int = DEFAULT_BUDGET) -> list[dict]:
    rows = []
    for m in ms:
        st = generate("equivalence", m=m, s=s)
        rep = census(st, class_transversal(m, s), max_len, budget=budget)
        for n in range(1, max_len + 1):
            rows.append({"family": "equivalence", "m": m, "s": s, "base_kind": "transversal", "len": n,
                         "count": rep.count_all(n)})
    return rows


def default_k(structure: Structure) -> int:
    return math.ceil(math.sqrt(structure.size)) + 1


_SIZE_PARAM = {"mated-pairs": "m", "equivalence": "m", "two-class": "s", "unary-cube": "u"}


def decomposition_sweep(family: str, sizes: Iterable[int], ks: Sequence[int] | None = None,
                        method: str = "components", max_len: int = 2, extra: dict | None = None,
                        budget: int = DEFAULT_BUDGET) -> list[dict]:
    """Run the decomposition search on ``family`` at each size parameter and each k.

    With no ``ks`` the budget is ceil(sqrt(|universe|)) + 1.
    """
    rows = []
    for size in sizes:
        params = dict(extra or {})
        params[_SIZE_PARAM.get(family, "n")] = size
        st = generate(FamilyParams(family, **params))
        for k in (ks or [default_k(st)]):
            found = find_decomposition(st, k, max_len, method, budget=budget)
            rows.append({
                "family": family, "size_param": size, "k": k, "method": method,
                "found": "found" if found else "absent",
                "base_size": len(found.partition.base) if found else "",
                "max_part": max((len(p) for p in found.partition.parts), default=0) if found else "",
            })
    return rows


def to_csv(rows: list[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, columns, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()
