"""Quantifier-free types of tuples over a base set, and realized-type censuses.

A type records everything atomic about a tuple ``c`` relative to a base ``B``:
which coordinates are equal, which coordinates are base elements, and every
atom ``R(t_1, ..., t_r)`` true in the structure where each ``t_j`` is either a
variable slot ``V_i`` (standing for ``c[i]``) or a base element, with at least
one variable slot.  Atoms built from base elements alone are left out; they are
the same for every tuple over a fixed base.

Terms are encoded as ``(0, i)`` for the variable slot ``V_i`` and ``(1, b)`` for
base element ``b``, so sorting puts variables first.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Iterable, Sequence

from .core import Partition, RangeError, Signature, Structure

DEFAULT_BUDGET = 10 ** 7

Term = tuple[int, int]
Atom = tuple[str, tuple[Term, ...]]


class CensusTooLarge(RuntimeError):
    """The requested enumeration exceeds the tuple-evaluation budget."""

    def __init__(self, needed: int, budget: int):
        self.needed = needed
        self.budget = budget
        super().__init__(f"census too large: {needed} tuple evaluations exceed budget {budget}")


@dataclass(frozen=True)
class DeltaSpec:
    """Which relation symbols contribute atoms; ``None`` means all of them.

    Equality atoms are always part of a type.
    """

    included_relations: frozenset[str] | None = None

    @classmethod
    def full(cls) -> "DeltaSpec":
        return cls(None)

    @classmethod
    def of(cls, names: Iterable[str]) -> "DeltaSpec":
        return cls(frozenset(names))

    @classmethod
    def parse(cls, text: str | None) -> "DeltaSpec":
        if text is None or text.strip() in ("", "all"):
            return cls(None)
        return cls(frozenset(n.strip() for n in text.split(",") if n.strip()))

    def resolve(self, signature: Signature) -> frozenset[str]:
        if self.included_relations is None:
            return frozenset(signature.names)
        unknown = sorted(self.included_relations - set(signature.names))
        if unknown:
            raise ValueError(f"delta names relations not in the signature: {', '.join(unknown)}")
        return frozenset(self.included_relations)

    def __str__(self):
        if self.included_relations is None:
            return "all"
        return ",".join(sorted(self.included_relations))


def _relations(s: Structure, delta: DeltaSpec | None) -> frozenset[str]:
    if delta is None or delta.included_relations is None:
        return s.relation_names
    return delta.resolve(s.signature)


def term_str(t: Term) -> str:
    return f"V_{t[1]}" if t[0] == 0 else str(t[1])


def atom_str(atom: Atom) -> str:
    rel, args = atom
    return f"{rel}({','.join(term_str(t) for t in args)})"


@dataclass(frozen=True, order=True)
class QfType:
    length: int
    eq_classes: tuple[tuple[int, ...], ...]
    base_links: tuple[tuple[int, int], ...]
    atoms: tuple[Atom, ...]

    def canonical(self) -> str:
        eq = "[" + ",".join("{" + ",".join(map(str, c)) + "}" for c in self.eq_classes) + "]"
        links = "[" + ",".join(f"{i}:{b}" for i, b in self.base_links) + "]"
        atoms = "[" + ",".join(atom_str(a) for a in self.atoms) + "]"
        return f"eq={eq}|links={links}|atoms={atoms}"

    def __str__(self):
        return self.canonical()


def _check_args(s: Structure, tup: Sequence[int], base: Iterable[int]) -> tuple[tuple[int, ...], frozenset[int]]:
    tup = tuple(tup)
    base = frozenset(base)
    for e in (*tup, *base):
        if isinstance(e, bool) or not isinstance(e, int) or not 0 <= e < s.size:
            raise RangeError(f"element {e!r} outside universe [0, {s.size})")
    return tup, base


def _type(s: Structure, tup: tuple[int, ...], base: frozenset[int], rels: frozenset[str]) -> QfType:
    positions: dict[int, list[int]] = {}
    for i, e in enumerate(tup):
        positions.setdefault(e, []).append(i)
    eq = tuple(tuple(v) for v in positions.values())
    links = tuple((i, e) for i, e in enumerate(tup) if e in base)
    atoms = set()
    seen = set()
    incidence = s.incidence
    for e in positions:
        for rel, t in incidence.get(e, ()):
            if rel not in rels or (rel, t) in seen:
                continue
            seen.add((rel, t))
            options = []
            for x in t:
                opts = [(0, i) for i in positions.get(x, ())]
                if x in base:
                    opts.append((1, x))
                if not opts:
                    break
                options.append(opts)
            else:
                for args in product(*options):
                    if any(a[0] == 0 for a in args):
                        atoms.add((rel, args))
    return QfType(len(tup), eq, links, tuple(sorted(atoms)))


def qf_type(s: Structure, tup: Sequence[int], base: Iterable[int] = (), delta: DeltaSpec | None = None) -> QfType:
    """Canonical quantifier-free type of ``tup`` over ``base``.

    The tuple may meet the base; such coordinates show up in ``base_links``.
    """
    tup, base = _check_args(s, tup, base)
    return _type(s, tup, base, _relations(s, delta))


def naive_qf_type(s: Structure, tup: Sequence[int], base: Iterable[int] = (), delta: DeltaSpec | None = None) -> QfType:
    """Reference implementation of :func:`qf_type` that evaluates every mixed atom."""
    tup, base = _check_args(s, tup, base)
    rels = _relations(s, delta)
    k = len(tup)
    eq_classes = []
    for i in range(k):
        if all(tup[j] != tup[i] for j in range(i)):
            eq_classes.append(tuple(j for j in range(k) if tup[j] == tup[i]))
    links = tuple((i, tup[i]) for i in range(k) if tup[i] in base)
    # (term, value it denotes)
    terms = [((0, i), tup[i]) for i in range(k)] + [((1, b), b) for b in sorted(base)]
    atoms = []
    for rel, arity in s.signature:
        if rel not in rels:
            continue
        holding = s.tuple_sets[rel]
        for combo in product(terms, repeat=arity):
            if all(term[0] == 1 for term, _ in combo):
                continue
            if tuple(v for _, v in combo) in holding:
                atoms.append((rel, tuple(term for term, _ in combo)))
    return QfType(k, tuple(eq_classes), links, tuple(sorted(atoms)))


# -- census ---------------------------------------------------------------------

@dataclass
class CensusReport:
    base: frozenset[int]
    delta: DeltaSpec
    per_length: dict[int, tuple[int, int]] = field(default_factory=dict)  # len -> (count_all, count_repfree)

    @property
    def max_length(self) -> int:
        return max(self.per_length, default=0)

    def count_all(self, n: int) -> int:
        return self.per_length[n][0]

    def count_repfree(self, n: int) -> int:
        return self.per_length[n][1]

    def rows(self) -> list[tuple[int, int, int]]:
        return [(n, a, r) for n, (a, r) in sorted(self.per_length.items())]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["len", "count_all", "count_repfree"])
        w.writerows(self.rows())
        return buf.getvalue()


def stirling2(n: int, k: int) -> int:
    """Number of partitions of an n-set into k non-empty blocks."""
    return sum((-1) ** j * math.comb(k, j) * (k - j) ** n for j in range(k + 1)) // math.factorial(k)


def check_budget(domain_size: int, max_len: int, budget: int) -> None:
    needed = domain_size ** max_len
    if needed > budget:
        raise CensusTooLarge(needed, budget)


def census(s: Structure, base: Iterable[int] = (), max_len: int = 1, delta: DeltaSpec | None = None,
           budget: int = DEFAULT_BUDGET) -> CensusReport:
    """Count the distinct types over ``base`` realized by tuples from outside it.

    Only repetition-free tuples are typed.  A tuple with repeats is determined by
    its equality pattern together with the type of its distinct elements, so the
    count over all tuples of length n is ``sum_j S(n, j) * count_repfree(j)``.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    _, base = _check_args(s, (), base)
    delta = delta or DeltaSpec()
    rels = _relations(s, delta)
    rest = [e for e in range(s.size) if e not in base]
    check_budget(len(rest), max_len, budget)
    repfree = {}
    for n in range(1, max_len + 1):
        repfree[n] = len({_type(s, t, base, rels) for t in permutations(rest, n)})
    report = CensusReport(base, delta)
    for n in range(1, max_len + 1):
        count_all = sum(stirling2(n, j) * repfree[j] for j in range(1, n + 1))
        report.per_length[n] = (count_all, repfree[n])
    return report


def census_extended_base(s: Structure, part: Partition, J: Iterable[int], max_len: int = 1,
                         delta: DeltaSpec | None = None, budget: int = DEFAULT_BUDGET) -> CensusReport:
    """Census over the base enlarged by the parts indexed by ``J``."""
    J = sorted(set(J))
    for j in J:
        if not 0 <= j < len(part.parts):
            raise IndexError(f"part index {j} out of range (partition has {len(part.parts)} parts)")
    base = part.base.union(*(part.parts[j] for j in J))
    return census(s, base, max_len, delta, budget)


# -- unary expansions -----------------------------------------------------------

def expand_with_unary(s: Structure, colorings: Sequence[Iterable[int]]) -> Structure:
    """Append unary predicates ``U_1 .. U_u`` interpreted by ``colorings``.

    A name already in the signature gets a numeric suffix (``U_1_2``, ``U_1_3``, ...).
    """
    taken = set(s.signature.names)
    symbols = list(s.signature)
    relations = dict(s.relations)
    for i, coloring in enumerate(colorings, 1):
        _, members = _check_args(s, (), coloring)
        name = f"U_{i}"
        j = 2
        while name in taken:
            name = f"U_{i}_{j}"
            j += 1
        taken.add(name)
        symbols.append((name, 1))
        relations[name] = [(e,) for e in sorted(members)]
    return Structure(Signature(tuple(symbols)), s.size, relations, name=s.name)
