"""Partitions of a structure, the block-equivalence of tuples, congruence checks
and decomposition search.

Two repetition-free tuples avoiding the base are equivalent when their
coordinates fall into parts in the same index pattern (each part contributes
one block of coordinates, in position order) and corresponding blocks have
equal types over the base.  A partition is a congruence when equivalent tuples
always have equal full types over the base.

A partition whose parts are exactly the Gaifman components over its base is a
congruence at every length: an atom whose variables meet two parts would be
witnessed by a relation tuple joining two components, so cross-part atoms are
false and the full type is a function of the blockwise types.  Verdicts for such
partitions therefore carry an ``all-lengths`` certificate; every other verdict
only covers the lengths actually checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterable, Iterator, NamedTuple, Sequence

from .core import (Partition, PartitionError, RangeError, Structure, components_over, gaifman,
                   graph_components)
from .qftypes import DEFAULT_BUDGET, DeltaSpec, QfType, _relations, _type, atom_str, check_budget, naive_qf_type

__all__ = [
    "Partition", "PartitionError", "SimKey", "SimError", "Counterexample", "CongruenceVerdict",
    "Decomposition", "SearchTooLarge", "sim_key", "sim_equivalent", "is_congruence",
    "naive_is_congruence", "component_partition", "satisfies_budget", "find_decomposition",
    "count_sim_classes", "ma_degree", "restricted_growth_strings",
]

ALL_LENGTHS = "all-lengths"
EXHAUSTIVE_LIMIT = 10


class SimError(ValueError):
    """Tuple outside the domain of the block equivalence."""


class SearchTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class SimKey:
    index_partition: tuple[tuple[int, ...], ...]
    block_types: tuple[QfType, ...]


@dataclass(frozen=True)
class Counterexample:
    c: tuple[int, ...]
    d: tuple[int, ...]
    atom: str

    def __str__(self):
        return f"c=({','.join(map(str, self.c))}) d=({','.join(map(str, self.d))}) atom={self.atom}"


@dataclass(frozen=True)
class CongruenceVerdict:
    holds: bool
    checked_max_len: int
    certificate_level: str  # "all-lengths" or "up-to-<n>"
    counterexample: Counterexample | None = None

    def format(self) -> str:
        return "\n".join([
            f"holds: {'true' if self.holds else 'false'}",
            f"checked_max_len: {self.checked_max_len}",
            f"certificate_level: {self.certificate_level}",
            f"counterexample: {self.counterexample if self.counterexample else 'none'}",
        ]) + "\n"


class Decomposition(NamedTuple):
    partition: Partition
    verdict: CongruenceVerdict


# -- block equivalence ----------------------------------------------------------------

class _KeyMaker:
    """Computes SimKeys for one partition, memoizing block types."""

    def __init__(self, s: Structure, part: Partition, rels: frozenset[str]):
        self.s = s
        self.base = part.base
        self.rels = rels
        self.owner = part.part_of()
        self.memo: dict[tuple[int, ...], QfType] = {}

    def __call__(self, tup: tuple[int, ...]) -> SimKey:
        blocks: dict[int, list[int]] = {}
        for i, e in enumerate(tup):
            blocks.setdefault(self.owner[e], []).append(i)
        index_partition = tuple(tuple(b) for b in blocks.values())
        types = []
        for b in index_partition:
            sub = tuple(tup[i] for i in b)
            ty = self.memo.get(sub)
            if ty is None:
                ty = self.memo[sub] = _type(self.s, sub, self.base, self.rels)
            types.append(ty)
        return SimKey(index_partition, tuple(types))

    def checked(self, tup: Sequence[int]) -> SimKey:
        tup = tuple(tup)
        if len(set(tup)) != len(tup):
            raise SimError(f"tuple {tup} has a repeated element")
        for e in tup:
            if e in self.base:
                raise SimError(f"element {e} lies in the base")
            if e not in self.owner:
                raise RangeError(f"element {e!r} is not covered by the partition")
        return self(tup)


def sim_key(s: Structure, part: Partition, tup: Sequence[int], delta: DeltaSpec | None = None) -> SimKey:
    return _KeyMaker(s, part, _relations(s, delta)).checked(tup)


def sim_equivalent(s: Structure, part: Partition, c: Sequence[int], d: Sequence[int],
                   delta: DeltaSpec | None = None) -> bool:
    if len(c) != len(d):
        raise ValueError("tuples must have equal length")
    km = _KeyMaker(s, part, _relations(s, delta))
    return km.checked(c) == km.checked(d)


def count_sim_classes(s: Structure, part: Partition, max_len: int = 1, delta: DeltaSpec | None = None,
                      avoid: Iterable[int] = (), budget: int = DEFAULT_BUDGET) -> dict[int, int]:
    """Number of equivalence classes of repetition-free tuples drawn from parts outside ``avoid``."""
    part.check(s)
    avoid = set(avoid)
    elems = sorted(e for i, p in enumerate(part.parts) if i not in avoid for e in p)
    check_budget(len(elems), max_len, budget)
    km = _KeyMaker(s, part, _relations(s, delta))
    return {n: len({km(t) for t in permutations(elems, n)}) for n in range(1, max_len + 1)}


# -- congruence ---------------------------------------------------------------------

def _distinguishing_atom(a: QfType, b: QfType) -> str:
    diff = sorted(set(a.atoms) ^ set(b.atoms))
    if diff:
        return atom_str(diff[0])
    if a.eq_classes != b.eq_classes:
        return "equality pattern"
    return "base links"


def _level(s: Structure, part: Partition, n: int) -> str:
    return ALL_LENGTHS if list(part.parts) == components_over(s, part.base) else f"up-to-{n}"


def is_congruence(s: Structure, part: Partition, max_len: int = 3, delta: DeltaSpec | None = None,
                  budget: int = DEFAULT_BUDGET) -> CongruenceVerdict:
    """Group tuples of each length by SimKey and require a constant full type per group.

    Tuples are visited in lexicographic order; a failure reports the first tuple of
    its group and the first tuple that disagrees with it.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    part.check(s)
    rels = _relations(s, delta)
    rest = sorted(e for p in part.parts for e in p)
    check_budget(len(rest), max_len, budget)
    km = _KeyMaker(s, part, rels)
    for n in range(1, max_len + 1):
        groups: dict[SimKey, tuple[tuple[int, ...], QfType]] = {}
        for t in permutations(rest, n):
            key = km(t)
            ty = _type(s, t, part.base, rels)
            first = groups.get(key)
            if first is None:
                groups[key] = (t, ty)
            elif first[1] != ty:
                cx = Counterexample(first[0], t, _distinguishing_atom(first[1], ty))
                return CongruenceVerdict(False, max_len, f"up-to-{max_len}", cx)
    return CongruenceVerdict(True, max_len, _level(s, part, max_len))


def naive_is_congruence(s: Structure, part: Partition, max_len: int = 3, delta: DeltaSpec | None = None,
                        budget: int = DEFAULT_BUDGET) -> CongruenceVerdict:
    """Reference check: compare every pair of tuples directly (quadratic)."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    part.check(s)
    rest = sorted(e for p in part.parts for e in p)
    check_budget(len(rest), max_len, budget)
    which = {e: i for i, p in enumerate(part.parts) for e in p}

    def blocks(t):
        labels = [which[e] for e in t]
        pattern = tuple(tuple(j for j in range(len(t)) if labels[j] == labels[i])
                        for i in range(len(t)) if labels[i] not in labels[:i])
        return pattern, tuple(naive_qf_type(s, [t[j] for j in b], part.base, delta) for b in pattern)

    for n in range(1, max_len + 1):
        tuples = list(permutations(rest, n))
        info = [(blocks(t), naive_qf_type(s, t, part.base, delta)) for t in tuples]
        for i in range(len(tuples)):
            for j in range(i + 1, len(tuples)):
                if info[i][0] == info[j][0] and info[i][1] != info[j][1]:
                    cx = Counterexample(tuples[i], tuples[j], _distinguishing_atom(info[i][1], info[j][1]))
                    return CongruenceVerdict(False, max_len, f"up-to-{max_len}", cx)
    return CongruenceVerdict(True, max_len, f"up-to-{max_len}")


# -- decompositions -----------------------------------------------------------------------

def component_partition(s: Structure, base: Iterable[int] = ()) -> Partition:
    base = frozenset(base)
    return Partition(base, tuple(components_over(s, base)))


def satisfies_budget(part: Partition, k: int) -> bool:
    return len(part.base) <= k and all(len(p) <= k for p in part.parts)


def ma_degree(s: Structure) -> dict[str, int]:
    """Per relation, the largest number of tuples sharing one element in one slot."""
    out = {}
    for rel, arity in s.signature:
        best = 0
        for slot in range(arity):
            counts: dict[int, int] = {}
            for t in s.tuple_sets[rel]:
                counts[t[slot]] = counts.get(t[slot], 0) + 1
            best = max(best, max(counts.values(), default=0))
        out[rel] = best
    return out


def _connected_subset(adj, comp: frozenset[int], size: int) -> list[int]:
    start = min(comp)
    order = [start]
    seen = {start}
    i = 0
    while len(order) < size:
        for w in sorted(adj[order[i]]):
            if w in comp and w not in seen:
                seen.add(w)
                order.append(w)
                if len(order) == size:
                    break
        i += 1
    return order


def integrity_bases(s: Structure, k: int, max_base: int) -> list[frozenset[int]]:
    """All bases of minimum size (at most ``max_base``) leaving Gaifman components of size <= k.

    Any such base must hit every connected set of k+1 vertices, so the search
    branches on the members of one such set inside an oversized component.
    """
    adj = gaifman(s).adjacency
    universe = range(s.size)

    def search(base: frozenset[int], left: int, found: set):
        comps = graph_components(adj, (v for v in universe if v not in base))
        big = next((c for c in comps if len(c) > k), None)
        if big is None:
            found.add(base)
            return
        if left == 0:
            return
        for v in sorted(_connected_subset(adj, big, k + 1)):
            search(base | {v}, left - 1, found)

    for d in range(max_base + 1):
        found: set[frozenset[int]] = set()
        search(frozenset(), d, found)
        if found:
            return sorted(found, key=sorted)
    return []


def restricted_growth_strings(n: int, max_block: int | None = None) -> Iterator[tuple[int, ...]]:
    """Set partitions of n items as restricted growth strings, in lexicographic order."""
    limit = max_block if max_block is not None else n
    rgs = [0] * n
    sizes: list[int] = []

    def rec(i: int):
        if i == n:
            yield tuple(rgs)
            return
        for b in range(len(sizes) + 1):
            if b == len(sizes):
                sizes.append(0)
            if sizes[b] < limit:
                sizes[b] += 1
                rgs[i] = b
                yield from rec(i + 1)
                sizes[b] -= 1
            if sizes[b] == 0:
                sizes.pop()

    if n == 0:
        yield ()
    else:
        yield from rec(0)


def _profile(s: Structure, base: frozenset[int]):
    sizes = sorted((len(c) for c in components_over(s, base)), reverse=True)
    return sizes, sorted(base)


def find_decomposition(s: Structure, k: int, max_len: int = 3, method: str = "components",
                       delta: DeltaSpec | None = None, empty_base: bool = False,
                       exhaustive_limit: int = EXHAUSTIVE_LIMIT,
                       budget: int = DEFAULT_BUDGET) -> Decomposition | None:
    """Search for a partition with base and parts of size at most ``k`` that is a congruence.

    ``components`` finds a smallest base whose Gaifman components all have at most
    ``k`` elements (ties broken by the component size profile, then the base
    itself) and returns that component partition; it never misses such a base but
    ignores non-component partitions.  ``exhaustive`` tries bases by size and then
    lexicographically, and every partition of the rest into parts of size at most
    ``k``, returning the first that passes :func:`is_congruence` up to ``max_len``.
    ``empty_base`` forces the base to be empty.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    max_base = 0 if empty_base else min(k, s.size)
    if method == "components":
        bases = integrity_bases(s, k, max_base)
        if not bases:
            return None
        base = min(bases, key=lambda b: _profile(s, b))
        part = component_partition(s, base)
        return Decomposition(part, is_congruence(s, part, max_len, delta, budget))
    if method == "exhaustive":
        if s.size > exhaustive_limit:
            raise SearchTooLarge(f"exhaustive search limited to {exhaustive_limit} elements, structure has {s.size}")
        for a in range(max_base + 1):
            for base in combinations(range(s.size), a):
                rest = [e for e in range(s.size) if e not in base]
                for rgs in restricted_growth_strings(len(rest), k):
                    parts: dict[int, set[int]] = {}
                    for e, b in zip(rest, rgs):
                        parts.setdefault(b, set()).add(e)
                    part = Partition(frozenset(base), tuple(frozenset(p) for p in parts.values()))
                    verdict = is_congruence(s, part, max_len, delta, budget)
                    if verdict.holds:
                        return Decomposition(part, verdict)
        return None
    raise ValueError(f"unknown method {method!r}; expected 'components' or 'exhaustive'")
