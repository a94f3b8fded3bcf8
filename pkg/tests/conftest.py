from __future__ import annotations

import random
from itertools import combinations, product

import pytest

from qfdecomp.core import Signature, Structure
from qfdecomp.qftypes import naive_qf_type

MIXED_SIGNATURE = Signature((("R", 2), ("S", 2), ("T", 3)))


def random_structure(rng: random.Random, max_size: int = 10, signature: Signature = MIXED_SIGNATURE,
                     density: float | None = None, size: int | None = None) -> Structure:
    size = size or rng.randint(1, max_size)
    rels = {}
    for name, arity in signature:
        space = size ** arity
        if density is None:
            count = rng.randint(0, min(space, size + 2))
        else:
            count = int(space * density)
        rels[name] = rng.sample(list(product(range(size), repeat=arity)), count) if count else []
    return Structure(signature, size, rels)


def random_base(rng: random.Random, s: Structure) -> frozenset[int]:
    k = rng.randint(0, s.size // 2)
    return frozenset(rng.sample(range(s.size), k))


def brute_census(s: Structure, base, max_len: int, delta=None) -> dict[int, tuple[int, int]]:
    """Census oracle: type every tuple (with repeats) using the naive evaluator."""
    rest = [e for e in range(s.size) if e not in set(base)]
    out = {}
    for n in range(1, max_len + 1):
        every, repfree = set(), set()
        for t in product(rest, repeat=n):
            ty = naive_qf_type(s, t, base, delta)
            every.add(ty)
            if len(set(t)) == n:
                repfree.add(ty)
        out[n] = (len(every), len(repfree))
    return out


def atom_truths(s: Structure, tup, base, relations) -> dict:
    """Truth value of every mixed atom, keyed by (relation, args) with args as ('V', i) / ('B', b)."""
    terms = [("V", i) for i in range(len(tup))] + [("B", b) for b in sorted(base)]
    out = {}
    for name, arity in s.signature:
        if name not in relations:
            continue
        for args in product(terms, repeat=arity):
            if all(kind == "B" for kind, _ in args):
                continue
            values = tuple(tup[x] if kind == "V" else x for kind, x in args)
            out[(name, args)] = values in s.tuple_sets[name]
    return out


def set_partitions(items: list):
    """All set partitions of ``items`` by recursive insertion (independent of RGS order)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for smaller in set_partitions(rest):
        yield [[first]] + smaller
        for i in range(len(smaller)):
            yield smaller[:i] + [[first] + smaller[i]] + smaller[i + 1:]


def all_base_partitions(size: int, k: int | None = None):
    """Every (base, parts) split of range(size), optionally with base and parts of size <= k."""
    for a in range(size + 1):
        if k is not None and a > k:
            break
        for base in combinations(range(size), a):
            rest = [e for e in range(size) if e not in base]
            for parts in set_partitions(rest):
                if k is None or all(len(p) <= k for p in parts):
                    yield frozenset(base), [frozenset(p) for p in parts]


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the summary prints every line at the end of the run."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(number: int, ok: bool, detail: str) -> None:
        lines.append(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        print(lines[-1])
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
