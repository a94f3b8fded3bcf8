import random
from itertools import chain, combinations, permutations, product

import pytest
from hypothesis import given, settings, strategies as st

from conftest import all_base_partitions, random_base, random_structure, set_partitions
from qfdecomp.core import (Partition, PartitionError, Signature, Structure, components_over, dumps_partition,
                           generate, load_partition, loads_partition, save_partition)
from qfdecomp.decomp import (SearchTooLarge, SimError, component_partition, count_sim_classes, find_decomposition,
                             is_congruence, ma_degree, naive_is_congruence, restricted_growth_strings,
                             satisfies_budget, sim_equivalent, sim_key)
from qfdecomp.qftypes import DeltaSpec, census_extended_base, naive_qf_type, qf_type

BINARY = Signature((("R", 2),))


def P(base, *parts):
    return Partition(frozenset(base), tuple(frozenset(p) for p in parts))


E24 = generate("equivalence", m=2, s=4)
SPLIT = P((), {0, 1, 4, 5}, {2, 3, 6, 7})


def sim_classes_oracle(s, part, n, avoid=()):
    """Count classes by the literal definition: same part pattern, equal naive block types."""
    which = {e: i for i, p in enumerate(part.parts) for e in p}
    elems = [e for i, p in enumerate(part.parts) if i not in avoid for e in p]
    keys = set()
    for t in permutations(elems, n):
        labels = [which[e] for e in t]
        pattern = []
        for lab in dict.fromkeys(labels):
            pattern.append(tuple(i for i in range(n) if labels[i] == lab))
        keys.add((tuple(pattern), tuple(naive_qf_type(s, [t[i] for i in b], part.base) for b in pattern)))
    return len(keys)


# -- partitions --------------------------------------------------------------------------

def test_partition_canonical_order_and_file(tmp_path):
    part = P({5, 1}, {4, 3}, {0, 2})
    assert part.parts == (frozenset({0, 2}), frozenset({3, 4}))
    assert dumps_partition(part) == '{\n  "base": [1, 5],\n  "parts": [\n    [0, 2],\n    [3, 4]\n  ]\n}\n'
    save_partition(part, tmp_path / "p.json")
    assert load_partition(tmp_path / "p.json", generate("path", n=6)) == part


def test_partition_must_cover_disjointly():
    s = generate("path", n=4)
    with pytest.raises(PartitionError):
        P({0}, {1, 2}).check(s)
    with pytest.raises(PartitionError):
        loads_partition('{"base": [0], "parts": [[0, 1], [2, 3]]}')
    with pytest.raises(PartitionError):
        P((), {0, 1, 2, 3, 4}).check(s)
    with pytest.raises(PartitionError):
        P((), set())


# -- block equivalence ----------------------------------------------------------------------------

def test_sim_key_cross_part():
    key = sim_key(E24, SPLIT, (0, 2))
    assert key.index_partition == ((0,), (1,))
    assert key.block_types[0] == key.block_types[1]


def test_sim_key_same_part():
    key = sim_key(E24, SPLIT, (0, 1))
    assert key.index_partition == ((0, 1),)
    assert key.block_types[0].length == 2


def test_sim_key_rejects_repeats_and_base():
    with pytest.raises(SimError, match="repeated"):
        sim_key(E24, SPLIT, (0, 0))
    with pytest.raises(SimError, match="base"):
        sim_key(E24, P({0}, {1, 4, 5}, {2, 3, 6, 7}), (0, 2))


def test_sim_equivalent_examples():
    assert sim_equivalent(E24, SPLIT, (0, 2), (0, 6))
    assert not sim_equivalent(E24, SPLIT, (0, 2), (0, 1))
    assert sim_equivalent(E24, SPLIT, (3, 6, 1), (3, 6, 1))
    with pytest.raises(ValueError):
        sim_equivalent(E24, SPLIT, (0,), (0, 1))


def test_sim_is_an_equivalence_relation():
    rng = random.Random(29)
    for _ in range(15):
        s = random_structure(rng, 6)
        base = random_base(rng, s)
        rest = [e for e in range(s.size) if e not in base]
        parts = list(set_partitions(rest))
        part = Partition(base, tuple(frozenset(p) for p in rng.choice(parts))) if rest else Partition(base, ())
        tuples = list(permutations(rest, 2))
        rel = {(c, d): sim_equivalent(s, part, c, d) for c in tuples for d in tuples}
        for c in tuples:
            assert rel[c, c]
            for d in tuples:
                assert rel[c, d] == rel[d, c]
                for e in tuples:
                    if rel[c, d] and rel[d, e]:
                        assert rel[c, e]


def test_count_sim_classes_examples():
    s = generate("equivalence", m=3, s=2)
    part = component_partition(s, ())
    assert count_sim_classes(s, part, 2) == {1: 1, 2: 2}
    assert count_sim_classes(s, part, 2) == {n: sim_classes_oracle(s, part, n) for n in (1, 2)}
    full = P(range(6))
    assert count_sim_classes(s, full, 2) == {1: 0, 2: 0}


def test_count_sim_classes_length_one_is_type_count():
    rng = random.Random(31)
    for _ in range(20):
        s = random_structure(rng, 7)
        part = component_partition(s, random_base(rng, s))
        avoid = {i for i in range(len(part.parts)) if rng.random() < 0.3}
        elems = [e for i, p in enumerate(part.parts) if i not in avoid for e in p]
        assert count_sim_classes(s, part, 1, avoid=avoid)[1] == len({qf_type(s, (e,), part.base) for e in elems})
        assert count_sim_classes(s, part, 3, avoid=avoid)[3] == sim_classes_oracle(s, part, 3, avoid)


# -- congruence -------------------------------------------------------------------------------------------

def test_class_splitting_partition_fails():
    v = is_congruence(E24, SPLIT, 2)
    assert not v.holds
    assert (v.counterexample.c, v.counterexample.d, v.counterexample.atom) == ((0, 2), (0, 6), "E(V_0,V_1)")
    assert v.certificate_level == "up-to-2"
    assert v.format() == ("holds: false\nchecked_max_len: 2\ncertificate_level: up-to-2\n"
                          "counterexample: c=(0,2) d=(0,6) atom=E(V_0,V_1)\n")


def test_counterexamples_are_genuine():
    for checker in (is_congruence, naive_is_congruence):
        cx = checker(E24, SPLIT, 2).counterexample
        assert sim_equivalent(E24, SPLIT, cx.c, cx.d)
        assert qf_type(E24, cx.c, ()) != qf_type(E24, cx.d, ())
        rel, args = cx.atom.split("(")[0], cx.atom[:-1].split("(")[1].split(",")
        val = lambda t: tuple(t[int(a[2:])] if a.startswith("V_") else int(a) for a in args)  # noqa: E731
        assert E24.holds(rel, val(cx.c)) != E24.holds(rel, val(cx.d))


def test_vacuous_partition_holds():
    s = generate("cycle", n=4)
    for checker in (is_congruence, naive_is_congruence):
        assert checker(s, P(range(4)), 3).holds


def test_complete_graph_homogeneous_partition():
    v = is_congruence(generate("complete", n=5), P((), {0, 1}, {2, 3}, {4}), 4)
    assert v.holds and v.certificate_level == "up-to-4"


def test_component_partitions_get_all_lengths_certificate():
    s = generate("two-class", s=4)
    assert is_congruence(s, component_partition(s, ()), 3).certificate_level == "all-lengths"
    assert naive_is_congruence(s, component_partition(s, ()), 3).certificate_level == "up-to-3"


def test_invalid_partition_rejected():
    with pytest.raises(PartitionError):
        is_congruence(generate("path", n=3), P((), {0, 1}), 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([None, ("R",), ("S", "T"), ()]))
def test_component_congruence_theorem(seed, names):
    rng = random.Random(seed)
    s = random_structure(rng, 8)
    delta = None if names is None else DeltaSpec.of(names)
    v = is_congruence(s, component_partition(s, random_base(rng, s)), 3, delta)
    assert v.holds and v.certificate_level == "all-lengths"


def test_naive_agrees_exhaustively_on_size_three():
    pairs = list(product(range(3), repeat=2))
    outcomes = set()
    for size in (1, 2, 3):
        cells = [p for p in pairs if max(p) < size]
        for mask in range(2 ** len(cells)):
            s = Structure(BINARY, size, {"R": [c for i, c in enumerate(cells) if mask >> i & 1]})
            for base, parts in all_base_partitions(size):
                part = Partition(base, tuple(parts))
                holds = is_congruence(s, part, 3).holds
                assert holds == naive_is_congruence(s, part, 3).holds
                outcomes.add(holds)
    assert outcomes == {True, False}


def test_naive_agrees_on_random_binary_structures():
    rng = random.Random(37)
    for size in (4, 5, 6):
        n = 3 if size < 6 else 2
        for _ in range(3):
            s = random_structure(rng, signature=BINARY, size=size, density=rng.choice([0.1, 0.25, 0.5]))
            partitions = list(all_base_partitions(size))
            for base, parts in rng.sample(partitions, min(len(partitions), 60)):
                part = Partition(base, tuple(parts))
                assert is_congruence(s, part, n).holds == naive_is_congruence(s, part, n).holds


# -- counting bound --------------------------------------------------------------------------------------

def test_counting_bound_on_component_decompositions():
    rng = random.Random(41)
    for _ in range(25):
        s = random_structure(rng, 8)
        part = component_partition(s, random_base(rng, s))
        idx = range(len(part.parts))
        for J in chain.from_iterable(combinations(idx, r) for r in range(len(part.parts) + 1)):
            rep = census_extended_base(s, part, J, 3)
            bound = count_sim_classes(s, part, 3, avoid=J)
            for n in (1, 2, 3):
                assert rep.count_repfree(n) <= bound[n]


# -- component partitions and budgets ------------------------------------------------------------------

def test_component_partition_examples():
    assert component_partition(generate("path", n=5), {2}).parts == (frozenset({0, 1}), frozenset({3, 4}))
    mp = component_partition(generate("mated-pairs", m=3), ())
    assert [len(p) for p in mp.parts] == [2, 2, 2]
    eq = component_partition(generate("equivalence", m=3, s=2), {0, 2, 4})
    assert eq.parts == (frozenset({1}), frozenset({3}), frozenset({5}))


def test_satisfies_budget_examples():
    part = component_partition(generate("path", n=9), {2, 5})
    assert sorted(len(p) for p in part.parts) == [2, 2, 3]
    assert satisfies_budget(part, 3)
    assert not satisfies_budget(part, 2)
    assert satisfies_budget(P(range(7)), 7)


# -- search ----------------------------------------------------------------------------------------------

def test_find_path9():
    found = find_decomposition(generate("path", n=9), 3)
    assert found.partition.base == {2, 5}
    assert sorted(len(p) for p in found.partition.parts) == [2, 2, 3]
    assert found.verdict.certificate_level == "all-lengths"
    assert find_decomposition(generate("path", n=9), 2) is None


def test_find_complete5():
    s = generate("complete", n=5)
    assert find_decomposition(s, 2) is None
    found = find_decomposition(s, 2, 4, "exhaustive")
    assert found.partition == P((), {0, 1}, {2, 3}, {4})
    assert found.verdict.certificate_level == "up-to-4"


def test_find_star7():
    found = find_decomposition(generate("star", n=7), 1)
    assert found.partition.base == {0}
    assert len(found.partition.parts) == 6


def test_find_empty_base_two_class():
    found = find_decomposition(generate("two-class", s=3), 3, empty_base=True)
    assert found.partition == P((), {0, 1, 2}, {3, 4, 5})
    assert find_decomposition(generate("path", n=5), 3, empty_base=True) is None


def test_exhaustive_size_limit():
    with pytest.raises(SearchTooLarge):
        find_decomposition(generate("path", n=11), 3, 2, "exhaustive")
    with pytest.raises(ValueError):
        find_decomposition(generate("path", n=3), 1, 2, "bogus")


def test_components_search_is_sound():
    rng = random.Random(43)
    for _ in range(40):
        s = random_structure(rng, 10)
        k = rng.randint(1, 4)
        found = find_decomposition(s, k, 2)
        if found:
            assert satisfies_budget(found.partition, k)
            assert list(found.partition.parts) == components_over(s, found.partition.base)
            assert found.verdict.holds and found.verdict.certificate_level == "all-lengths"


def test_components_search_finds_minimum_base():
    rng = random.Random(47)
    for _ in range(30):
        s = random_structure(rng, 7)
        k = rng.randint(1, 3)
        best = None
        for a in range(min(k, s.size) + 1):
            if any(all(len(c) <= k for c in components_over(s, b)) for b in combinations(range(s.size), a)):
                best = a
                break
        found = find_decomposition(s, k, 1)
        assert (found is None) == (best is None)
        if found:
            assert len(found.partition.base) == best


def test_components_search_monotone_in_k():
    rng = random.Random(53)
    for _ in range(30):
        s = random_structure(rng, 9)
        results = [find_decomposition(s, k, 1) is not None for k in range(1, 6)]
        assert results == sorted(results)


def test_exhaustive_search_is_complete():
    rng = random.Random(59)
    for _ in range(12):
        s = random_structure(rng, 5, BINARY)
        k, n = rng.randint(1, 2), 2
        found = find_decomposition(s, k, n, "exhaustive")
        exists = any(naive_is_congruence(s, Partition(b, tuple(ps)), n).holds
                     for b, ps in all_base_partitions(s.size, k))
        assert (found is not None) == exists
        if found:
            assert satisfies_budget(found.partition, k)


def test_restricted_growth_strings():
    bell = [1, 1, 2, 5, 15, 52, 203]
    for n, b in enumerate(bell):
        strings = list(restricted_growth_strings(n))
        assert len(strings) == b == len(list(set_partitions(list(range(n)))))
        assert strings == sorted(strings)
    assert list(restricted_growth_strings(3, 1)) == [(0, 1, 2)]


# -- degree diagnostic --------------------------------------------------------------------------------------

def test_ma_degree():
    assert ma_degree(generate("mated-pairs", m=4)) == {"R": 1}
    assert ma_degree(generate("equivalence", m=3, s=5)) == {"E": 5}
    assert ma_degree(generate("complete", n=6)) == {"E": 5}
