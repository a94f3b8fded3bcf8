"""Finite relational structures: data model, file format, generators and Gaifman graph.

The universe of a structure is always ``range(size)``.  Relations are stored as
sorted tuples of element tuples; duplicates are kept so that :func:`validate`
can report them for hand-built inputs.  Components over a base are computed on
the Gaifman graph, which stands in for algebraic-closure components in the
infinite setting.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Mapping, NamedTuple


class StructureError(ValueError):
    """Base class for malformed structures and structure files."""


class ParseError(StructureError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class RangeError(StructureError):
    pass


class ArityError(StructureError):
    pass


class DuplicateRelationError(StructureError):
    pass


class DuplicateTupleError(StructureError):
    pass


class ParameterError(ValueError):
    """Generator parameters outside their documented bounds."""


class RelationSymbol(NamedTuple):
    name: str
    arity: int


@dataclass(frozen=True)
class Signature:
    relations: tuple[RelationSymbol, ...] = ()

    def __post_init__(self):
        rels = tuple(RelationSymbol(str(n), int(a)) for n, a in self.relations)
        object.__setattr__(self, "relations", rels)
        seen = set()
        for name, arity in rels:
            if not name:
                raise StructureError("relation names must be non-empty")
            if name in seen:
                raise DuplicateRelationError(f"duplicate relation name {name!r}")
            if arity < 1:
                raise ArityError(f"relation {name!r} has arity {arity}; arity must be >= 1")
            seen.add(name)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.relations)

    def arity(self, name: str) -> int:
        for r in self.relations:
            if r.name == name:
                return r.arity
        raise KeyError(name)

    def __contains__(self, name) -> bool:
        return any(r.name == name for r in self.relations)

    def __iter__(self) -> Iterator[RelationSymbol]:
        return iter(self.relations)

    def __len__(self) -> int:
        return len(self.relations)


@dataclass(frozen=True, eq=False)
class Structure:
    """A finite structure over ``signature`` with universe ``0..size-1``.

    Construction does not validate; use :func:`validate` or :func:`load_structure`.
    Relations missing from ``relations`` are empty.
    """

    signature: Signature
    size: int
    relations: Mapping[str, tuple[tuple[int, ...], ...]] = field(default_factory=dict)
    name: str | None = None

    def __post_init__(self):
        if not isinstance(self.signature, Signature):
            object.__setattr__(self, "signature", Signature(tuple(self.signature)))
        rels = {r: tuple(sorted(tuple(int(x) for x in t) for t in self.relations.get(r, ())))
                for r in self.signature.names}
        for extra in self.relations:
            if extra not in rels:
                rels[extra] = tuple(sorted(tuple(int(x) for x in t) for t in self.relations[extra]))
        object.__setattr__(self, "relations", rels)

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return (self.signature == other.signature and self.size == other.size
                and self.relations == other.relations)

    def __hash__(self):
        return hash((self.signature, self.size, tuple(sorted(self.relations.items()))))

    def __repr__(self):
        counts = ", ".join(f"{r}:{len(ts)}" for r, ts in self.relations.items())
        label = f"{self.name!r}, " if self.name else ""
        return f"Structure({label}size={self.size}, {counts})"

    @property
    def universe(self) -> range:
        return range(self.size)

    @cached_property
    def relation_names(self) -> frozenset[str]:
        return frozenset(self.signature.names)

    @cached_property
    def tuple_sets(self) -> dict[str, frozenset[tuple[int, ...]]]:
        return {r: frozenset(ts) for r, ts in self.relations.items()}

    @cached_property
    def incidence(self) -> dict[int, tuple[tuple[str, tuple[int, ...]], ...]]:
        """Element -> every distinct (relation, tuple) it occurs in."""
        inc: dict[int, list] = {}
        for r, ts in self.tuple_sets.items():
            for t in sorted(ts):
                for e in set(t):
                    inc.setdefault(e, []).append((r, t))
        return {e: tuple(v) for e, v in inc.items()}

    def holds(self, relation: str, tup: tuple[int, ...]) -> bool:
        return tuple(tup) in self.tuple_sets.get(relation, frozenset())


# -- validation ---------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str  # "arity" | "range" | "duplicate" | "unknown-relation" | "size"
    relation: str | None
    tuple: tuple[int, ...] | None
    message: str

    def __str__(self):
        return self.message


def validate(s: Structure) -> list[Violation]:
    """Return every invariant violation of ``s``; empty iff ``s`` is well formed."""
    out = []
    if not isinstance(s.size, int) or s.size < 0:
        out.append(Violation("size", None, None, f"size must be a non-negative integer, got {s.size!r}"))
    for rel, tuples in s.relations.items():
        if rel not in s.signature:
            out.append(Violation("unknown-relation", rel, None, f"relation {rel!r} is not declared in the signature"))
            continue
        arity = s.signature.arity(rel)
        prev = None
        for t in tuples:
            if len(t) != arity:
                out.append(Violation("arity", rel, t, f"{rel}{list(t)} has length {len(t)}, arity is {arity}"))
            bad = [x for x in t if not 0 <= x < s.size]
            if bad:
                out.append(Violation("range", rel, t, f"{rel}{list(t)} has entries {bad} outside [0, {s.size})"))
            if t == prev:
                out.append(Violation("duplicate", rel, t, f"{rel}{list(t)} occurs more than once"))
            prev = t
    return out


_VIOLATION_ERRORS = {
    "arity": ArityError,
    "range": RangeError,
    "duplicate": DuplicateTupleError,
    "unknown-relation": ParseError,
    "size": RangeError,
}


def _raise_first(violations: list[Violation]) -> None:
    if violations:
        v = violations[0]
        raise _VIOLATION_ERRORS[v.kind](v.message)


# -- file format --------------------------------------------------------------

def structure_to_dict(s: Structure) -> dict:
    d: dict = {}
    if s.name is not None:
        d["name"] = s.name
    d["size"] = s.size
    d["signature"] = [{"name": r.name, "arity": r.arity} for r in s.signature]
    d["relations"] = {r: [list(t) for t in sorted(set(s.relations.get(r, ())))] for r in s.signature.names}
    return d


def dumps_structure(s: Structure) -> str:
    """Canonical text form: fixed key order, sorted tuples, one tuple per line."""
    lines = ["{"]
    head = []
    if s.name is not None:
        head.append(f'  "name": {json.dumps(s.name)}')
    head.append(f'  "size": {s.size}')
    sig = [f'    {{"name": {json.dumps(r.name)}, "arity": {r.arity}}}' for r in s.signature]
    head.append('  "signature": [' + ("\n" + ",\n".join(sig) + "\n  ]" if sig else "]"))
    rel_lines = []
    for r in s.signature.names:
        tuples = sorted(set(s.relations.get(r, ())))
        body = [f"      {json.dumps(list(t))}" for t in tuples]
        rel_lines.append(f"    {json.dumps(r)}: [" + ("\n" + ",\n".join(body) + "\n    ]" if body else "]"))
    head.append('  "relations": {' + ("\n" + ",\n".join(rel_lines) + "\n  }" if rel_lines else "}"))
    lines.append(",\n".join(head))
    lines.append("}")
    return "\n".join(lines) + "\n"


def save_structure(s: Structure, path) -> None:
    Path(path).write_text(dumps_structure(s), encoding="utf-8")


def _int_field(value, fieldname: str, line: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer, got {value!r}", line=line, field=fieldname)
    return value


def _field_line(text: str, key: str) -> int | None:
    needle = json.dumps(key)
    for i, ln in enumerate(text.splitlines(), 1):
        if needle in ln:
            return i
    return None


def structure_from_dict(data, text: str = "", check: bool = True) -> Structure:
    if not isinstance(data, dict):
        raise ParseError("top level must be an object", line=1)
    for key in ("size", "signature"):
        if key not in data:
            raise ParseError(f"missing required key {key!r}", field=key)
    size = _int_field(data["size"], "size", _field_line(text, "size"))
    if size < 0:
        raise RangeError(f"size must be non-negative, got {size}")
    sig_raw = data["signature"]
    if not isinstance(sig_raw, list):
        raise ParseError("signature must be a list", line=_field_line(text, "signature"), field="signature")
    symbols = []
    for i, entry in enumerate(sig_raw):
        where = f"signature[{i}]"
        if not isinstance(entry, dict) or "name" not in entry or "arity" not in entry:
            raise ParseError("signature entries need 'name' and 'arity'", field=where)
        if not isinstance(entry["name"], str):
            raise ParseError("relation name must be a string", field=where + ".name")
        symbols.append((entry["name"], _int_field(entry["arity"], where + ".arity")))
    signature = Signature(tuple(symbols))
    rels_raw = data.get("relations", {})
    if not isinstance(rels_raw, dict):
        raise ParseError("relations must be an object", line=_field_line(text, "relations"), field="relations")
    relations = {}
    for rel, tuples in rels_raw.items():
        line = _field_line(text, rel)
        if rel not in signature:
            raise ParseError(f"relation {rel!r} not declared in signature", line=line, field=f"relations.{rel}")
        if not isinstance(tuples, list):
            raise ParseError("tuple list expected", line=line, field=f"relations.{rel}")
        parsed = []
        for j, t in enumerate(tuples):
            if not isinstance(t, list):
                raise ParseError("tuple must be a list of integers", line=line, field=f"relations.{rel}[{j}]")
            parsed.append(tuple(_int_field(x, f"relations.{rel}[{j}]", line) for x in t))
        relations[rel] = parsed
    name = data.get("name")
    if name is not None and not isinstance(name, str):
        raise ParseError("name must be a string", field="name")
    s = Structure(signature, size, relations, name=name)
    if check:
        _raise_first(validate(s))
    return s


def loads_structure(text: str, check: bool = True) -> Structure:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc
    return structure_from_dict(data, text, check)


def load_structure(path, check: bool = True) -> Structure:
    """Read a structure file; with ``check`` any invariant violation raises."""
    return loads_structure(Path(path).read_text(encoding="utf-8"), check)


# -- generators ---------------------------------------------------------------

FAMILIES = ("mated-pairs", "equivalence", "two-class", "unary-cube", "path", "cycle", "complete", "star")

# Upper bounds keep generated structures small enough to census.
MAX_ELEMENTS = 100_000
MAX_UNARY = 16


@dataclass(frozen=True)
class FamilyParams:
    """Generator parameters.

    mated-pairs uses ``m`` (pairs), equivalence uses ``m`` (classes) and ``s``
    (class size), two-class uses ``s``, unary-cube uses ``u`` (predicates), and
    the graph families use ``n`` (vertices; cycle needs n >= 3).
    """

    family: str
    m: int | None = None
    s: int | None = None
    u: int | None = None
    n: int | None = None


def _need(p: FamilyParams, attr: str, low: int = 1) -> int:
    v = getattr(p, attr)
    if v is None:
        raise ParameterError(f"{p.family} requires parameter {attr}")
    if isinstance(v, bool) or not isinstance(v, int) or v < low:
        raise ParameterError(f"{p.family}: {attr} must be an integer >= {low}, got {v!r}")
    return v


def _check_size(p: FamilyParams, size: int) -> None:
    if size > MAX_ELEMENTS:
        raise ParameterError(f"{p.family}: {size} elements exceeds the limit of {MAX_ELEMENTS}")


def _graph(name: str, n: int, edges) -> Structure:
    sym = set()
    for a, b in edges:
        sym.add((a, b))
        sym.add((b, a))
    return Structure(Signature((("E", 2),)), n, {"E": sym}, name=name)


def _equivalence(m: int, s: int, name: str) -> Structure:
    tuples = [(a, b) for c in range(m) for a in range(c * s, (c + 1) * s) for b in range(c * s, (c + 1) * s)]
    return Structure(Signature((("E", 2),)), m * s, {"E": tuples}, name=name)


def generate(p: FamilyParams | str, **params) -> Structure:
    """Build a member of a named family, e.g. ``generate("mated-pairs", m=3)``."""
    if isinstance(p, str):
        p = FamilyParams(p, **params)
    fam = p.family
    if fam == "mated-pairs":
        m = _need(p, "m")
        _check_size(p, 2 * m)
        pairs = [(i, m + i) for i in range(m)] + [(m + i, i) for i in range(m)]
        return Structure(Signature((("R", 2),)), 2 * m, {"R": pairs}, name=f"mated-pairs(m={m})")
    if fam == "equivalence":
        m, s = _need(p, "m"), _need(p, "s")
        _check_size(p, m * s)
        return _equivalence(m, s, f"equivalence(m={m},s={s})")
    if fam == "two-class":
        s = _need(p, "s")
        _check_size(p, 2 * s)
        return _equivalence(2, s, f"two-class(s={s})")
    if fam == "unary-cube":
        u = _need(p, "u")
        if u > MAX_UNARY:
            raise ParameterError(f"unary-cube: u must be <= {MAX_UNARY}, got {u}")
        sig = Signature(tuple((f"P_{j + 1}", 1) for j in range(u)))
        rels = {f"P_{j + 1}": [(i,) for i in range(2 ** u) if i >> j & 1] for j in range(u)}
        return Structure(sig, 2 ** u, rels, name=f"unary-cube(u={u})")
    if fam in ("path", "cycle", "complete", "star"):
        n = _need(p, "n", 3 if fam == "cycle" else 1)
        _check_size(p, n)
        if fam == "path":
            edges = [(i, i + 1) for i in range(n - 1)]
        elif fam == "cycle":
            edges = [(i, (i + 1) % n) for i in range(n)]
        elif fam == "complete":
            if n > 2000:
                raise ParameterError("complete: n must be <= 2000")
            edges = [(a, b) for a in range(n) for b in range(a + 1, n)]
        else:
            edges = [(0, i) for i in range(1, n)]
        return _graph(f"{fam}(n={n})", n, edges)
    raise ParameterError(f"unknown family {fam!r}; expected one of {', '.join(FAMILIES)}")


# -- Gaifman graph and components ---------------------------------------------

@dataclass(frozen=True)
class GaifmanGraph:
    size: int
    edges: frozenset[tuple[int, int]]  # normalized a < b

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        adj: dict[int, set[int]] = {v: set() for v in range(self.size)}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return {v: frozenset(ns) for v, ns in adj.items()}

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])


def gaifman(s: Structure) -> GaifmanGraph:
    edges = set()
    for ts in s.tuple_sets.values():
        for t in ts:
            elems = sorted(set(t))
            for i, a in enumerate(elems):
                for b in elems[i + 1:]:
                    edges.add((a, b))
    return GaifmanGraph(s.size, frozenset(edges))


def _check_elements(s: Structure, elems: Iterable[int], what: str) -> frozenset[int]:
    elems = frozenset(elems)
    bad = sorted(e for e in elems if not (isinstance(e, int) and 0 <= e < s.size))
    if bad:
        raise RangeError(f"{what} elements {bad} outside universe [0, {s.size})")
    return elems


def graph_components(adj: Mapping[int, Iterable[int]], vertices: Iterable[int]) -> list[frozenset[int]]:
    """Connected components of the subgraph induced on ``vertices``, ordered by least element."""
    remaining = set(vertices)
    comps = []
    for start in sorted(remaining):
        if start not in remaining:
            continue
        remaining.discard(start)
        comp = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w in remaining:
                    remaining.discard(w)
                    comp.add(w)
                    queue.append(w)
        comps.append(frozenset(comp))
    return comps


def components_over(s: Structure, base: Iterable[int] = ()) -> list[frozenset[int]]:
    """Gaifman components of the universe minus ``base``, sorted by least element."""
    base = _check_elements(s, base, "base")
    g = gaifman(s)
    return graph_components(g.adjacency, (v for v in range(s.size) if v not in base))


# -- partitions -----------------------------------------------------------------

class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class Partition:
    """A base set plus disjoint non-empty parts; canonical order is by least element."""

    base: frozenset[int]
    parts: tuple[frozenset[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "base", frozenset(self.base))
        parts = tuple(frozenset(p) for p in self.parts)
        if any(not p for p in parts):
            raise PartitionError("parts must be non-empty")
        object.__setattr__(self, "parts", tuple(sorted(parts, key=min)))

    @property
    def elements(self) -> frozenset[int]:
        return self.base.union(*self.parts)

    def part_of(self) -> dict[int, int]:
        return {e: i for i, p in enumerate(self.parts) for e in p}

    def check(self, s: Structure) -> None:
        """Raise PartitionError unless base and parts form a disjoint cover of the universe."""
        seen: set[int] = set()
        for block in (self.base, *self.parts):
            for e in block:
                if not (isinstance(e, int) and 0 <= e < s.size):
                    raise PartitionError(f"element {e!r} outside universe [0, {s.size})")
                if e in seen:
                    raise PartitionError(f"element {e} occurs in more than one block")
                seen.add(e)
        if len(seen) != s.size:
            missing = sorted(set(range(s.size)) - seen)
            raise PartitionError(f"elements {missing} are not covered")

    def to_dict(self) -> dict:
        return {"base": sorted(self.base), "parts": [sorted(p) for p in self.parts]}


def dumps_partition(part: Partition) -> str:
    d = part.to_dict()
    parts = ",\n".join(f"    {json.dumps(p)}" for p in d["parts"])
    return ('{\n  "base": ' + json.dumps(d["base"]) + ',\n  "parts": ['
            + ("\n" + parts + "\n  ]" if parts else "]") + "\n}\n")


def save_partition(part: Partition, path) -> None:
    Path(path).write_text(dumps_partition(part), encoding="utf-8")


def loads_partition(text: str) -> Partition:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc
    if not isinstance(data, dict) or "parts" not in data:
        raise ParseError("partition must be an object with 'base' and 'parts'")
    base = data.get("base", [])
    parts = data["parts"]
    if not isinstance(base, list) or not isinstance(parts, list) or not all(isinstance(p, list) for p in parts):
        raise ParseError("base must be a list and parts a list of lists")
    for i, p in enumerate([base, *parts]):
        for x in p:
            _int_field(x, "base" if i == 0 else f"parts[{i - 1}]")
    seen: set[int] = set()
    for block in [base, *parts]:
        for x in block:
            if x in seen:
                raise PartitionError(f"element {x} occurs more than once")
            seen.add(x)
    return Partition(frozenset(base), tuple(frozenset(p) for p in parts))


def load_partition(path, structure: Structure | None = None) -> Partition:
    part = loads_partition(Path(path).read_text(encoding="utf-8"))
    if structure is not None:
        part.check(structure)
    return part
