"""Finite relational structures over the domain {1..n}.

Structures are immutable values.  Relations are frozensets of tuples so
atom lookups inside quantifier loops are hash lookups.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Optional, Sequence


class SignatureError(ValueError):
    pass


class StructureError(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    """Relation symbols with their arities, kept sorted by name."""

    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [name for name, _ in self.symbols]
        if len(set(names)) != len(names):
            raise SignatureError(f"duplicate relation symbol in {names}")
        for name, arity in self.symbols:
            if not isinstance(arity, int) or arity < 1:
                raise SignatureError(f"arity of {name} must be a positive integer, got {arity!r}")
        object.__setattr__(self, "symbols", tuple(sorted(self.symbols)))

    @classmethod
    def of(cls, symbols: Mapping[str, int] | Iterable[tuple[str, int]] = ()) -> "Signature":
        items = symbols.items() if isinstance(symbols, Mapping) else symbols
        return cls(tuple(items))

    @classmethod
    def parse(cls, text: str) -> "Signature":
        """Parse ``"E/2, U/1"``."""
        items = []
        for chunk in text.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            name, sep, arity = chunk.partition("/")
            if not sep or not name.strip() or not arity.strip().isdigit():
                raise SignatureError(f"bad signature entry {chunk!r}, expected NAME/ARITY")
            items.append((name.strip(), int(arity)))
        return cls(tuple(items))

    def __contains__(self, name: str) -> bool:
        return any(n == name for n, _ in self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __str__(self):
        return ", ".join(f"{n}/{a}" for n, a in self.symbols)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.symbols)

    def arity(self, name: str) -> int:
        for n, a in self.symbols:
            if n == name:
                return a
        raise SignatureError(f"unknown relation symbol {name!r}")

    @property
    def is_monadic(self) -> bool:
        return all(a == 1 for _, a in self.symbols)

    def union(self, other: "Signature") -> "Signature":
        merged = dict(self.symbols)
        for name, arity in other.symbols:
            if merged.get(name, arity) != arity:
                raise SignatureError(f"{name} has arity {merged[name]} and {arity}")
            merged[name] = arity
        return Signature.of(merged)


@dataclass(frozen=True, eq=False)
class Structure:
    signature: Signature
    size: int
    relations: Mapping[str, frozenset]

    def __post_init__(self):
        if not isinstance(self.size, int) or self.size < 1:
            raise StructureError(f"structures have non-empty domains, got size {self.size!r}")
        rels = {}
        for name, tuples in self.relations.items():
            if name not in self.signature:
                raise StructureError(f"relation {name!r} not in signature {self.signature}")
            arity = self.signature.arity(name)
            frozen = frozenset(tuple(t) for t in tuples)
            for t in frozen:
                if len(t) != arity:
                    raise StructureError(f"tuple {t} has length {len(t)}, {name} has arity {arity}")
                for e in t:
                    if not (isinstance(e, int) and 1 <= e <= self.size):
                        raise StructureError(f"element {e!r} of {name}{t} outside domain 1..{self.size}")
            rels[name] = frozen
        for name in self.signature.names:
            rels.setdefault(name, frozenset())
        object.__setattr__(self, "relations", MappingProxyType(rels))

    @property
    def domain(self) -> range:
        return range(1, self.size + 1)

    def __getitem__(self, name: str) -> frozenset:
        return self.relations[name]

    def _key(self):
        return (self.signature, self.size, tuple(sorted((n, tuple(sorted(r))) for n, r in self.relations.items())))

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return self.signature == other.signature and self.size == other.size and dict(self.relations) == dict(other.relations)

    def __hash__(self):
        return hash(self._key())

    def __reduce__(self):
        return (Structure, (self.signature, self.size, {n: set(r) for n, r in self.relations.items()}))

    def __repr__(self):
        rels = ", ".join(f"{n}={sorted(r)}" for n, r in sorted(self.relations.items()))
        return f"Structure(size={self.size}, {rels})"


DIGRAPH = Signature.of({"E": 2})


def digraph(n: int, edges: Iterable[tuple[int, int]]) -> Structure:
    return Structure(DIGRAPH, n, {"E": edges})


def induced_substructure(s: Structure, subset: Iterable[int]) -> Structure:
    """Restrict ``s`` to ``subset`` and renumber it 1..|subset| in increasing order."""
    elems = sorted(set(subset))
    if not elems:
        raise StructureError("substructures have non-empty domains")
    for e in elems:
        if not 1 <= e <= s.size:
            raise StructureError(f"element {e} outside domain 1..{s.size}")
    index = {e: i for i, e in enumerate(elems, start=1)}
    rels = {
        name: [tuple(index[e] for e in t) for t in tuples if all(e in index for e in t)]
        for name, tuples in s.relations.items()
    }
    return Structure(s.signature, len(elems), rels)


def disjoint_union(a: Structure, b: Structure) -> Structure:
    if a.signature != b.signature:
        raise StructureError(f"signature mismatch: {a.signature} vs {b.signature}")
    shift = a.size
    rels = {
        name: set(a[name]) | {tuple(e + shift for e in t) for t in b[name]}
        for name in a.signature.names
    }
    return Structure(a.signature, a.size + b.size, rels)


def substructures_iter(s: Structure | int, max_size: Optional[int] = None) -> Iterator[tuple[int, ...]]:
    """Non-empty subsets of the domain, by increasing size then lexicographically."""
    n = s if isinstance(s, int) else s.size
    top = n if max_size is None else min(max_size, n)
    for k in range(1, top + 1):
        yield from itertools.combinations(range(1, n + 1), k)


def relabel(s: Structure, perm: Sequence[int]) -> Structure:
    """Image of ``s`` under the bijection ``i -> perm[i-1]``."""
    if sorted(perm) != list(s.domain):
        raise StructureError("relabelling must be a permutation of the domain")
    rels = {name: [tuple(perm[e - 1] for e in t) for t in tuples] for name, tuples in s.relations.items()}
    return Structure(s.signature, s.size, rels)
