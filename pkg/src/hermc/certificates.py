"""Certificates for hereditary model checking, their verification, and JSON IO.

An order certificate stores one permutation of the domain per k-tuple of
parameters; ``b <=_a c`` holds when b comes no later than c in the
permutation for ``a``.  A counterexample certificate is a subset whose
induced substructure falsifies the sentence.  An exhaustive certificate
records that every substructure up to a size bound was checked, which is
a complete argument when the bound is justified by the prefix class.
"""
from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional, Sequence, Union

from .evaluator import compile_sentence, eval_fo
from .formulas import PrenexSentence, split_alg1_prefix
from .structures import Structure, induced_substructure, substructures_iter
from .syntax import print_formula


class CertificateError(ValueError):
    pass


@dataclass(frozen=True)
class CounterexampleCert:
    subset: tuple[int, ...]

    def __post_init__(self):
        subset = tuple(sorted(set(self.subset)))
        if not subset:
            raise CertificateError("counterexample subset must be non-empty")
        object.__setattr__(self, "subset", subset)

    type = "counterexample"


@dataclass(frozen=True)
class OrderCert:
    k: int
    domain_size: int
    orders: Mapping[tuple[int, ...], tuple[int, ...]] = field(hash=False)

    type = "order"

    def __post_init__(self):
        n = self.domain_size
        expected = set(itertools.product(range(1, n + 1), repeat=self.k))
        orders = {tuple(a): tuple(o) for a, o in self.orders.items()}
        if set(orders) != expected:
            raise CertificateError(f"order certificate must list every {self.k}-tuple over 1..{n} exactly once")
        for a, o in orders.items():
            if sorted(o) != list(range(1, n + 1)):
                raise CertificateError(f"order for parameters {a} is not a permutation of 1..{n}")
        object.__setattr__(self, "orders", MappingProxyType(dict(sorted(orders.items()))))

    def positions(self, params: tuple[int, ...]) -> dict[int, int]:
        return {e: i for i, e in enumerate(self.orders[params])}

    def leq(self, params: tuple[int, ...], b: int, c: int) -> bool:
        pos = self.positions(params)
        return pos[b] <= pos[c]

    def relation(self) -> frozenset[tuple[int, ...]]:
        """The (k+2)-ary relation L encoded by the orders."""
        out = set()
        for a, o in self.orders.items():
            for i, b in enumerate(o):
                for c in o[i:]:
                    out.add(a + (b, c))
        return frozenset(out)

    def __eq__(self, other):
        if not isinstance(other, OrderCert):
            return NotImplemented
        return (self.k, self.domain_size, dict(self.orders)) == (other.k, other.domain_size, dict(other.orders))

    def __hash__(self):
        return hash((self.k, self.domain_size, tuple(self.orders.items())))


@dataclass(frozen=True)
class ExhaustiveCert:
    """Every substructure with at most ``bound`` elements satisfies the sentence."""

    bound: int

    type = "exhaustive"


Certificate = Union[CounterexampleCert, OrderCert, ExhaustiveCert]


def verify_counterexample(s: Structure, p: PrenexSentence, subset: Sequence[int] | CounterexampleCert) -> bool:
    if isinstance(subset, CounterexampleCert):
        subset = subset.subset
    sub = induced_substructure(s, subset)
    return not eval_fo(sub, p)


def verify_order_certificate(s: Structure, p: PrenexSentence, c: OrderCert) -> bool:
    """Check the first-order part of the SNP sentence for the order expansion.

    For every parameter tuple a, every b and every x_{k+1..n}: if b precedes
    or equals each of a_1..a_k, x_{k+1..n} in the order for a, then the
    matrix holds at (a, b, x).  Each slice is a reflexive total order by
    construction of the certificate.
    """
    params, y, rest = split_alg1_prefix(p)
    if c.k != len(params):
        raise CertificateError(f"certificate has k={c.k}, sentence has {len(params)} leading universals")
    if c.domain_size != s.size:
        return False
    matrix = compile_sentence(p.matrix, params + (y,) + rest)
    for a, order in c.orders.items():
        for i, b in enumerate(order):
            later = set(order[i:])
            if not all(x in later for x in a):
                continue
            tail = order[i:]
            for xs in itertools.product(tail, repeat=len(rest)):
                if not matrix(s, values=a + (b,) + xs):
                    return False
    return True


def verify_exhaustive(s: Structure, p: PrenexSentence, c: ExhaustiveCert) -> bool:
    """Recheck every substructure up to the bound."""
    for subset in substructures_iter(s, c.bound):
        if not eval_fo(s, p, domain=subset):
            return False
    return True


def verify_certificate(s: Structure, p: PrenexSentence, c: Certificate) -> bool:
    if isinstance(c, CounterexampleCert):
        return verify_counterexample(s, p, c)
    if isinstance(c, OrderCert):
        return verify_order_certificate(s, p, c)
    if isinstance(c, ExhaustiveCert):
        return verify_exhaustive(s, p, c)
    raise CertificateError(f"unknown certificate {c!r}")


# ------------------------------------------------------------------ JSON

def formula_hash(p: PrenexSentence) -> str:
    text = print_formula(p) + "|" + str(p.signature)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def to_json(c: Certificate, p: PrenexSentence, domain_size: int) -> str:
    doc: dict = {"type": c.type, "k": None, "domain_size": domain_size}
    if isinstance(c, OrderCert):
        doc["k"] = c.k
        doc["orders"] = [{"params": list(a), "order": list(o)} for a, o in c.orders.items()]
    elif isinstance(c, CounterexampleCert):
        doc["subset"] = list(c.subset)
    else:
        doc["bound"] = c.bound
    doc["formula_hash"] = formula_hash(p)
    return json.dumps(doc, indent=1) + "\n"


def from_json(text: str, p: Optional[PrenexSentence] = None) -> tuple[Certificate, int]:
    """Parse a certificate file; returns (certificate, domain_size).

    When ``p`` is given, the stored formula hash must match it.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CertificateError(f"certificate is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "type" not in doc or "domain_size" not in doc:
        raise CertificateError("certificate needs 'type' and 'domain_size' fields")
    if p is not None and doc.get("formula_hash") != formula_hash(p):
        raise CertificateError("certificate was issued for a different sentence (formula_hash mismatch)")
    n = doc["domain_size"]
    kind = doc["type"]
    try:
        if kind == "order":
            orders = {tuple(e["params"]): tuple(e["order"]) for e in doc["orders"]}
            return OrderCert(int(doc["k"]), n, orders), n
        if kind == "counterexample":
            subset = tuple(doc["subset"])
            if any(not 1 <= e <= n for e in subset):
                raise CertificateError(f"subset {subset} outside domain 1..{n}")
            return CounterexampleCert(subset), n
        if kind == "exhaustive":
            return ExhaustiveCert(int(doc["bound"])), n
    except (KeyError, TypeError) as exc:
        raise CertificateError(f"malformed {kind} certificate: {exc}") from exc
    raise CertificateError(f"unknown certificate type {kind!r}")

