"""First-order syntax: formula AST, prenex sentences, quantifier prefixes."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .structures import Signature

EXISTS = "∃"
FORALL = "∀"


class FormulaError(ValueError):
    pass


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class Eq:
    left: str
    right: str


@dataclass(frozen=True)
class Degree:
    """Degree macro: the number of ``kind``-neighbours of ``var`` via ``rel``,
    not counting ``var`` itself or the variables in ``exclude``, equals ``count``.

    ``kind`` is ``deg`` (either direction), ``outdeg`` or ``indeg``.
    """

    kind: str
    rel: str
    var: str
    exclude: tuple[str, ...]
    count: int


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    parts: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    parts: tuple["Formula", ...]


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    vars: tuple[str, ...]
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    vars: tuple[str, ...]
    body: "Formula"


Formula = Union[Top, Bottom, Atom, Eq, Degree, Not, And, Or, Implies, Iff, Exists, Forall]
Quantified = (Exists, Forall)


def conj(parts: Iterable[Formula]) -> Formula:
    parts = tuple(parts)
    if not parts:
        return Top()
    return parts[0] if len(parts) == 1 else And(parts)


def disj(parts: Iterable[Formula]) -> Formula:
    parts = tuple(parts)
    if not parts:
        return Bottom()
    return parts[0] if len(parts) == 1 else Or(parts)


def negate_formula(f: Formula) -> Formula:
    return f.body if isinstance(f, Not) else Not(f)


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, (Top, Bottom)):
        return frozenset()
    if isinstance(f, Atom):
        return frozenset(f.args)
    if isinstance(f, Eq):
        return frozenset((f.left, f.right))
    if isinstance(f, Degree):
        return frozenset((f.var,) + f.exclude)
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or)):
        return frozenset().union(*(free_vars(p) for p in f.parts))
    if isinstance(f, (Implies, Iff)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, Quantified):
        return free_vars(f.body) - set(f.vars)
    raise TypeError(f"not a formula: {f!r}")


def all_vars(f: Formula) -> frozenset[str]:
    """Free and bound variable names."""
    if isinstance(f, Quantified):
        return all_vars(f.body) | set(f.vars)
    if isinstance(f, Not):
        return all_vars(f.body)
    if isinstance(f, (And, Or)):
        return frozenset().union(*(all_vars(p) for p in f.parts))
    if isinstance(f, (Implies, Iff)):
        return all_vars(f.left) | all_vars(f.right)
    return free_vars(f)


def relations_used(f: Formula) -> frozenset[str]:
    if isinstance(f, (Atom, Degree)):
        return frozenset((f.rel,))
    if isinstance(f, (Quantified + (Not,))):
        return relations_used(f.body)
    if isinstance(f, (And, Or)):
        return frozenset().union(*(relations_used(p) for p in f.parts))
    if isinstance(f, (Implies, Iff)):
        return relations_used(f.left) | relations_used(f.right)
    return frozenset()


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, Quantified):
        return False
    if isinstance(f, Not):
        return is_quantifier_free(f.body)
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(p) for p in f.parts)
    if isinstance(f, (Implies, Iff)):
        return is_quantifier_free(f.left) and is_quantifier_free(f.right)
    # degree macros hide quantifiers
    return not isinstance(f, Degree)


def uses_equality(f: Formula) -> bool:
    if isinstance(f, (Eq, Degree)):
        return True
    if isinstance(f, (Quantified + (Not,))):
        return uses_equality(f.body)
    if isinstance(f, (And, Or)):
        return any(uses_equality(p) for p in f.parts)
    if isinstance(f, (Implies, Iff)):
        return uses_equality(f.left) or uses_equality(f.right)
    return False


def substitute(f: Formula, mapping: Mapping[str, str]) -> Formula:
    """Rename free occurrences of variables.  Binders shadow the mapping;
    callers are responsible for avoiding capture."""
    if not mapping:
        return f
    m = mapping.get
    if isinstance(f, Atom):
        return Atom(f.rel, tuple(m(a, a) for a in f.args))
    if isinstance(f, Eq):
        return Eq(m(f.left, f.left), m(f.right, f.right))
    if isinstance(f, Degree):
        return Degree(f.kind, f.rel, m(f.var, f.var), tuple(m(e, e) for e in f.exclude), f.count)
    if isinstance(f, Not):
        return Not(substitute(f.body, mapping))
    if isinstance(f, And):
        return And(tuple(substitute(p, mapping) for p in f.parts))
    if isinstance(f, Or):
        return Or(tuple(substitute(p, mapping) for p in f.parts))
    if isinstance(f, Implies):
        return Implies(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, Iff):
        return Iff(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, Quantified):
        inner = {k: v for k, v in mapping.items() if k not in f.vars}
        return type(f)(f.vars, substitute(f.body, inner))
    return f


def check_signature(f: Formula, signature: Signature) -> None:
    """Raise FormulaError on unknown symbols or arity mismatches."""
    if isinstance(f, Atom):
        if f.rel not in signature:
            raise FormulaError(f"unknown relation symbol {f.rel!r}")
        if signature.arity(f.rel) != len(f.args):
            raise FormulaError(f"{f.rel} has arity {signature.arity(f.rel)}, used with {len(f.args)} arguments")
    elif isinstance(f, Degree):
        if f.rel not in signature:
            raise FormulaError(f"unknown relation symbol {f.rel!r}")
        if signature.arity(f.rel) != 2:
            raise FormulaError(f"degree macro needs a binary relation, {f.rel} has arity {signature.arity(f.rel)}")
    elif isinstance(f, (Quantified + (Not,))):
        check_signature(f.body, signature)
    elif isinstance(f, (And, Or)):
        for p in f.parts:
            check_signature(p, signature)
    elif isinstance(f, (Implies, Iff)):
        check_signature(f.left, signature)
        check_signature(f.right, signature)


class QuantifierPrefix(str):
    """A word over {∃, ∀}.  Accepts ASCII ``E``/``A`` (any case) on input."""

    _ascii = {"E": EXISTS, "e": EXISTS, "A": FORALL, "a": FORALL, EXISTS: EXISTS, FORALL: FORALL}

    def __new__(cls, word: str = ""):
        try:
            norm = "".join(cls._ascii[c] for c in word if not c.isspace())
        except KeyError as exc:
            raise FormulaError(f"quantifier prefix must be over {{∃,∀}} (or E/A), got {word!r}") from exc
        return super().__new__(cls, norm)

    @property
    def ascii(self) -> str:
        return self.replace(EXISTS, "E").replace(FORALL, "A")

    def matches(self, pattern: str) -> bool:
        """Full match of an ASCII regex such as ``A*EA*``."""
        return re.fullmatch(pattern, self.ascii) is not None

    def dual(self) -> "QuantifierPrefix":
        return QuantifierPrefix(self.ascii.translate(str.maketrans("EA", "AE")))

    def blocks(self) -> "QuantifierPrefix":
        """Collapse runs of equal quantifiers: ``∃∃∀∀∃`` -> ``∃∀∃``."""
        return QuantifierPrefix(re.sub(r"(.)\1+", r"\1", self.ascii))


@dataclass(frozen=True)
class PrenexSentence:
    prefix: tuple[tuple[str, str], ...]
    matrix: Formula
    signature: Signature

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple((QuantifierPrefix(q), v) for q, v in self.prefix))
        names = [v for _, v in self.prefix]
        if len(set(names)) != len(names):
            raise FormulaError(f"prefix binds a variable twice: {names}")
        if not is_quantifier_free(self.matrix):
            raise FormulaError("prenex matrix must be quantifier-free")
        unbound = free_vars(self.matrix) - set(names)
        if unbound:
            raise FormulaError(f"free variables {sorted(unbound)} in sentence")
        check_signature(self.matrix, self.signature)

    @property
    def quantifier_prefix(self) -> QuantifierPrefix:
        return QuantifierPrefix("".join(q for q, _ in self.prefix))

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for _, v in self.prefix)

    def to_formula(self) -> Formula:
        """Nested quantifiers, grouping runs of the same quantifier."""
        f = self.matrix
        groups: list[tuple[str, list[str]]] = []
        for q, v in self.prefix:
            if groups and groups[-1][0] == q:
                groups[-1][1].append(v)
            else:
                groups.append((q, [v]))
        for q, vs in reversed(groups):
            f = (Exists if q == EXISTS else Forall)(tuple(vs), f)
        return f

    def negate(self) -> "PrenexSentence":
        prefix = tuple((FORALL if q == EXISTS else EXISTS, v) for q, v in self.prefix)
        return PrenexSentence(prefix, negate_formula(self.matrix), self.signature)


def extract_prefix(p: PrenexSentence) -> QuantifierPrefix:
    return p.quantifier_prefix


def split_alg1_prefix(p: PrenexSentence) -> tuple[tuple[str, ...], str, tuple[str, ...]]:
    """Split a ∀^k∃∀^m sentence into (x_1..x_k, y, x_{k+1}..x_n)."""
    if not p.quantifier_prefix.matches("A*EA*"):
        raise FormulaError(f"expected a prefix of the form ∀*∃∀*, got {p.quantifier_prefix}")
    qs = [q for q, _ in p.prefix]
    i = qs.index(EXISTS)
    vs = p.variables
    return vs[:i], vs[i], vs[i + 1:]


def split_collapse_prefix(p: PrenexSentence) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Split a ∀^k∃^l sentence into its universal and existential variables."""
    if not p.quantifier_prefix.matches("A*E*"):
        raise FormulaError(f"expected a prefix of the form ∀*∃*, got {p.quantifier_prefix}")
    univ = tuple(v for q, v in p.prefix if q == FORALL)
    return univ, p.variables[len(univ):]
