"""Hereditary model checking: does every non-empty induced substructure
satisfy a sentence?

The dispatcher picks a procedure from the quantifier prefix:

* monadic signatures: check substructures up to a size bound;
* ``∀*∃*``: substructures with at most k elements suffice;
* ``∀*∃∀*``: the order-building certifying algorithm;
* everything else: exponential search, refused above a size cap.
"""
from __future__ import annotations

import enum
import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .certificates import Certificate, CounterexampleCert, ExhaustiveCert, OrderCert
from .evaluator import compile_sentence
from .formulas import (
    EXISTS,
    FORALL,
    Atom,
    Forall,
    Formula,
    FormulaError,
    Implies,
    PrenexSentence,
    QuantifierPrefix,
    conj,
    disj,
    split_alg1_prefix,
    split_collapse_prefix,
    substitute,
    uses_equality,
)
from .structures import Signature, Structure, substructures_iter

DEFAULT_MAX_BRUTE = 22


class ScaleRefusal(RuntimeError):
    """Raised instead of starting an exponential search on a large input."""


class TractabilityClass(enum.Enum):
    PTimeCollapse = "PTimeCollapse"
    PTimeAlg1 = "PTimeAlg1"
    PTimeMonadic = "PTimeMonadic"
    HardPrefix = "HardPrefix"


def classify_prefix(q: QuantifierPrefix | str, sig: Optional[Signature] = None) -> TractabilityClass:
    q = QuantifierPrefix(q)
    if sig is not None and sig.is_monadic:
        return TractabilityClass.PTimeMonadic
    if q.matches("A*E*"):
        return TractabilityClass.PTimeCollapse
    if q.matches("A*EA*"):
        return TractabilityClass.PTimeAlg1
    return TractabilityClass.HardPrefix


def has_hard_subword(q: QuantifierPrefix | str) -> bool:
    """Whether q contains ∃∃∀ or ∃∀∃ as a (scattered) subword."""
    a = QuantifierPrefix(q).ascii
    return _is_subword(a, "EEA") or _is_subword(a, "EAE")


def _is_subword(word: str, pattern: str) -> bool:
    it = iter(word)
    return all(c in it for c in pattern)


@dataclass
class HerVerdict:
    hereditary: bool
    certificate: Certificate
    method: str
    stats: dict = field(default_factory=dict)

    @property
    def counterexample(self) -> Optional[tuple[int, ...]]:
        return self.certificate.subset if isinstance(self.certificate, CounterexampleCert) else None


# ------------------------------------------------------------ brute force

def _first_failing(s: Structure, p: PrenexSentence, subsets: Sequence[tuple[int, ...]]) -> Optional[int]:
    check = compile_sentence(p)
    for i, subset in enumerate(subsets):
        if not check(s, subset):
            return i
    return None


def _chunks(seq: Sequence, n: int) -> Iterator[Sequence]:
    step = max(1, -(-len(seq) // n))
    for i in range(0, len(seq), step):
        yield seq[i:i + step]


def _scan(s: Structure, p: PrenexSentence, max_size: Optional[int], jobs: int, method: str) -> HerVerdict:
    top = s.size if max_size is None else min(max_size, s.size)
    examined = 0
    if jobs <= 1:
        check = compile_sentence(p)
        for subset in substructures_iter(s, top):
            examined += 1
            if not check(s, subset):
                return HerVerdict(False, CounterexampleCert(subset), method, {"substructures": examined})
        return HerVerdict(True, ExhaustiveCert(top), method, {"substructures": examined})
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for size in range(1, top + 1):
            level = list(itertools.combinations(s.domain, size))
            parts = list(_chunks(level, jobs * 4))
            results = list(pool.map(_first_failing, [s] * len(parts), [p] * len(parts), parts))
            # deterministic merge: earliest chunk, earliest index
            for part, r in zip(parts, results):
                if r is not None:
                    examined += r + 1
                    return HerVerdict(False, CounterexampleCert(part[r]), method, {"substructures": examined})
                examined += len(part)
    return HerVerdict(True, ExhaustiveCert(top), method, {"substructures": examined})


def her_bruteforce(s: Structure, p: PrenexSentence, jobs: int = 1) -> HerVerdict:
    """Check every non-empty substructure, smallest first.  The first failing
    subset (minimum size, then lexicographically least) is returned."""
    return _scan(s, p, None, jobs, "bruteforce")


# --------------------------------------------------------------- ∀*∃*

def collapse_rewrite(p: PrenexSentence) -> PrenexSentence:
    """Universal sentence satisfied by A iff A hereditarily satisfies p.

    Each existential variable is replaced by a disjunction over the
    universal variables.  With no universal variable (a pure ∃ sentence),
    a single fresh universal x stands for every existential variable:
    one-element substructures are the only minimal ones.
    """
    univ, exist = split_collapse_prefix(p)
    if not exist:
        return p
    if not univ:
        x = _fresh_name(p.variables, "x")
        matrix = substitute(p.matrix, {y: x for y in exist})
        return PrenexSentence(((FORALL, x),), matrix, p.signature)
    disjuncts = []
    for choice in itertools.product(univ, repeat=len(exist)):
        disjuncts.append(substitute(p.matrix, dict(zip(exist, choice))))
    return PrenexSentence(tuple((FORALL, v) for v in univ), disj(disjuncts), p.signature)


def _fresh_name(used: Sequence[str], hint: str) -> str:
    if hint not in used:
        return hint
    i = 1
    while f"{hint}{i}" in used:
        i += 1
    return f"{hint}{i}"


def collapse_check(s: Structure, p: PrenexSentence) -> HerVerdict:
    """Hereditary check for ∀^k∃^l: substructures with at most max(k,1)
    elements suffice."""
    univ, _ = split_collapse_prefix(p)
    v = _scan(s, p, max(len(univ), 1), 1, "collapse")
    v.stats["bound"] = max(len(univ), 1)
    return v


# --------------------------------------------------------------- monadic

def monadic_bound(p: PrenexSentence) -> int:
    """Size bound for monadic signatures.

    Without equality, a substructure is determined up to elementary
    equivalence by the set of its 1-types, of which there are at most
    2^|τ|.  With equality the multiplicity of each type matters up to the
    number of quantified variables.
    """
    types = 2 ** len(p.signature)
    if uses_equality(p.matrix):
        return types * max(len(p.prefix), 1)
    return types


def monadic_check(s: Structure, p: PrenexSentence) -> HerVerdict:
    if not p.signature.is_monadic:
        raise FormulaError(f"monadic_check needs a monadic signature, got {p.signature}")
    bound = monadic_bound(p)
    v = _scan(s, p, bound, 1, "monadic")
    v.stats["bound"] = bound
    return v


# ------------------------------------------------------------- ∀*∃∀*

@dataclass(frozen=True)
class SnpSentence:
    """``∃L ∀ x_1..x_k, y, x_{k+1}..x_n. Lin(x_1..x_k) ∧ (guard → ψ)``.

    ``matrix`` holds the guarded part; Lin is not written out as a formula
    and is checked directly on each binary slice of L.
    """

    relation: str
    arity: int
    params: tuple[str, ...]
    witness: str
    rest: tuple[str, ...]
    guard: Formula
    matrix: Formula
    signature: Signature

    @property
    def universal_vars(self) -> tuple[str, ...]:
        return self.params + (self.witness,) + self.rest

    def __str__(self):
        from .syntax import print_formula

        vs = ",".join(self.universal_vars)
        lin = f"Lin({','.join(self.params)})"
        return f"exists {self.relation}/{self.arity}. forall {vs}. {lin} & ({print_formula(self.matrix)})"


def build_snp(p: PrenexSentence, relation: str = "L") -> SnpSentence:
    params, y, rest = split_alg1_prefix(p)
    if relation in p.signature:
        raise FormulaError(f"relation name {relation!r} already in the signature")
    sig = p.signature.union(Signature.of({relation: len(params) + 2}))
    atoms = [Atom(relation, params + (y, y))] + [Atom(relation, params + (y, x)) for x in params + rest]
    guard = conj(atoms)
    return SnpSentence(relation, len(params) + 2, params, y, rest, guard, Implies(guard, p.matrix), sig)


def eval_snp(s: Structure, snp: SnpSentence, L: frozenset) -> bool:
    """Evaluate the first-order part of the SNP sentence on (s, L)."""
    n = s.size
    k = len(snp.params)
    for a in itertools.product(s.domain, repeat=k):
        if not _is_linear_slice(L, a, n):
            return False
    expanded = Structure(snp.signature, n, {**dict(s.relations), snp.relation: L})
    check = compile_sentence(snp.matrix, snp.universal_vars)
    for values in itertools.product(s.domain, repeat=len(snp.universal_vars)):
        if not check(expanded, values=values):
            return False
    return True


def _is_linear_slice(L: frozenset, a: tuple, n: int) -> bool:
    le = {(b, c) for b in range(1, n + 1) for c in range(1, n + 1) if a + (b, c) in L}
    for b in range(1, n + 1):
        if (b, b) not in le:
            return False
        for c in range(b + 1, n + 1):
            if ((b, c) in le) == ((c, b) in le):
                return False
    # antisymmetric and total; transitivity
    for (b, c) in le:
        for d in range(1, n + 1):
            if (c, d) in le and (b, d) not in le:
                return False
    return True


@dataclass
class Alg1Run:
    """Trace of the repeat loop for one parameter tuple."""

    params: tuple[int, ...]
    chosen: list[int]
    order: Optional[tuple[int, ...]]
    counterexample: Optional[tuple[int, ...]]


def algorithm1_run(s: Structure, p: PrenexSentence, params: tuple[int, ...]) -> Alg1Run:
    pvars, y, rest = split_alg1_prefix(p)
    if len(params) != len(pvars):
        raise FormulaError(f"expected {len(pvars)} parameters, got {len(params)}")
    # φ'(ā, y) = ∀ rest. ψ
    inner = Forall(rest, p.matrix) if rest else p.matrix
    check = compile_sentence(inner, pvars + (y,))
    remaining = list(s.domain)
    chosen: list[int] = []
    while True:
        witness = next((e for e in remaining if check(s, remaining, params + (e,))), None)
        if witness is None:
            return Alg1Run(params, chosen, None, tuple(remaining))
        chosen.append(witness)
        remaining.remove(witness)
        if witness in params or not remaining:
            break
    return Alg1Run(params, chosen, tuple(chosen) + tuple(remaining), None)


def algorithm1(s: Structure, p: PrenexSentence) -> HerVerdict:
    """Certifying algorithm for ∀^k∃∀^m sentences.

    Per parameter tuple, repeatedly remove the least element witnessing the
    existential in what remains; the removal order becomes the order slice
    for that tuple.  A tuple whose remainder has no witness yields the
    remainder as a counterexample.
    """
    pvars, _, _ = split_alg1_prefix(p)
    k = len(pvars)
    orders = {}
    steps = 0
    for params in itertools.product(s.domain, repeat=k):
        run = algorithm1_run(s, p, params)
        steps += len(run.chosen) + (run.counterexample is not None)
        if run.counterexample is not None:
            return HerVerdict(False, CounterexampleCert(run.counterexample), "alg1",
                              {"parameter_tuples": len(orders) + 1, "witness_steps": steps})
        orders[params] = run.order
    cert = OrderCert(k, s.size, orders)
    return HerVerdict(True, cert, "alg1", {"parameter_tuples": len(orders), "witness_steps": steps})


# ---------------------------------------------------- hard prefixes

def _existential_universal_split(p: PrenexSentence) -> Optional[tuple[tuple[str, ...], tuple[str, ...]]]:
    if not p.quantifier_prefix.matches("E*A*"):
        return None
    ex = tuple(v for q, v in p.prefix if q == EXISTS)
    return ex, p.variables[len(ex):]


def witness_search(s: Structure, p: PrenexSentence) -> HerVerdict:
    """Search for a substructure falsifying an ∃^k∀^m sentence.

    A set I falsifies the sentence iff every k-tuple over I is "killed" by
    some m-tuple over I making the matrix false.  Being killed only gets
    easier as I grows, so the search grows I by adding a killing tuple for
    the first unkilled k-tuple, branching over all choices.  A branch that
    added a single element and failed excludes that element from its
    siblings.  Every falsifying set is reached from its least element.
    """
    ex, univ = _existential_universal_split(p)
    k, m = len(ex), len(univ)
    check = compile_sentence(p.matrix, ex + univ)
    domain = tuple(s.domain)
    kill_cache: dict[tuple, tuple[tuple[int, ...], ...]] = {}
    nodes = 0

    def killers(xs: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
        if xs not in kill_cache:
            kill_cache[xs] = tuple(ys for ys in itertools.product(domain, repeat=m) if not check(s, values=xs + ys))
        return kill_cache[xs]

    def unkilled(current: frozenset) -> Optional[tuple[int, ...]]:
        elems = sorted(current)
        for xs in itertools.product(elems, repeat=k):
            if not any(all(y in current for y in ys) for ys in killers(xs)):
                return xs
        return None

    seen: set[frozenset] = set()

    def grow(current: frozenset, excluded: frozenset) -> Optional[frozenset]:
        nonlocal nodes
        nodes += 1
        xs = unkilled(current)
        if xs is None:
            return current
        if (current, excluded) in seen:
            return None
        branches = []
        for ys in killers(xs):
            new = frozenset(ys) - current
            if new & excluded:
                continue
            if new not in branches:
                branches.append(new)
        # single-element extensions first, so their failures prune the rest
        branches.sort(key=lambda b: (len(b), sorted(b)))
        excl = set(excluded)
        for new in branches:
            if new & excl:
                continue
            found = grow(current | new, frozenset(excl))
            if found is not None:
                return found
            if len(new) == 1:
                excl |= new
        seen.add((current, excluded))
        return None

    for v in domain:
        found = grow(frozenset((v,)), frozenset(range(1, v)))
        if found is not None:
            return HerVerdict(False, CounterexampleCert(tuple(sorted(found))), "bruteforce",
                              {"search_nodes": nodes, "search": "witness"})
    return HerVerdict(True, ExhaustiveCert(s.size), "bruteforce", {"search_nodes": nodes, "search": "witness"})


def max_brute_size(override: Optional[int] = None) -> int:
    if override is not None:
        return override
    env = os.environ.get("HERMC_MAX_BRUTE")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"HERMC_MAX_BRUTE must be an integer, got {env!r}") from None
    return DEFAULT_MAX_BRUTE


def her_check(
    s: Structure,
    p: PrenexSentence,
    force: bool = False,
    max_brute: Optional[int] = None,
    jobs: int = 1,
) -> HerVerdict:
    """Hereditary check dispatched on the prefix class."""
    cls = classify_prefix(p.quantifier_prefix, p.signature)
    if cls is TractabilityClass.PTimeMonadic:
        v = monadic_check(s, p)
    elif cls is TractabilityClass.PTimeCollapse:
        v = collapse_check(s, p)
    elif cls is TractabilityClass.PTimeAlg1:
        v = algorithm1(s, p)
    else:
        cap = max_brute_size(max_brute)
        if s.size > cap and not force:
            raise ScaleRefusal(
                f"prefix {p.quantifier_prefix} has no polynomial-time procedure and the structure has "
                f"{s.size} > {cap} elements; pass force (--force) or raise HERMC_MAX_BRUTE"
            )
        message = f"exponential fallback for prefix {p.quantifier_prefix}"
        if _existential_universal_split(p) is not None:
            v = witness_search(s, p)
        else:
            v = her_bruteforce(s, p, jobs=jobs)
        v.stats["warning"] = message
    v.stats["class"] = cls.value
    return v


def is_hereditary(s: Structure, p: PrenexSentence) -> bool:
    return her_check(s, p, force=True).hereditary

