"""First-order model checking, homomorphism search, and a directed-cycle oracle.

Formulas are compiled once into nested closures over a slot environment,
so quantifier loops do not re-dispatch on AST node types.
"""
from __future__ import annotations

import time
from functools import lru_cache
from typing import Callable, Mapping, Optional, Sequence

from .formulas import (
    And,
    Atom,
    Bottom,
    Degree,
    Eq,
    Exists,
    Forall,
    Formula,
    FormulaError,
    Iff,
    Implies,
    Not,
    Or,
    PrenexSentence,
    Top,
    free_vars,
    relations_used,
)
from .structures import DIGRAPH, Structure, StructureError


class EvaluationTimeout(RuntimeError):
    pass


# A compiled formula takes (relations, domain, env) and returns a bool.
Compiled = Callable[[Mapping[str, frozenset], Sequence[int], list], bool]


def _compile(f: Formula, slots: dict[str, int], deadline: Optional[float]) -> Compiled:
    if isinstance(f, Top):
        return lambda rels, dom, env: True
    if isinstance(f, Bottom):
        return lambda rels, dom, env: False
    if isinstance(f, Atom):
        rel = f.rel
        idx = tuple(slots[a] for a in f.args)
        if len(idx) == 1:
            (i,) = idx
            return lambda rels, dom, env: (env[i],) in rels[rel]
        if len(idx) == 2:
            i, j = idx
            return lambda rels, dom, env: (env[i], env[j]) in rels[rel]
        return lambda rels, dom, env: tuple(env[i] for i in idx) in rels[rel]
    if isinstance(f, Eq):
        i, j = slots[f.left], slots[f.right]
        return lambda rels, dom, env: env[i] == env[j]
    if isinstance(f, Degree):
        return _compile_degree(f, slots)
    if isinstance(f, Not):
        body = _compile(f.body, slots, deadline)
        return lambda rels, dom, env: not body(rels, dom, env)
    if isinstance(f, And):
        parts = [_compile(p, slots, deadline) for p in f.parts]
        return lambda rels, dom, env: all(p(rels, dom, env) for p in parts)
    if isinstance(f, Or):
        parts = [_compile(p, slots, deadline) for p in f.parts]
        return lambda rels, dom, env: any(p(rels, dom, env) for p in parts)
    if isinstance(f, Implies):
        a, b = _compile(f.left, slots, deadline), _compile(f.right, slots, deadline)
        return lambda rels, dom, env: (not a(rels, dom, env)) or b(rels, dom, env)
    if isinstance(f, Iff):
        a, b = _compile(f.left, slots, deadline), _compile(f.right, slots, deadline)
        return lambda rels, dom, env: a(rels, dom, env) == b(rels, dom, env)
    if isinstance(f, (Exists, Forall)):
        inner = dict(slots)
        for v in f.vars:
            inner[v] = max(inner.values(), default=-1) + 1
        body = _compile(f.body, inner, deadline)
        for v in reversed(f.vars):
            body = _quantifier(isinstance(f, Exists), inner[v], body, deadline)
        return body
    raise TypeError(f"not a formula: {f!r}")


def _quantifier(existential: bool, slot: int, body: Compiled, deadline: Optional[float]) -> Compiled:
    if deadline is None:
        if existential:
            def ex(rels, dom, env):
                for e in dom:
                    env[slot] = e
                    if body(rels, dom, env):
                        return True
                return False
            return ex

        def fa(rels, dom, env):
            for e in dom:
                env[slot] = e
                if not body(rels, dom, env):
                    return False
            return True
        return fa

    def timed(rels, dom, env):
        if time.monotonic() > deadline:
            raise EvaluationTimeout("evaluation exceeded its time budget")
        for e in dom:
            env[slot] = e
            if body(rels, dom, env) == existential:
                return existential
        return not existential
    return timed


def _compile_degree(f: Degree, slots: dict[str, int]) -> Compiled:
    rel, kind, count = f.rel, f.kind, f.count
    v = slots[f.var]
    excl = tuple(slots[e] for e in f.exclude)

    def degree(rels, dom, env):
        x = env[v]
        skip = {x} | {env[i] for i in excl}
        r = rels[rel]
        n = 0
        for w in dom:
            if w in skip:
                continue
            if kind == "outdeg":
                hit = (x, w) in r
            elif kind == "indeg":
                hit = (w, x) in r
            else:
                hit = (x, w) in r or (w, x) in r
            n += hit
        return n == count
    return degree


@lru_cache(maxsize=4096)
def _compiled(f: Formula, free: tuple[str, ...]) -> Compiled:
    slots = {v: i for i, v in enumerate(free)}
    return _compile(f, slots, None)


def compile_sentence(f: Formula | PrenexSentence, free: Sequence[str] = ()) -> Callable:
    """Compile once, evaluate many times: returns ``g(structure, domain=None, values=())``."""
    if isinstance(f, PrenexSentence):
        f = f.to_formula()
    free = tuple(free)
    c = _compiled(f, free)
    nslots = _slot_count(f) + len(free)

    def run(s: Structure, domain: Optional[Sequence[int]] = None, values: Sequence[int] = ()) -> bool:
        env = list(values) + [0] * nslots
        return c(s.relations, s.domain if domain is None else domain, env)
    return run


def _slot_count(f: Formula) -> int:
    if isinstance(f, (Exists, Forall)):
        return len(f.vars) + _slot_count(f.body)
    if isinstance(f, Not):
        return _slot_count(f.body)
    if isinstance(f, (And, Or)):
        return max((_slot_count(p) for p in f.parts), default=0)
    if isinstance(f, (Implies, Iff)):
        return max(_slot_count(f.left), _slot_count(f.right))
    return 0


def eval_fo(
    s: Structure,
    f: Formula | PrenexSentence,
    assignment: Optional[Mapping[str, int]] = None,
    domain: Optional[Sequence[int]] = None,
    deadline: Optional[float] = None,
) -> bool:
    """Truth value of ``f`` in ``s`` under ``assignment``.

    ``domain`` restricts quantification to a subset of the universe, which
    evaluates ``f`` in the induced substructure without renumbering it.
    ``deadline`` is a ``time.monotonic()`` value after which evaluation aborts.
    """
    if isinstance(f, PrenexSentence):
        if f.signature != s.signature and any(n not in s.signature for n in f.signature.names):
            raise FormulaError(f"sentence over {f.signature} evaluated on a structure over {s.signature}")
        f = f.to_formula()
    assignment = dict(assignment or {})
    missing = free_vars(f) - set(assignment)
    if missing:
        raise FormulaError(f"unassigned free variables {sorted(missing)}")
    unknown = relations_used(f) - set(s.signature.names)
    if unknown:
        raise FormulaError(f"unknown relation symbols {sorted(unknown)}")
    for v, e in assignment.items():
        if not 1 <= e <= s.size:
            raise StructureError(f"{v} assigned to {e}, outside domain 1..{s.size}")
    free = tuple(sorted(assignment))
    dom = s.domain if domain is None else tuple(domain)
    if deadline is None:
        c = _compiled(f, free)
    else:
        c = _compile(f, {v: i for i, v in enumerate(free)}, deadline)
    env = [assignment[v] for v in free] + [0] * _slot_count(f)
    return c(s.relations, dom, env)


# ---------------------------------------------------------------- homomorphisms

def find_homomorphism(a: Structure, b: Structure, injective: bool = False) -> Optional[dict[int, int]]:
    """A map h: A -> B preserving every relation, or None.

    With ``injective=True`` the search is for an embedding: h is injective and
    also reflects relations, so A is isomorphic to the induced image.
    Elements of A are assigned in increasing order, images tried in
    increasing order.
    """
    if a.signature != b.signature:
        raise StructureError(f"signature mismatch: {a.signature} vs {b.signature}")
    names = a.signature.names
    # constraints checked once all their elements are assigned
    by_last: dict[int, list[tuple[str, tuple[int, ...]]]] = {x: [] for x in a.domain}
    for name in names:
        for t in a[name]:
            by_last[max(t)].append((name, t))
    arity = {n: a.signature.arity(n) for n in names}
    h: dict[int, int] = {}
    used: set[int] = set()

    def consistent(x: int) -> bool:
        for name, t in by_last[x]:
            if tuple(h[e] for e in t) not in b[name]:
                return False
        if injective:
            # reflection: tuples of B over the image of assigned elements that
            # involve h(x) must come from tuples of A
            assigned = sorted(h)
            for name in names:
                k = arity[name]
                for t in b[name]:
                    if h[x] not in t:
                        continue
                    pre = []
                    for e in t:
                        src = next((y for y in assigned if h[y] == e), None)
                        if src is None:
                            break
                        pre.append(src)
                    else:
                        if len(pre) == k and tuple(pre) not in a[name]:
                            return False
        return True

    def search(x: int) -> bool:
        if x > a.size:
            return True
        for y in b.domain:
            if injective and y in used:
                continue
            h[x] = y
            used.add(y)
            if consistent(x) and search(x + 1):
                return True
            del h[x]
            used.discard(y)
        return False

    if not search(1):
        return None
    result = dict(h)
    assert _is_homomorphism(a, b, result, injective), "homomorphism search returned an invalid map"
    return result


def _is_homomorphism(a: Structure, b: Structure, h: Mapping[int, int], injective: bool) -> bool:
    for name in a.signature.names:
        image = {tuple(h[e] for e in t) for t in a[name]}
        if not image <= b[name]:
            return False
        if injective:
            inv = {v: k for k, v in h.items()}
            for t in b[name]:
                if all(e in inv for e in t) and tuple(inv[e] for e in t) not in a[name]:
                    return False
    return not injective or len(set(h.values())) == len(h)


# ----------------------------------------------------------- cycle oracle

def every_cycle_has_symmetric_edge(d: Structure) -> bool:
    """True iff the vertex set of every directed cycle induces a symmetric
    edge: two of its vertices joined in both directions, or a loop.

    Exponential: searches simple directed paths that avoid symmetric pairs,
    starting at their least vertex, and reports whether any closes into a
    cycle.
    """
    if d.signature != DIGRAPH:
        raise StructureError(f"expected a digraph over E/2, got {d.signature}")
    edges = d["E"]
    succ = {v: sorted(w for (u, w) in edges if u == v) for v in d.domain}
    sym = {v: {w for w in d.domain if (v, w) in edges and (w, v) in edges} for v in d.domain}

    def bad_cycle_from(start: int) -> bool:
        # vertices on the path, and the vertices symmetric to any of them
        path = [start]
        on_path = {start}

        def extend(v: int) -> bool:
            for w in succ[v]:
                if w < start:
                    continue
                if w == start:
                    return True
                if w in on_path:
                    continue
                # path vertices are pairwise non-symmetric and loop-free
                if w in sym[w] or any(w in sym[u] for u in path):
                    continue
                path.append(w)
                on_path.add(w)
                if extend(w):
                    return True
                path.pop()
                on_path.discard(w)
            return False

        if start in sym[start]:
            return False
        return extend(start)

    return not any(bad_cycle_from(v) for v in d.domain)

