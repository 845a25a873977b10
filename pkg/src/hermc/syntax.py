"""Text formats and formula transformations.

Formula grammar (ASCII; the Unicode connectives are accepted as aliases)::

    formula  := iff
    iff      := implies ('<->' implies)*          left-associative
    implies  := or ('->' implies)?                right-associative
    or       := and ('|' and)*
    and      := unary ('&' unary)*
    unary    := '~' unary | quant | primary
    quant    := ('exists' | 'forall') VAR (',' VAR)* '.' formula
    primary  := 'true' | 'false' | '(' formula ')'
              | REL '(' VAR (',' VAR)* ')'
              | VAR ('=' | '!=') VAR
              | DEG '(' VAR (';' VAR (',' VAR)*)? ')' ('=' | '!=') INT

A quantifier body extends as far to the right as possible.  ``DEG`` is
``deg_R``, ``outdeg_R`` or ``indeg_R`` for a binary relation ``R``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .formulas import (
    EXISTS,
    FORALL,
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
    Quantified,
    Top,
    all_vars,
    check_signature,
    conj,
    disj,
    free_vars,
    is_quantifier_free,
    negate_formula,
    substitute,
)
from .structures import Signature, SignatureError, Structure, StructureError


class FormulaSyntaxError(FormulaError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


# ---------------------------------------------------------------- tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<op><->|->|!=|[~&|().,;=]|[∃∀¬∧∨→↔≠])
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

_ALIASES = {"¬": "~", "∧": "&", "∨": "|", "→": "->", "↔": "<->", "≠": "!=", "∃": "exists", "∀": "forall"}
_KEYWORDS = {"exists", "forall", "true", "false"}
_DEGREE_RE = re.compile(r"(deg|outdeg|indeg)_([A-Za-z_][A-Za-z0-9_]*)$")


@dataclass
class _Tok:
    kind: str  # 'op', 'int', 'name', 'kw', 'eof'
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        s = m.group()
        col = pos - line_start + 1
        if kind == "op":
            s = _ALIASES.get(s, s)
            toks.append(_Tok("kw" if s in _KEYWORDS else "op", s, line, col))
        elif kind == "int":
            toks.append(_Tok("int", s, line, col))
        elif kind == "name":
            toks.append(_Tok("kw" if s in _KEYWORDS else "name", s, line, col))
        newlines = s.count("\n") if kind in ("ws", "comment") else 0
        if newlines:
            line += newlines
            line_start = pos + s.rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


# ------------------------------------------------------------------- parser

class _Parser:
    def __init__(self, text: str, signature: Signature):
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = signature

    def peek(self, offset: int = 0) -> _Tok:
        return self.toks[min(self.i + offset, len(self.toks) - 1)]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.peek()
        found = tok.text or "end of input"
        raise FormulaSyntaxError(f"{msg} (found {found!r})", tok.line, tok.col)

    def accept(self, text: str) -> bool:
        if self.peek().text == text and self.peek().kind in ("op", "kw"):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        if self.peek().text != text or self.peek().kind not in ("op", "kw"):
            self.error(f"expected {text!r}")
        return self.next()

    def var(self) -> str:
        t = self.peek()
        if t.kind != "name":
            self.error("expected a variable")
        self.i += 1
        return t.text

    def parse(self) -> Formula:
        f = self.iff()
        if self.peek().kind != "eof":
            self.error("unexpected trailing input")
        return f

    def iff(self) -> Formula:
        f = self.implies()
        while self.accept("<->"):
            f = Iff(f, self.implies())
        return f

    def implies(self) -> Formula:
        f = self.disjunction()
        if self.accept("->"):
            return Implies(f, self.implies())
        return f

    def disjunction(self) -> Formula:
        parts = [self.conjunction()]
        while self.accept("|"):
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self) -> Formula:
        parts = [self.unary()]
        while self.accept("&"):
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Formula:
        if self.accept("~"):
            return Not(self.unary())
        t = self.peek()
        if t.kind == "kw" and t.text in ("exists", "forall"):
            self.i += 1
            vs = [self.var()]
            while self.accept(","):
                vs.append(self.var())
            self.expect(".")
            body = self.iff()
            return (Exists if t.text == "exists" else Forall)(tuple(vs), body)
        return self.primary()

    def primary(self) -> Formula:
        t = self.peek()
        if t.kind == "kw" and t.text == "true":
            self.i += 1
            return Top()
        if t.kind == "kw" and t.text == "false":
            self.i += 1
            return Bottom()
        if self.accept("("):
            f = self.iff()
            self.expect(")")
            return f
        if t.kind != "name":
            self.error("expected a formula")
        if self.peek(1).text == "(":
            m = _DEGREE_RE.match(t.text)
            if m and t.text not in self.sig and m.group(2) in self.sig:
                return self.degree(m.group(1), m.group(2))
            return self.atom()
        left = self.var()
        op = self.peek()
        if self.accept("="):
            return Eq(left, self.var())
        if self.accept("!="):
            return Not(Eq(left, self.var()))
        self.error("expected '=' or '!=' after variable", op)

    def atom(self) -> Formula:
        t = self.next()
        if t.text not in self.sig:
            self.error(f"unknown relation symbol {t.text!r}", t)
        self.expect("(")
        args = [self.var()]
        while self.accept(","):
            args.append(self.var())
        self.expect(")")
        arity = self.sig.arity(t.text)
        if len(args) != arity:
            self.error(f"{t.text} has arity {arity} but is applied to {len(args)} arguments", t)
        return Atom(t.text, tuple(args))

    def degree(self, kind: str, rel: str) -> Formula:
        t = self.next()
        if self.sig.arity(rel) != 2:
            self.error(f"degree macro needs a binary relation, {rel} has arity {self.sig.arity(rel)}", t)
        self.expect("(")
        v = self.var()
        exclude = []
        if self.accept(";"):
            exclude.append(self.var())
            while self.accept(","):
                exclude.append(self.var())
        self.expect(")")
        negated = False
        if self.accept("!="):
            negated = True
        else:
            self.expect("=")
        n = self.peek()
        if n.kind != "int":
            self.error("expected a non-negative integer")
        self.i += 1
        f = Degree(kind, rel, v, tuple(exclude), int(n.text))
        return Not(f) if negated else f


def parse_formula(text: str, signature: Signature) -> Formula:
    return _Parser(text, signature).parse()


# ------------------------------------------------------------------ printer

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}


def _prec(f: Formula) -> int:
    if isinstance(f, Quantified):
        return 0
    return _PREC.get(type(f), 5)


def print_formula(f: Formula | PrenexSentence) -> str:
    if isinstance(f, PrenexSentence):
        f = f.to_formula()
    return _print(f)


def _wrap(f: Formula, parent_prec: int, same_op_ok: bool = False) -> str:
    p = _prec(f)
    text = _print(f)
    if p == 0 or p < parent_prec or (p == parent_prec and not same_op_ok):
        return f"({text})"
    return text


def _print(f: Formula) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Atom):
        return f"{f.rel}({','.join(f.args)})"
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}"
    if isinstance(f, Degree):
        return f"{_degree_head(f)} = {f.count}"
    if isinstance(f, Not):
        b = f.body
        if isinstance(b, Eq):
            return f"{b.left} != {b.right}"
        if isinstance(b, Degree):
            return f"{_degree_head(b)} != {b.count}"
        if isinstance(b, (Atom, Top, Bottom, Not)):
            return "~" + _print(b)
        return f"~({_print(b)})"
    if isinstance(f, (And, Or)):
        op = " & " if isinstance(f, And) else " | "
        return op.join(_wrap(p, _prec(f)) for p in f.parts)
    if isinstance(f, Implies):
        right = f.right
        rtext = _print(right) if _prec(right) > 2 else f"({_print(right)})"
        return f"{_wrap(f.left, 2)} -> {rtext}"
    if isinstance(f, Iff):
        return f"{_wrap(f.left, 1)} <-> {_wrap(f.right, 1)}"
    if isinstance(f, Quantified):
        kw = "exists" if isinstance(f, Exists) else "forall"
        return f"{kw} {','.join(f.vars)}. {_print(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


def _degree_head(f: Degree) -> str:
    args = f.var + ("; " + ", ".join(f.exclude) if f.exclude else "")
    return f"{f.kind}_{f.rel}({args})"


# ---------------------------------------------------- macros and prenexing

class _Fresh:
    """Fresh names v1, v2, ... avoiding a growing set of used names."""

    def __init__(self, used: Iterable[str] = ()):
        self.used = set(used)
        self.counter = itertools.count(1)

    def __call__(self, hint: Optional[str] = None) -> str:
        if hint is not None and hint not in self.used:
            self.used.add(hint)
            return hint
        while True:
            name = f"v{next(self.counter)}"
            if name not in self.used:
                self.used.add(name)
                return name


def _neighbour(kind: str, rel: str, x: str, w: str) -> Formula:
    if kind == "outdeg":
        return Atom(rel, (x, w))
    if kind == "indeg":
        return Atom(rel, (w, x))
    return Or((Atom(rel, (x, w)), Atom(rel, (w, x))))


def _expand_degree(d: Degree, fresh: _Fresh) -> Formula:
    def counted(w: str) -> Formula:
        return conj([_neighbour(d.kind, d.rel, d.var, w), Not(Eq(w, d.var))] + [Not(Eq(w, e)) for e in d.exclude])

    ws = [fresh("w") for _ in range(d.count)]
    u = fresh("u")
    distinct = [Not(Eq(a, b)) for a, b in itertools.combinations(ws, 2)]
    at_most = Forall((u,), Implies(counted(u), disj(Eq(u, w) for w in ws)))
    if not ws:
        return at_most
    return Exists(tuple(ws), conj([counted(w) for w in ws] + distinct + [at_most]))


def expand_macros(f: Formula, fresh: Optional[_Fresh] = None) -> Formula:
    """Replace degree macros by plain first-order formulas."""
    fresh = fresh or _Fresh(all_vars(f))
    if isinstance(f, Degree):
        return _expand_degree(f, fresh)
    if isinstance(f, Not):
        return Not(expand_macros(f.body, fresh))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(expand_macros(p, fresh) for p in f.parts))
    if isinstance(f, (Implies, Iff)):
        return type(f)(expand_macros(f.left, fresh), expand_macros(f.right, fresh))
    if isinstance(f, Quantified):
        return type(f)(f.vars, expand_macros(f.body, fresh))
    return f


def eliminate_implications(f: Formula) -> Formula:
    if isinstance(f, Implies):
        return Or((negate_formula(eliminate_implications(f.left)), eliminate_implications(f.right)))
    if isinstance(f, Iff):
        a, b = eliminate_implications(f.left), eliminate_implications(f.right)
        return And((Or((negate_formula(a), b)), Or((a, negate_formula(b)))))
    if isinstance(f, Not):
        return Not(eliminate_implications(f.body))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(eliminate_implications(p) for p in f.parts))
    if isinstance(f, Quantified):
        return type(f)(f.vars, eliminate_implications(f.body))
    return f


def rename_apart(f: Formula, fresh: Optional[_Fresh] = None) -> Formula:
    """Give every binder a distinct name, also distinct from the free
    variables.  Names are kept when they do not clash."""
    fresh = fresh or _Fresh(free_vars(f))
    if isinstance(f, Quantified):
        mapping = {}
        new_vars = []
        for v in f.vars:
            nv = fresh(v)
            new_vars.append(nv)
            if nv != v:
                mapping[v] = nv
        return type(f)(tuple(new_vars), rename_apart(substitute(f.body, mapping), fresh))
    if isinstance(f, Not):
        return Not(rename_apart(f.body, fresh))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(rename_apart(p, fresh) for p in f.parts))
    if isinstance(f, (Implies, Iff)):
        return type(f)(rename_apart(f.left, fresh), rename_apart(f.right, fresh))
    return f


def _dual(q: str) -> str:
    return FORALL if q == EXISTS else EXISTS


def _pull(f: Formula) -> tuple[list[tuple[str, str]], Formula]:
    if isinstance(f, Quantified):
        q = EXISTS if isinstance(f, Exists) else FORALL
        prefix, matrix = _pull(f.body)
        return [(q, v) for v in f.vars] + prefix, matrix
    if isinstance(f, Not):
        prefix, matrix = _pull(f.body)
        return [(_dual(q), v) for q, v in prefix], negate_formula(matrix)
    if isinstance(f, (And, Or)):
        prefix, parts = [], []
        for p in f.parts:
            pp, m = _pull(p)
            prefix += pp
            parts.append(m)
        return prefix, type(f)(tuple(parts))
    return [], f


def to_prenex(f: Formula, signature: Signature) -> PrenexSentence:
    """Equivalent prenex sentence.  Quantifiers are pulled out left to right;
    bound variables that clash are renamed v1, v2, ..."""
    if free_vars(f):
        raise FormulaError(f"not a sentence: free variables {sorted(free_vars(f))}")
    check_signature(f, signature)
    g = rename_apart(eliminate_implications(expand_macros(f)))
    prefix, matrix = _pull(g)
    return PrenexSentence(tuple(prefix), matrix, signature)


def parse_sentence(text: str, signature: Signature) -> PrenexSentence:
    return to_prenex(parse_formula(text, signature), signature)


# ----------------------------------------------------- relativization

@dataclass(frozen=True)
class GuardFormula:
    """A formula with exactly one free variable ``var``."""

    formula: Formula
    var: str

    def __post_init__(self):
        fv = free_vars(self.formula)
        if fv != {self.var}:
            raise FormulaError(f"guard must have exactly one free variable {self.var!r}, has {sorted(fv)}")

    def at(self, v: str, avoid: Iterable[str] = ()) -> Formula:
        f = self.formula
        bound = all_vars(f) - {self.var}
        clash = bound & (set(avoid) | {v})
        if clash:
            fresh = _Fresh(all_vars(f) | set(avoid) | {v})
            f = rename_apart(f, fresh)
        return substitute(f, {self.var: v})

    @classmethod
    def unary(cls, rel: str, negated: bool = False) -> "GuardFormula":
        atom = Atom(rel, ("x",))
        return cls(Not(atom) if negated else atom, "x")


def relativize(p: PrenexSentence, guard: GuardFormula, signature: Optional[Signature] = None) -> PrenexSentence:
    """Sentence true in A iff no element satisfies the guard or the
    substructure on the guarded elements satisfies ``p``."""
    sig = p.signature.union(signature) if signature is not None else p.signature
    used = set(p.variables)
    xi = lambda v: guard.at(v, used)  # noqa: E731
    if all(q == EXISTS for q, _ in p.prefix):
        y = _Fresh(used)("y")
        f = Or((
            Forall((y,), Not(guard.at(y, used | {y}))),
            Exists(p.variables, conj([xi(v) for v in p.variables] + [p.matrix])) if p.prefix
            else p.matrix,
        ))
        return to_prenex(f, sig)
    univ = [v for q, v in p.prefix if q == FORALL]
    exist = [v for q, v in p.prefix if q == EXISTS]
    matrix = Implies(conj(xi(v) for v in univ), conj([xi(v) for v in exist] + [p.matrix]))
    if is_quantifier_free(guard.formula):
        return PrenexSentence(p.prefix, matrix, sig)
    return to_prenex(_nest(p.prefix, matrix), sig)


def _nest(prefix, matrix: Formula) -> Formula:
    for q, v in reversed(prefix):
        matrix = (Exists if q == EXISTS else Forall)((v,), matrix)
    return matrix


def build_chi(phi: PrenexSentence, psi: PrenexSentence, unary: str = "U", binary: str = "E") -> PrenexSentence:
    """The sentence ``(~phi)_U | psi_{~U}`` over phi's signature plus U and E.

    When both disjuncts end up with the same prefix word, quantifiers are
    pulled out pairwise and adjacent existential pairs share one variable,
    so the block pattern of the result equals that word.
    """
    for sym in (unary, binary):
        if sym in phi.signature:
            raise SignatureError(f"symbol {sym!r} clashes with the signature of phi")
    if set(psi.signature.names) - {binary}:
        raise SignatureError(f"psi must be over {{{binary}}}, got {psi.signature}")
    sig = phi.signature.union(Signature.of({unary: 1, binary: 2}))
    left = relativize(phi.negate(), GuardFormula.unary(unary), sig)
    right = relativize(_rename(psi, set(left.variables)), GuardFormula.unary(unary, negated=True), sig)
    if left.quantifier_prefix != right.quantifier_prefix:
        return to_prenex(Or((left.to_formula(), right.to_formula())), sig)
    prefix = []
    rmap = {}
    for (q, lv), (_, rv) in zip(left.prefix, right.prefix):
        if q == EXISTS:
            prefix.append((q, lv))
            rmap[rv] = lv
        else:
            prefix += [(q, lv), (q, rv)]
    return PrenexSentence(tuple(prefix), Or((left.matrix, substitute(right.matrix, rmap))), sig)


def _rename(p: PrenexSentence, avoid: set[str]) -> PrenexSentence:
    fresh = _Fresh(avoid | set(p.variables))
    mapping = {v: fresh() for v in p.variables if v in avoid}
    prefix = tuple((q, mapping.get(v, v)) for q, v in p.prefix)
    return PrenexSentence(prefix, substitute(p.matrix, mapping), p.signature)


# -------------------------------------------------------- file formats

def parse_structure(text: str) -> Structure:
    """Parse the structure file format::

        # comment
        signature E/2, U/1
        domain 3
        E 1 2
        U 3
    """
    sig: Optional[Signature] = None
    size: Optional[int] = None
    rels: dict[str, set] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if head == "signature":
                if sig is not None:
                    raise StructureError("duplicate signature line")
                sig = Signature.parse(rest)
                rels = {n: set() for n in sig.names}
            elif head == "domain":
                if size is not None:
                    raise StructureError("duplicate domain line")
                if not rest.isdigit() or int(rest) < 1:
                    raise StructureError(f"domain size must be a positive integer, got {rest!r}")
                size = int(rest)
            else:
                if sig is None or size is None:
                    raise StructureError("tuple before signature/domain declaration")
                if head not in sig:
                    raise StructureError(f"unknown relation {head!r}")
                parts = rest.split()
                if not all(x.isdigit() for x in parts):
                    raise StructureError(f"tuple entries must be integers: {rest!r}")
                t = tuple(int(x) for x in parts)
                if len(t) != sig.arity(head):
                    raise StructureError(f"{head} has arity {sig.arity(head)}, got {len(t)} entries")
                bad = [e for e in t if not 1 <= e <= size]
                if bad:
                    raise StructureError(f"element {bad[0]} outside domain 1..{size}")
                rels[head].add(t)
        except (StructureError, SignatureError) as exc:
            raise StructureError(f"line {lineno}: {exc}") from exc
    if sig is None:
        raise StructureError("missing signature line")
    if size is None:
        raise StructureError("missing domain line")
    return Structure(sig, size, rels)


def format_structure(s: Structure, comments: Iterable[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(f"signature {s.signature}".rstrip())
    lines.append(f"domain {s.size}")
    for name in s.signature.names:
        for t in sorted(s[name]):
            lines.append(f"{name} {' '.join(map(str, t))}")
    return "\n".join(lines) + "\n"


def parse_formula_file(text: str, signature: Optional[Signature] = None) -> tuple[Formula, Signature]:
    """A formula file is an optional ``sig NAME/ARITY,...`` header followed
    by one sentence.  ``signature`` is used when there is no header."""
    lines = text.splitlines()
    header = None
    body = []
    for line in lines:
        stripped = line.strip()
        if header is None and not body and stripped.startswith("sig "):
            header = Signature.parse(stripped[4:])
            body.append("")
        else:
            body.append(line)
    sig = header or signature
    if sig is None:
        raise FormulaError("formula file has no 'sig' header and no signature was given")
    return parse_formula("\n".join(body), sig), sig


def format_formula_file(f: Formula | PrenexSentence, signature: Signature) -> str:
    return f"sig {signature}\n{print_formula(f)}\n"


def iter_prefix_words(n: int) -> Iterator[str]:
    for word in itertools.product("EA", repeat=n):
        yield "".join(word)
