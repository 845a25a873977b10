import itertools

import pytest
from hypothesis import given, strategies as st

from hermc.corpus import all_digraphs, corpus_formula, corpus_formula_ast, corpus_text, formula_names
from hermc.evaluator import eval_fo
from hermc.formulas import And, Atom, Eq, Exists, Forall, FormulaError, Not, Or, free_vars
from hermc.structures import DIGRAPH, Signature, Structure, StructureError, induced_substructure
from hermc.syntax import (
    FormulaSyntaxError,
    GuardFormula,
    build_chi,
    expand_macros,
    format_structure,
    parse_formula,
    parse_formula_file,
    parse_sentence,
    parse_structure,
    print_formula,
    relativize,
    to_prenex,
)

DU = Signature.parse("E/2, U/1")
BIG = ("henson_phi", "henson5", "neq_eq", "neq_eq_display", "p3")
SMALL_NAMES = [n for n in formula_names() if n not in BIG and corpus_text(n, 2)[0] == DIGRAPH]


def digraphs_with_u(max_n):
    for n in range(1, max_n + 1):
        pairs = list(itertools.product(range(1, n + 1), repeat=2))
        for mask in range(1 << len(pairs)):
            edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
            for umask in range(1 << n):
                u = [(i + 1,) for i in range(n) if umask >> i & 1]
                yield Structure(DU, n, {"E": edges, "U": u})


def test_parse_sink():
    f = parse_formula("exists x. forall y. ~E(x,y)", DIGRAPH)
    assert f == Exists(("x",), Forall(("y",), Not(Atom("E", ("x", "y")))))


def test_parse_symedge():
    f = parse_formula("exists x,y. forall a. (~E(x,a) | (E(x,y) & E(y,x)))", DIGRAPH)
    body = Or((Not(Atom("E", ("x", "a"))), And((Atom("E", ("x", "y")), Atom("E", ("y", "x"))))))
    assert f == Exists(("x", "y"), Forall(("a",), body))


def test_unicode_aliases():
    a = parse_formula("∃x. ∀y. ¬E(x,y) ∧ x ≠ y", DIGRAPH)
    b = parse_formula("exists x. forall y. ~E(x,y) & x != y", DIGRAPH)
    assert a == b


def test_precedence():
    f = parse_formula("forall x. E(x,x) | E(x,x) & x = x -> x = x", DIGRAPH)
    body = f.body
    assert body.__class__.__name__ == "Implies"
    assert isinstance(body.left, Or)


@pytest.mark.parametrize("text", ["exists x. E(x", "exists x. F(x,x)", "exists x. E(x)", "forall . E(x,x)", "x = "])
def test_syntax_errors(text):
    with pytest.raises(FormulaError):
        parse_formula(text, DIGRAPH)


def test_error_position():
    with pytest.raises(FormulaSyntaxError) as exc:
        parse_formula("exists x.\n  E(x,x) &", DIGRAPH)
    assert exc.value.line == 2


@pytest.mark.parametrize("name", formula_names())
def test_corpus_round_trip(name):
    sig, text = corpus_text(name, 2)
    f = parse_formula(text, sig)
    assert print_formula(f) == " ".join(text.split())
    assert parse_formula(print_formula(f), sig) == f
    p = to_prenex(f, sig)
    assert parse_formula(print_formula(p), sig) == p.to_formula()


def test_prenex_disjunction_example():
    p = parse_sentence("(exists x. E(x,x)) | (exists y. E(y,y))", DIGRAPH)
    assert p.quantifier_prefix == "∃∃"
    q = parse_formula("exists x. exists y. (E(x,x) | E(y,y))", DIGRAPH)
    for n in range(1, 4):
        for d in all_digraphs(n, loops=True):
            assert eval_fo(d, p) == eval_fo(d, q)


@pytest.mark.parametrize("name", SMALL_NAMES)
def test_prenex_preserves_truth(name):
    f, sig = corpus_formula_ast(name, 2)
    p = to_prenex(f, sig)
    for n in range(1, 4):
        for d in all_digraphs(n, loops=True):
            assert eval_fo(d, p) == eval_fo(d, f), (name, d)


@st.composite
def structures(draw, sig, max_n=3):
    n = draw(st.integers(1, max_n))
    rels = {}
    for name, arity in sig:
        tuples = list(itertools.product(range(1, n + 1), repeat=arity))
        rels[name] = draw(st.sets(st.sampled_from(tuples)))
    return Structure(sig, n, rels)


@pytest.mark.parametrize("name", ["phi_T", "phi_T_eae", "andor", "neq_eq", "neq_eq_display"])
@given(data=st.data())
def test_prenex_preserves_truth_sampled(name, data):
    f, sig = corpus_formula_ast(name, 2)
    s = data.draw(structures(sig))
    assert eval_fo(s, to_prenex(f, sig)) == eval_fo(s, f)


def test_p3_prenex_on_tiny_structures():
    f, sig = corpus_formula_ast("p3")
    p = to_prenex(f, sig)
    assert len(p.prefix) == 21
    for n in (1, 2):
        for d in all_digraphs(n, loops=True):
            assert eval_fo(d, p) == eval_fo(d, f)


def test_neq_eq_macro_expansion():
    p = corpus_formula("neq_eq")
    assert not any(isinstance(x, str) and x.startswith("deg") for x in print_formula(p).split())
    assert "deg_" not in print_formula(p)
    # hand-expanded d_EQ(x) != 1: x does not have exactly one EQ-neighbour other than itself
    sig = Signature.parse("EQ/2, N/2")
    one = ("exists w1. w1 != x & (EQ(x,w1) | EQ(w1,x)) & forall u. u = x | u = w1 | ~EQ(x,u) & ~EQ(u,x)")
    hand = parse_formula(f"forall x. ~({one})", sig)
    macro = parse_formula("forall x. deg_EQ(x) != 1", sig)
    expanded = to_prenex(expand_macros(macro), sig)
    for n in range(1, 4):
        pairs = list(itertools.product(range(1, n + 1), repeat=2))
        for mask in range(1 << len(pairs)):
            s = Structure(sig, n, {"EQ": [pairs[i] for i in range(len(pairs)) if mask >> i & 1]})
            assert eval_fo(s, expanded) == eval_fo(s, hand) == eval_fo(s, macro)


def test_relativize_sink_keeps_prefix():
    p = corpus_formula("sink")
    r = relativize(p, GuardFormula.unary("U"), DU)
    assert r.quantifier_prefix == "∃∀"
    assert print_formula(r) == "exists x. forall y. U(y) -> U(x) & ~E(x,y)"


def test_relativize_existential():
    p = parse_sentence("exists x. E(x,x)", DIGRAPH)
    r = relativize(p, GuardFormula.unary("U"), DU)
    assert print_formula(r) == "forall y. exists x. ~U(y) | U(x) & E(x,x)"


@pytest.mark.parametrize("name", ["sink", "symedge", "serial", "has_edge", "forest", "cover"])
def test_relativize_biconditional(name):
    p = corpus_formula(name)
    r = relativize(p, GuardFormula.unary("U"), DU)
    if "∀" in p.quantifier_prefix:
        assert r.quantifier_prefix == p.quantifier_prefix
    for s in digraphs_with_u(2 if name in ("forest", "cover") else 3):
        u = sorted(t[0] for t in s["U"])
        expected = not u or eval_fo(induced_substructure(s, u), p)
        assert eval_fo(s, r) == expected


def test_relativize_non_qf_guard():
    guard = GuardFormula(parse_formula("exists z. E(x,z)", DIGRAPH), "x")
    p = corpus_formula("sink")
    r = relativize(p, guard)
    for n in range(1, 4):
        for d in all_digraphs(n, loops=True):
            u = [a for a in d.domain if any((a, b) in d["E"] for b in d.domain)]
            expected = not u or eval_fo(induced_substructure(d, u), p)
            assert eval_fo(d, r) == expected


def test_guard_needs_one_free_variable():
    with pytest.raises(FormulaError):
        GuardFormula(Atom("E", ("x", "y")), "x")


def test_chi_holds_without_models():
    sig0 = Signature.parse("E0/2")
    phi = parse_sentence("forall x. E0(x,x) & ~E0(x,x)", sig0)  # no model at all
    psi = corpus_formula("sink")
    chi = build_chi(phi, psi)
    assert set(chi.signature.names) == {"E0", "E", "U"}
    sig = chi.signature
    for n in (1, 2):
        slots = [(r, t) for r, a in sig for t in itertools.product(range(1, n + 1), repeat=a)]
        for mask in range(1 << len(slots)):
            rels = {}
            for i, (r, t) in enumerate(slots):
                if mask >> i & 1:
                    rels.setdefault(r, []).append(t)
            assert eval_fo(Structure(sig, n, rels), chi)


def test_chi_example_empty_u():
    sig0 = Signature.parse("E0/2")
    phi = parse_sentence("forall x. E0(x,x)", sig0)
    chi = build_chi(phi, corpus_formula("sink"))
    for n in (1, 2):
        pairs = list(itertools.product(range(1, n + 1), repeat=2))
        for mask in range(1 << len(pairs)):
            e = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
            for e0 in ([], pairs):
                s = Structure(chi.signature, n, {"E": e, "E0": e0})
                # U empty: (~phi)_U holds vacuously
                assert eval_fo(s, chi)


@given(data=st.data())
def test_chi_matches_its_definition(data):
    sig0 = Signature.parse("E0/1")
    phi = parse_sentence("exists x. forall y. E0(x) & ~E0(y) | x = y", sig0)
    psi = corpus_formula("sink")
    chi = build_chi(phi, psi)
    s = data.draw(structures(chi.signature, 3))
    u = sorted(t[0] for t in s["U"])
    rest = [a for a in s.domain if a not in u]
    left = not u or not eval_fo(induced_substructure(s, u), phi)
    right = not rest or eval_fo(induced_substructure(s, rest), psi)
    assert eval_fo(s, chi) == (left or right)


def test_chi_prefix_blocks():
    phi = parse_sentence("forall x. exists y. E0(x,y)", Signature.parse("E0/2"))
    psi = parse_sentence("exists x. forall y. ~E(x,y)", DIGRAPH)
    chi = build_chi(phi, psi)
    assert chi.quantifier_prefix.blocks() == psi.quantifier_prefix.blocks()


def test_structure_file_round_trip():
    text = "# td\nsignature E_b/2, E_r/2\ndomain 2\nE_b 1 2\nE_b 2 1\nE_r 1 2\nE_r 2 1\n"
    from hermc.corpus import gen_structure

    s = parse_structure(text)
    assert s == gen_structure("td", 2)
    assert parse_structure(format_structure(s, ["x"])) == s


@pytest.mark.parametrize("text", [
    "domain 2\n",
    "signature E/2\n",
    "signature E/2\ndomain 2\nE 1 3\n",
    "signature E/2\ndomain 2\nE 1\n",
    "signature E/2\ndomain 2\nF 1 2\n",
    "signature E/2\ndomain 0\n",
])
def test_structure_file_errors(text):
    with pytest.raises(StructureError):
        parse_structure(text)


def test_formula_file_header():
    f, sig = parse_formula_file("sig E/2\n# sink\nexists x. forall y. ~E(x,y)\n")
    assert sig == DIGRAPH and not free_vars(f)
    with pytest.raises(FormulaError):
        parse_formula_file("exists x. E(x,x)")
