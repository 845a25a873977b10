import itertools

import pytest
from hypothesis import given, settings, strategies as st

from hermc.certificates import CounterexampleCert, ExhaustiveCert, OrderCert, verify_certificate
from hermc.corpus import all_digraphs, corpus_formula, gen_structure
from hermc.formulas import FormulaError
from hermc.hereditary import (
    ScaleRefusal,
    TractabilityClass,
    algorithm1,
    algorithm1_run,
    build_snp,
    classify_prefix,
    collapse_check,
    collapse_rewrite,
    eval_snp,
    has_hard_subword,
    her_bruteforce,
    her_check,
    monadic_bound,
    witness_search,
)
from hermc.evaluator import eval_fo
from hermc.structures import DIGRAPH, Signature, Structure, digraph, induced_substructure, substructures_iter
from hermc.syntax import iter_prefix_words, parse_sentence, print_formula
from test_structures import digraphs

T = TractabilityClass


@pytest.mark.parametrize("word, expected", [
    ("∀∀∃∃", T.PTimeCollapse),
    ("∃∀∀", T.PTimeAlg1),
    ("∃∃∀", T.HardPrefix),
    ("∃∀∃", T.HardPrefix),
    ("AAEA", T.PTimeAlg1),
    ("AE", T.PTimeCollapse),
    ("", T.PTimeCollapse),
])
def test_classify_examples(word, expected):
    assert classify_prefix(word, DIGRAPH) is expected


def test_classify_monadic():
    assert classify_prefix("EEA", Signature.parse("U/1, W/1")) is T.PTimeMonadic


@pytest.mark.parametrize("n", range(0, 9))
def test_dichotomy_is_exhaustive(n):
    for word in iter_prefix_words(n):
        cls = classify_prefix(word, DIGRAPH)
        assert (cls is T.HardPrefix) == has_hard_subword(word), word


def test_bruteforce_examples():
    sink, chordal = corpus_formula("sink"), corpus_formula("chordal")
    assert her_bruteforce(gen_structure("dpath", 3), sink).hereditary
    v = her_bruteforce(gen_structure("symcycle", 4), chordal)
    assert not v.hereditary and v.counterexample == (1, 2, 3, 4)
    assert her_bruteforce(gen_structure("complete", 3), chordal).hereditary


def test_bruteforce_returns_least_counterexample():
    d = digraph(4, [(2, 3), (3, 2), (1, 1)])
    v = her_bruteforce(d, corpus_formula("sink"))
    assert v.counterexample == (1,)
    assert v.stats["substructures"] == 1


def test_bruteforce_parallel_is_deterministic():
    p = corpus_formula("chordal")
    for d in [gen_structure("symcycle", 6), gen_structure("complete", 5)]:
        a, b = her_bruteforce(d, p), her_bruteforce(d, p, jobs=2)
        assert (a.hereditary, a.certificate) == (b.hereditary, b.certificate)


def test_collapse_rewrite_serial():
    p = collapse_rewrite(corpus_formula("serial"))
    assert print_formula(p) == "forall x. E(x,x)"


def test_collapse_rewrite_transitive():
    p = collapse_rewrite(corpus_formula("transitive_witness"))
    assert print_formula(p) == "forall x,y. E(x,x) & E(x,y) | E(x,y) & E(y,y)"
    q = corpus_formula("transitive_witness")
    for n in range(1, 5):
        for d in all_digraphs(n, loops=True):
            assert eval_fo(d, p) == her_bruteforce(d, q).hereditary


def test_collapse_rewrite_purely_existential():
    p = collapse_rewrite(corpus_formula("has_edge"))
    assert p.quantifier_prefix == "∀"
    assert print_formula(p) == "forall x1. E(x1,x1)"


def test_collapse_rewrite_universal_unchanged():
    p = corpus_formula("reflexive")
    assert collapse_rewrite(p) == p


def test_collapse_rewrite_rejects():
    with pytest.raises(FormulaError):
        collapse_rewrite(corpus_formula("sink"))


@pytest.mark.parametrize("name", ["serial", "mutual", "transitive_witness", "has_edge"])
def test_collapse_matches_rewrite(name):
    p = corpus_formula(name)
    r = collapse_rewrite(p)
    for n in range(1, 4):
        for d in all_digraphs(n, loops=True):
            assert collapse_check(d, p).hereditary == eval_fo(d, r)


def test_monadic_bound():
    sig = Signature.parse("U/1, W/1")
    assert monadic_bound(parse_sentence("exists x. U(x)", sig)) == 4
    assert monadic_bound(parse_sentence("exists x,y. x != y & U(x)", sig)) == 8


def test_monadic_equality_needs_larger_bound():
    # two distinct U-elements: the plain 2^|tau| bound would look only at
    # one-element substructures per type and miss the failure on {1,2}
    sig = Signature.parse("U/1")
    p = parse_sentence("forall x,y. x = y | ~U(x) | ~U(y)", sig)
    s = Structure(sig, 2, {"U": [(1,), (2,)]})
    assert not her_check(s, p).hereditary
    assert not her_bruteforce(s, p).hereditary


def test_snp_sink():
    snp = build_snp(corpus_formula("sink"))
    assert snp.arity == 2
    assert print_formula(snp.guard) == "L(x,x) & L(x,y)"
    assert str(snp) == "exists L/2. forall x,y. Lin() & (L(x,x) & L(x,y) -> ~E(x,y))"


def test_snp_forest_guard():
    snp = build_snp(corpus_formula("forest"))
    assert snp.arity == 2
    assert len(snp.guard.parts) == 3


def test_snp_figure_sentence_is_ternary():
    snp = build_snp(corpus_formula("fig_chordal"))
    assert snp.arity == 3 and snp.params == ("x",)


def test_snp_rejects_hard_prefix():
    with pytest.raises(FormulaError):
        build_snp(corpus_formula("symedge"))


@pytest.mark.parametrize("name", ["sink", "forest", "chordal", "fig_chordal"])
def test_snp_accepts_certificate_relation(name):
    p = corpus_formula(name)
    snp = build_snp(p)
    for n in range(1, 4):
        for d in all_digraphs(n):
            v = algorithm1(d, p)
            if v.hereditary:
                assert eval_snp(d, snp, v.certificate.relation())


def test_snp_exists_iff_hereditary_small():
    # brute force over all L on 3 elements: some L satisfies the sentence
    # exactly when the digraph is hereditary
    p = corpus_formula("sink")
    snp = build_snp(p)
    for d in all_digraphs(3):
        exists = any(
            eval_snp(d, snp, frozenset((o[i], o[j]) for i in range(3) for j in range(i, 3)))
            for o in itertools.permutations(d.domain)
        )
        assert exists == her_bruteforce(d, p).hereditary


def test_alg1_p2_order():
    v = algorithm1(gen_structure("dpath", 2), corpus_formula("sink"))
    assert v.hereditary and v.method == "alg1"
    assert v.certificate.orders[()] == (2, 1)


def test_alg1_c3():
    v = algorithm1(gen_structure("dcycle", 3), corpus_formula("sink"))
    assert not v.hereditary and v.counterexample == (1, 2, 3)


def figure_graph():
    # a clique 1..4 missing the edge 1-4, then a=5, b=6 and a path 7-8-9
    # with a-b, a-7, b-7, b-9; all edges symmetric
    und = [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (5, 6), (5, 7), (7, 8), (8, 9), (9, 6), (6, 7)]
    return digraph(9, und + [(v, u) for u, v in und])


def test_alg1_figure_runs():
    p = corpus_formula("fig_chordal")
    g = figure_graph()
    run_b = algorithm1_run(g, p, (6,))
    assert run_b.counterexample == (5, 6, 7, 8, 9)
    run_a = algorithm1_run(g, p, (5,))
    assert run_a.counterexample is None and sorted(run_a.order) == list(g.domain)
    v = algorithm1(g, p)
    assert not v.hereditary and verify_certificate(g, p, v.certificate)


def test_her_check_dispatch():
    assert her_check(gen_structure("dpath", 3), corpus_formula("sink")).method == "alg1"
    v = her_check(gen_structure("td", 2), corpus_formula("phi_T"))
    assert not v.hereditary and v.method == "bruteforce" and "warning" in v.stats
    assert her_check(gen_structure("dcycle", 3), corpus_formula("serial")).method == "collapse"
    u = Structure(Signature.parse("U/1"), 3, {"U": [(1,)]})
    assert her_check(u, parse_sentence("exists x. U(x)", u.signature)).method == "monadic"


def test_scale_refusal(monkeypatch):
    big = gen_structure("td", 8)
    p = corpus_formula("phi_T")
    with pytest.raises(ScaleRefusal):
        her_check(big, p, max_brute=5)
    monkeypatch.setenv("HERMC_MAX_BRUTE", "5")
    with pytest.raises(ScaleRefusal):
        her_check(big, p)
    assert not her_check(big, p, force=True).hereditary


def test_eae_prefix_uses_full_scan():
    v = her_check(gen_structure("td", 3), corpus_formula("phi_T_eae"))
    assert not v.hereditary and "search" not in v.stats


@st.composite
def two_coloured(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(1, n + 1) for v in range(1, n + 1) if u != v]
    edges = st.sets(st.sampled_from(pairs)) if pairs else st.just(set())
    blue, red = draw(edges), draw(edges)
    return Structure(Signature.parse("E_b/2, E_r/2"), n, {"E_b": blue, "E_r": red})


@given(two_coloured())
def test_witness_search_phi_t(s):
    p = corpus_formula("phi_T")
    v = witness_search(s, p)
    assert v.hereditary == her_bruteforce(s, p).hereditary
    if not v.hereditary:
        assert not eval_fo(induced_substructure(s, v.counterexample), p)


@given(digraphs(6))
def test_witness_search_symedge(d):
    p = corpus_formula("symedge")
    assert witness_search(d, p).hereditary == her_bruteforce(d, p).hereditary


@settings(max_examples=20)
@given(digraphs(6))
def test_witness_search_henson5(d):
    p = corpus_formula("henson5")
    assert witness_search(d, p).hereditary == her_bruteforce(d, p).hereditary


@given(digraphs(5), st.sampled_from(["sink", "forest", "chordal", "serial", "symedge"]))
def test_hereditary_is_downward_closed(d, name):
    p = corpus_formula(name)
    if her_check(d, p).hereditary:
        for sub in substructures_iter(d):
            assert her_check(induced_substructure(d, sub), p).hereditary


@given(digraphs(5), st.sampled_from(["sink", "forest", "chordal", "fig_chordal", "cover"]))
def test_verdicts_ship_valid_certificates(d, name):
    p = corpus_formula(name)
    if name == "cover":
        p = p.negate()
    v = her_check(d, p)
    assert verify_certificate(d, p, v.certificate)
    assert isinstance(v.certificate, OrderCert if v.hereditary else CounterexampleCert)
