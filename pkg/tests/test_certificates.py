import itertools
import json

import pytest
from hypothesis import given, strategies as st

from hermc.certificates import (
    CertificateError,
    CounterexampleCert,
    ExhaustiveCert,
    OrderCert,
    from_json,
    to_json,
    verify_certificate,
    verify_counterexample,
    verify_order_certificate,
)
from hermc.corpus import all_digraphs, corpus_formula, gen_structure
from hermc.hereditary import algorithm1, her_bruteforce, her_check
from hermc.reductions import CnfInstance, reduce_to_forbtd
from test_structures import digraphs

SINK = corpus_formula("sink")


def test_p2_orders():
    p2 = gen_structure("dpath", 2)
    assert verify_order_certificate(p2, SINK, OrderCert(0, 2, {(): (2, 1)}))
    assert not verify_order_certificate(p2, SINK, OrderCert(0, 2, {(): (1, 2)}))


def test_reduction_pattern_subset():
    c = CnfInstance(3, ((1, 2, 3), (1, 2, 3)))
    g = reduce_to_forbtd(c)
    # a_1^1 = 1 and a_2^1 = 4 carry the same literal
    assert verify_counterexample(g, corpus_formula("phi_T"), (1, 4))


def test_order_cert_validation():
    with pytest.raises(CertificateError):
        OrderCert(0, 2, {(): (1, 1)})
    with pytest.raises(CertificateError):
        OrderCert(1, 2, {(1,): (1, 2)})
    with pytest.raises(CertificateError):
        CounterexampleCert(())


def test_order_cert_relation():
    c = OrderCert(0, 3, {(): (3, 1, 2)})
    assert c.leq((), 3, 2) and not c.leq((), 2, 1)
    assert c.relation() == {(3, 3), (3, 1), (3, 2), (1, 1), (1, 2), (2, 2)}


def test_k_mismatch_raises():
    with pytest.raises(CertificateError):
        verify_order_certificate(gen_structure("dpath", 2), SINK, OrderCert(1, 2, {(1,): (1, 2), (2,): (2, 1)}))


def test_domain_mismatch_is_invalid():
    assert not verify_order_certificate(gen_structure("dpath", 3), SINK, OrderCert(0, 2, {(): (2, 1)}))


@pytest.mark.parametrize("name", ["sink", "chordal"])
def test_any_accepted_order_means_hereditary(name):
    p = corpus_formula(name)
    for n in range(1, 5):
        for d in all_digraphs(n):
            accepted = any(verify_order_certificate(d, p, OrderCert(0, n, {(): o}))
                           for o in itertools.permutations(d.domain))
            if accepted:
                assert her_bruteforce(d, p).hereditary
            else:
                assert not her_bruteforce(d, p).hereditary


def test_k1_orders_sound():
    p = corpus_formula("fig_chordal")
    for d in all_digraphs(3):
        perms = list(itertools.permutations(d.domain))
        for choice in itertools.product(perms, repeat=3):
            c = OrderCert(1, 3, {(a,): o for a, o in zip(d.domain, choice)})
            if verify_order_certificate(d, p, c):
                assert her_bruteforce(d, p).hereditary
                break


@given(digraphs(5), st.sampled_from(["sink", "forest", "chordal", "fig_chordal"]))
def test_json_round_trip(d, name):
    p = corpus_formula(name)
    v = her_check(d, p)
    c, n = from_json(to_json(v.certificate, p, d.size), p)
    assert c == v.certificate and n == d.size


def test_json_exhaustive_round_trip():
    p = corpus_formula("phi_T")
    d = gen_structure("td", 2)
    c = ExhaustiveCert(2)
    assert from_json(to_json(c, p, 2), p) == (c, 2)


def test_json_formula_hash():
    v = algorithm1(gen_structure("dpath", 3), SINK)
    text = to_json(v.certificate, SINK, 3)
    with pytest.raises(CertificateError):
        from_json(text, corpus_formula("chordal"))
    assert from_json(text)[0] == v.certificate


@pytest.mark.parametrize("doc", [
    "not json",
    '{"type": "order"}',
    '{"type": "what", "domain_size": 2}',
    '{"type": "counterexample", "domain_size": 2, "subset": [3]}',
    '{"type": "order", "domain_size": 2, "k": 0, "orders": [{"params": [], "order": [1, 1]}]}',
])
def test_json_errors(doc):
    with pytest.raises(CertificateError):
        from_json(doc)


def test_tampered_counterexample_rejected():
    p = corpus_formula("chordal")
    c4 = gen_structure("symcycle", 4)
    assert verify_certificate(c4, p, CounterexampleCert((1, 2, 3, 4)))
    assert not verify_certificate(c4, p, CounterexampleCert((1, 2, 3)))


def test_exhaustive_cert_rechecks():
    p = corpus_formula("symedge")
    assert verify_certificate(gen_structure("dpath", 3), p, ExhaustiveCert(3))
    assert not verify_certificate(gen_structure("dcycle", 3), p, ExhaustiveCert(3))


def test_json_shape():
    v = algorithm1(gen_structure("dpath", 2), SINK)
    doc = json.loads(to_json(v.certificate, SINK, 2))
    assert doc["type"] == "order" and doc["k"] == 0 and doc["orders"] == [{"params": [], "order": [2, 1]}]
