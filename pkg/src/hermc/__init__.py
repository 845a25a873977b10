"""Hereditary first-order model checking on finite relational structures."""
from .certificates import (
    CounterexampleCert,
    ExhaustiveCert,
    OrderCert,
    verify_certificate,
    verify_counterexample,
    verify_order_certificate,
)
from .corpus import check_henson_properties, corpus_formula, gen_structure
from .evaluator import eval_fo, every_cycle_has_symmetric_edge, find_homomorphism
from .formulas import PrenexSentence, QuantifierPrefix, extract_prefix
from .hereditary import (
    HerVerdict,
    ScaleRefusal,
    TractabilityClass,
    algorithm1,
    build_snp,
    classify_prefix,
    collapse_check,
    collapse_rewrite,
    her_bruteforce,
    her_check,
    monadic_check,
)
from .reductions import CnfInstance, parse_dimacs, reduce_to_forbtd, reduce_to_symcycle, sat_bruteforce
from .structures import Signature, Structure, disjoint_union, induced_substructure, substructures_iter
from .syntax import (
    GuardFormula,
    build_chi,
    parse_formula,
    parse_sentence,
    parse_structure,
    print_formula,
    relativize,
    to_prenex,
)

__version__ = "0.1.0"
