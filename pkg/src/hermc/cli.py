"""Command-line interface.

Exit codes: 0 yes / hereditary / valid, 1 no, 2 usage or parse error,
3 refusal to run an exponential search on a large input.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .certificates import CertificateError, from_json, to_json, verify_certificate
from .corpus import FAMILY_MIN, corpus_text, formula_names, gen_structure, structure_header
from .evaluator import eval_fo, every_cycle_has_symmetric_edge
from .formulas import FormulaError, PrenexSentence
from .hereditary import ScaleRefusal, TractabilityClass, classify_prefix, her_bruteforce, her_check
from .reductions import CnfError, parse_dimacs, reduce_to_forbtd, reduce_to_symcycle
from .structures import Signature, SignatureError, Structure, StructureError
from .syntax import format_structure, parse_formula, parse_formula_file, parse_structure, print_formula, to_prenex

EXIT_YES, EXIT_NO, EXIT_USAGE, EXIT_REFUSED = 0, 1, 2, 3

CLASS_CASES = {
    TractabilityClass.PTimeMonadic: "monadic signature: substructures up to 2^|tau| elements suffice (polynomial)",
    TractabilityClass.PTimeCollapse: "prefix of the form A*E*: k-element substructures suffice (polynomial)",
    TractabilityClass.PTimeAlg1: "prefix of the form A*EA*: certifying order algorithm (polynomial)",
    TractabilityClass.HardPrefix: "prefix contains EEA or EAE as a subword: coNP-complete cases exist",
}


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load_sentence(args, structure: Optional[Structure]) -> PrenexSentence:
    sig = Signature.parse(args.sig) if getattr(args, "sig", None) else (structure.signature if structure else None)
    f, fsig = parse_formula_file(_read(args.formula), sig)
    if structure is not None:
        missing = [n for n in fsig.names if n not in structure.signature]
        if missing:
            raise FormulaError(f"formula uses symbols {missing} absent from the structure's signature")
    return to_prenex(f, fsig)


def cmd_check(args) -> int:
    s = parse_structure(_read(args.structure))
    p = _load_sentence(args, s)
    result = eval_fo(s, p)
    print("true" if result else "false")
    return EXIT_YES if result else EXIT_NO


def cmd_her(args) -> int:
    s = parse_structure(_read(args.structure))
    p = _load_sentence(args, s)
    verdict = her_check(s, p, force=args.force, max_brute=args.max_brute, jobs=args.jobs)
    print(f"hereditary: {'yes' if verdict.hereditary else 'no'}")
    print(f"class: {verdict.stats.get('class')}")
    print(f"method: {verdict.method}")
    if verdict.counterexample is not None:
        print(f"counterexample: {' '.join(map(str, verdict.counterexample))}")
    if "warning" in verdict.stats:
        print(f"warning: {verdict.stats['warning']}")
    if args.cert:
        _write(args.cert, to_json(verdict.certificate, p, s.size))
        print(f"certificate: {args.cert} ({verdict.certificate.type})")
    return EXIT_YES if verdict.hereditary else EXIT_NO


def cmd_verify(args) -> int:
    s = parse_structure(_read(args.structure))
    p = _load_sentence(args, s)
    cert, n = from_json(_read(args.cert), p)
    if n != s.size:
        print(f"invalid: certificate is for a {n}-element structure, input has {s.size}")
        return EXIT_NO
    ok = verify_certificate(s, p, cert)
    print(f"{'valid' if ok else 'invalid'} {cert.type} certificate")
    return EXIT_YES if ok else EXIT_NO


def cmd_classify(args) -> int:
    sig = Signature.parse(args.sig) if args.sig else None
    cls = classify_prefix(args.prefix, sig)
    print(cls.value)
    print(CLASS_CASES[cls])
    return EXIT_YES


def cmd_reduce(args) -> int:
    cnf = parse_dimacs(_read(args.cnf))
    s = reduce_to_forbtd(cnf) if args.kind == "forbtd" else reduce_to_symcycle(cnf)
    comments = [f"reduction {args.kind} from {cnf.num_vars} variables, {cnf.num_clauses} clauses"]
    if cnf.padded:
        comments.append(f"{cnf.padded} clauses padded to 3 literals")
    _write(args.output, format_structure(s, comments))
    return EXIT_YES


def cmd_gen(args) -> int:
    if args.family == "random_digraph" and args.seed is None:
        raise UsageError("random_digraph requires --seed")
    s = gen_structure(args.family, args.n, seed=args.seed, p=args.p)
    header = structure_header(args.family, args.n, args.seed, args.p)
    _write(args.output, format_structure(s, header))
    return EXIT_YES


def cmd_formula(args) -> int:
    sig, text = corpus_text(args.name, args.k)
    if args.prenex:
        text = print_formula(to_prenex(parse_formula(text, sig), sig))
    _write(args.output, f"sig {sig}\n{text}\n")
    return EXIT_YES


def cmd_oracle(args) -> int:
    s = parse_structure(_read(args.structure))
    if args.symcycle:
        ok = every_cycle_has_symmetric_edge(s)
        print(f"every cycle has a symmetric edge: {'yes' if ok else 'no'}")
        return EXIT_YES if ok else EXIT_NO
    if not args.formula:
        raise UsageError("oracle needs --formula or --symcycle")
    p = _load_sentence(args, s)
    verdict = her_bruteforce(s, p, jobs=args.jobs)
    print(f"hereditary: {'yes' if verdict.hereditary else 'no'}")
    if verdict.counterexample is not None:
        print(f"counterexample: {' '.join(map(str, verdict.counterexample))}")
    print(f"substructures examined: {verdict.stats['substructures']}")
    return EXIT_YES if verdict.hereditary else EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hermc", description="Hereditary first-order model checking.")
    sub = ap.add_subparsers(dest="command", required=True)

    def structure_and_formula(p, formula_required=True):
        p.add_argument("--structure", required=True, help="structure file")
        p.add_argument("--formula", required=formula_required, help="formula file")
        p.add_argument("--sig", help="formula signature, e.g. 'E/2, U/1' (default: file header or structure)")

    p = sub.add_parser("check", help="evaluate a sentence on a structure")
    structure_and_formula(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("her", help="hereditary check with certificate")
    structure_and_formula(p)
    p.add_argument("--cert", help="write the certificate (JSON) here")
    p.add_argument("--force", action="store_true", help="run exponential search above the size cap")
    p.add_argument("--max-brute", type=int, help="size cap for exponential search (env HERMC_MAX_BRUTE)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for brute force")
    p.set_defaults(func=cmd_her)

    p = sub.add_parser("verify", help="re-verify a certificate")
    structure_and_formula(p)
    p.add_argument("--cert", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", help="classify a quantifier prefix")
    p.add_argument("prefix", help="word over E/A (or the quantifier symbols)")
    p.add_argument("--sig", help="signature; monadic signatures are always polynomial")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("reduce", help="3SAT (DIMACS) to a structure")
    p.add_argument("--kind", choices=("forbtd", "symcycle"), required=True)
    p.add_argument("--cnf", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("gen", help="generate a structure family member")
    p.add_argument("family", choices=sorted(FAMILY_MIN))
    p.add_argument("n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--p", type=float, default=0.5, help="edge probability for random_digraph")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("formula", help="emit a named sentence")
    p.add_argument("name", choices=formula_names())
    p.add_argument("--k", type=int, help="parameter for k_degenerate and andor")
    p.add_argument("--prenex", action="store_true", help="emit the prenex form")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_formula)

    p = sub.add_parser("oracle", help="exponential reference checks")
    structure_and_formula(p, formula_required=False)
    p.add_argument("--symcycle", action="store_true", help="run the directed-cycle oracle instead")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScaleRefusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (UsageError, FormulaError, StructureError, SignatureError, CnfError, CertificateError,
            ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
