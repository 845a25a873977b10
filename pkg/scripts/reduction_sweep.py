"""Random 3SAT instances through both hardness reductions.

For each instance: satisfiable iff the Forb(T) image is not in HER(phi_T),
and iff the layered digraph has a cycle without a symmetric edge.

    python scripts/reduction_sweep.py --instances 100 --vars 3 4 --clauses 6 14
"""
import argparse
import random
import time
from dataclasses import dataclass

from hermc.certificates import verify_counterexample
from hermc.corpus import corpus_formula
from hermc.evaluator import every_cycle_has_symmetric_edge
from hermc.hereditary import her_check
from hermc.reductions import random_cnf, reduce_to_forbtd, reduce_to_symcycle, sat_bruteforce


@dataclass
class ReductionConfig:
    instances: int = 100
    min_vars: int = 3
    max_vars: int = 4
    min_clauses: int = 6
    max_clauses: int = 14
    seed: int = 12345


def run(cfg: ReductionConfig) -> list[dict]:
    rng = random.Random(cfg.seed)
    phi = corpus_formula("phi_T")
    rows = []
    for _ in range(cfg.instances):
        c = random_cnf(rng, rng.randint(cfg.min_vars, cfg.max_vars), rng.randint(cfg.min_clauses, cfg.max_clauses))
        sat = sat_bruteforce(c)
        t0 = time.perf_counter()
        g = reduce_to_forbtd(c)
        v = her_check(g, phi, force=True)
        forbtd_ok = sat != v.hereditary and (v.hereditary or verify_counterexample(g, phi, v.certificate))
        t1 = time.perf_counter()
        symcycle_ok = sat != every_cycle_has_symmetric_edge(reduce_to_symcycle(c))
        t2 = time.perf_counter()
        rows.append(dict(n=c.num_vars, m=c.num_clauses, sat=sat, forbtd=forbtd_ok, symcycle=symcycle_ok,
                         forbtd_s=t1 - t0, symcycle_s=t2 - t1))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=ReductionConfig.instances)
    ap.add_argument("--vars", type=int, nargs=2, default=(ReductionConfig.min_vars, ReductionConfig.max_vars))
    ap.add_argument("--clauses", type=int, nargs=2, default=(ReductionConfig.min_clauses, ReductionConfig.max_clauses))
    ap.add_argument("--seed", type=int, default=ReductionConfig.seed)
    a = ap.parse_args()
    cfg = ReductionConfig(a.instances, *a.vars, *a.clauses, a.seed)
    rows = run(cfg)
    by_m: dict[int, list[dict]] = {}
    for r in rows:
        by_m.setdefault(r["m"], []).append(r)
    print(f"{'m':>3} {'count':>5} {'sat':>4} {'forbtd ok':>9} {'symcycle ok':>11} {'forbtd s':>9} {'symcycle s':>10}")
    for m in sorted(by_m):
        rs = by_m[m]
        print(f"{m:>3} {len(rs):>5} {sum(r['sat'] for r in rs):>4} {sum(r['forbtd'] for r in rs):>9} "
              f"{sum(r['symcycle'] for r in rs):>11} {sum(r['forbtd_s'] for r in rs):>9.3f} "
              f"{sum(r['symcycle_s'] for r in rs):>10.3f}")
    bad = [r for r in rows if not (r["forbtd"] and r["symcycle"])]
    print(f"total {len(rows)}, disagreements {len(bad)}")


if __name__ == "__main__":
    main()
