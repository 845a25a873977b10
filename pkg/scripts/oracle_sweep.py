"""Compare her_check against the powerset oracle on seeded random digraphs.

    python scripts/oracle_sweep.py --trials 200 --max-n 7 --seed 0
"""
import argparse
import random
import time
from dataclasses import dataclass, field

from hermc.corpus import corpus_formula, random_digraph
from hermc.hereditary import her_bruteforce, her_check

DIGRAPH_FORMULAS = ("sink", "symedge", "symedge_eae", "serial", "mutual", "transitive_witness", "has_edge")


@dataclass
class SweepConfig:
    trials: int = 200
    max_n: int = 7
    seed: int = 0
    p: float = 0.4
    formulas: tuple = field(default=DIGRAPH_FORMULAS)


def run(cfg: SweepConfig) -> dict:
    rng = random.Random(cfg.seed)
    rows = {}
    for name in cfg.formulas:
        phi = corpus_formula(name)
        agree, fast_t, slow_t, methods = 0, 0.0, 0.0, set()
        for _ in range(cfg.trials):
            d = random_digraph(rng.randint(1, cfg.max_n), rng.randrange(2**32), cfg.p)
            t0 = time.perf_counter()
            v = her_check(d, phi)
            t1 = time.perf_counter()
            ref = her_bruteforce(d, phi).hereditary
            slow_t += time.perf_counter() - t1
            fast_t += t1 - t0
            agree += v.hereditary == ref
            methods.add(v.method)
        rows[name] = dict(agree=agree, trials=cfg.trials, methods=sorted(methods), fast=fast_t, brute=slow_t)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=SweepConfig.trials)
    ap.add_argument("--max-n", type=int, default=SweepConfig.max_n)
    ap.add_argument("--seed", type=int, default=SweepConfig.seed)
    ap.add_argument("--p", type=float, default=SweepConfig.p)
    a = ap.parse_args()
    cfg = SweepConfig(a.trials, a.max_n, a.seed, a.p)
    print(f"{'formula':<20} {'agree':>9}  {'her_check s':>11} {'brute s':>8}  method")
    for name, r in run(cfg).items():
        print(f"{name:<20} {r['agree']:>4}/{r['trials']:<4}  {r['fast']:>11.3f} {r['brute']:>8.3f}  {','.join(r['methods'])}")


if __name__ == "__main__":
    main()
