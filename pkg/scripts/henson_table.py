"""Henson tournament family: the six structural properties and triangle
counts, next to the full sentence evaluation where it fits the budget.

    python scripts/henson_table.py --max-n 12 --budget 5
"""
import argparse
from dataclasses import dataclass

from hermc.corpus import check_henson_properties, eval_henson_phi, gen_structure, is_tournament


@dataclass
class HensonConfig:
    min_n: int = 5
    max_n: int = 12
    budget: float = 5.0


def run(cfg: HensonConfig) -> list[dict]:
    rows = []
    for n in range(cfg.min_n, cfg.max_n + 1):
        t = gen_structure("henson", n)
        r = check_henson_properties(t)
        rows.append(dict(n=n, tournament=is_tournament(t), triangles=r.triangle_count,
                         items="".join("1" if x else "0" for x in r.items), phi=eval_henson_phi(t, cfg.budget)))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--min-n", type=int, default=HensonConfig.min_n)
    ap.add_argument("--max-n", type=int, default=HensonConfig.max_n)
    ap.add_argument("--budget", type=float, default=HensonConfig.budget, help="seconds per full evaluation")
    a = ap.parse_args()
    print(f"{'n':>3} {'tournament':>10} {'triangles':>9} {'2n-6':>5} {'items':>7} {'phi':>8}")
    for r in run(HensonConfig(a.min_n, a.max_n, a.budget)):
        phi = "timeout" if r["phi"] is None else str(r["phi"])
        print(f"{r['n']:>3} {str(r['tournament']):>10} {r['triangles']:>9} {2 * r['n'] - 6:>5} {r['items']:>7} {phi:>8}")


if __name__ == "__main__":
    main()
