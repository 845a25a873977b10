"""3SAT instances, DIMACS input, and the two hardness reductions.

Vertex numbering for ``reduce_to_forbtd``: a_i^j is 3(i-1)+j.
For ``reduce_to_symcycle``: s is 1, d_i^j is 1+3(i-1)+j, t is 3m+2.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .structures import DIGRAPH, Signature, Structure

FORBTD_SIGNATURE = Signature.of({"E_b": 2, "E_r": 2})
MAX_SAT_VARS = 24


class CnfError(ValueError):
    pass


@dataclass(frozen=True)
class CnfInstance:
    num_vars: int
    clauses: tuple[tuple[int, int, int], ...]
    padded: int = field(default=0, compare=False)

    def __post_init__(self):
        clauses = tuple(tuple(c) for c in self.clauses)
        if not clauses:
            raise CnfError("a 3SAT instance needs at least one clause")
        for c in clauses:
            if len(c) != 3:
                raise CnfError(f"clause {c} does not have exactly 3 literals")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise CnfError(f"literal {lit} out of range for {self.num_vars} variables")
        object.__setattr__(self, "clauses", clauses)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def literal(self, i: int, j: int) -> int:
        """Literal c_i^j, 1-based."""
        return self.clauses[i - 1][j - 1]


def parse_dimacs(text: str) -> CnfInstance:
    """Parse DIMACS CNF.  Clauses with fewer than three literals are padded
    by repeating their last literal; the number of padded clauses is kept
    in ``padded``."""
    header = None
    literals: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if header is not None:
                raise CnfError(f"line {lineno}: duplicate problem line")
            if len(parts) != 4 or parts[1] != "cnf" or not parts[2].isdigit() or not parts[3].isdigit():
                raise CnfError(f"line {lineno}: malformed header {line!r}, expected 'p cnf VARS CLAUSES'")
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise CnfError(f"line {lineno}: clause before 'p cnf' header")
        try:
            literals.extend(int(tok) for tok in line.split())
        except ValueError as exc:
            raise CnfError(f"line {lineno}: {exc}") from exc
    if header is None:
        raise CnfError("missing 'p cnf' header")
    clauses, current = [], []
    for lit in literals:
        if lit == 0:
            if current:
                clauses.append(current)
            current = []
        else:
            current.append(lit)
    if current:
        clauses.append(current)
    n, m = header
    if len(clauses) != m:
        raise CnfError(f"header declares {m} clauses, found {len(clauses)}")
    padded = 0
    out = []
    for c in clauses:
        if len(c) > 3:
            raise CnfError(f"clause {c} has more than 3 literals")
        if len(c) < 3:
            padded += 1
            c = c + [c[-1]] * (3 - len(c))
        out.append(tuple(c))
    return CnfInstance(n, tuple(out), padded)


def format_dimacs(c: CnfInstance) -> str:
    lines = [f"p cnf {c.num_vars} {c.num_clauses}"]
    lines += [" ".join(map(str, cl)) + " 0" for cl in c.clauses]
    return "\n".join(lines) + "\n"


def sat_bruteforce(c: CnfInstance) -> bool:
    if c.num_vars > MAX_SAT_VARS:
        raise CnfError(f"brute-force SAT limited to {MAX_SAT_VARS} variables, got {c.num_vars}")
    for bits in itertools.product((False, True), repeat=c.num_vars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in cl) for cl in c.clauses):
            return True
    return False


def _forbtd_vertex(i: int, j: int) -> int:
    return 3 * (i - 1) + j


def reduce_to_forbtd(c: CnfInstance) -> Structure:
    """Blue edges join every vertex of clause i to every vertex of clause
    i+1 (cyclically); red edges join distinct vertices whose literals are
    not complementary."""
    m = c.num_clauses
    if m < 2:
        raise CnfError("reduce_to_forbtd needs at least 2 clauses; duplicate the clause to reach 2")
    blue = set()
    for i in range(1, m + 1):
        nxt = i % m + 1
        for j in range(1, 4):
            for k in range(1, 4):
                blue.add((_forbtd_vertex(i, j), _forbtd_vertex(nxt, k)))
    red = set()
    cells = [(i, j) for i in range(1, m + 1) for j in range(1, 4)]
    for (i, j), (i2, j2) in itertools.permutations(cells, 2):
        if c.literal(i, j) != -c.literal(i2, j2):
            red.add((_forbtd_vertex(i, j), _forbtd_vertex(i2, j2)))
    return Structure(FORBTD_SIGNATURE, 3 * m, {"E_b": blue, "E_r": red})


def reduce_to_symcycle(c: CnfInstance) -> Structure:
    """Layered digraph s -> clause 1 -> ... -> clause m -> t -> s, with a
    symmetric pair between every two complementary literal vertices."""
    m = c.num_clauses
    s, t = 1, 3 * m + 2

    def d(i: int, j: int) -> int:
        return 1 + 3 * (i - 1) + j

    edges = {(t, s)}
    for k in range(1, 4):
        edges.add((s, d(1, k)))
        edges.add((d(m, k), t))
    for i in range(1, m):
        for j in range(1, 4):
            for k in range(1, 4):
                edges.add((d(i, j), d(i + 1, k)))
    cells = [(i, j) for i in range(1, m + 1) for j in range(1, 4)]
    for (i, j), (i2, j2) in itertools.permutations(cells, 2):
        if c.literal(i, j) == -c.literal(i2, j2):
            edges.add((d(i, j), d(i2, j2)))
    return Structure(DIGRAPH, 3 * m + 2, {"E": edges})


def random_cnf(rng, num_vars: int, num_clauses: int) -> CnfInstance:
    """Uniform random 3-CNF; ``rng`` is a ``random.Random``."""
    clauses = []
    for _ in range(num_clauses):
        clauses.append(tuple(rng.choice((1, -1)) * rng.randint(1, num_vars) for _ in range(3)))
    return CnfInstance(num_vars, tuple(clauses))
