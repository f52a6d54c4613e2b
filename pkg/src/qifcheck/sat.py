"""CNF conversion, a small DPLL solver and DIMACS input/output.

The solver is deliberately plain: two watched literals for unit
propagation, chronological backtracking, and a fixed branching order
(lowest unassigned index, false first), so runs are reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import QifSyntaxError
from .lang import Formula, Not, TrueF, Var, postorder, variables


@dataclass
class CNF:
    """Clauses over variables ``1..n_vars``; ``var_map`` names formula variables."""

    n_vars: int
    clauses: list[tuple[int, ...]]
    var_map: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for clause in self.clauses:
            for lit in clause:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise ValueError(f"literal {lit} out of range for {self.n_vars} variables")

    def clause_set(self) -> set[frozenset[int]]:
        return {frozenset(c) for c in self.clauses}

    def satisfied_by(self, model: Mapping[int, bool]) -> bool:
        return all(any(model.get(abs(l), False) == (l > 0) for l in c) for c in self.clauses)


def tseitin_cnf(f: Formula, order: Iterable[str] = ()) -> CNF:
    """Equisatisfiable CNF for ``f``.

    Formula variables receive the lowest indices, first those in ``order``
    then the rest by first occurrence; gate variables follow.  Each ``And``
    node costs at most three clauses and ``Not`` is a negated literal.  The
    constant true is a variable fixed by a unit clause; conjunctions with a
    constant, or of a literal with itself or its negation, are folded.
    """
    var_map: dict[str, int] = {}
    present = set(variables(f))
    for name in list(order) + list(variables(f)):
        if name in present and name not in var_map:
            var_map[name] = len(var_map) + 1
    n = len(var_map)
    clauses: list[tuple[int, ...]] = []
    lit: dict[Formula, int] = {}
    t = 0

    def true_lit() -> int:
        nonlocal n, t
        if not t:
            n += 1
            t = n
            clauses.append((t,))
        return t

    for node in postorder(f):
        if isinstance(node, Var):
            lit[node] = var_map[node.name]
        elif isinstance(node, TrueF):
            lit[node] = true_lit()
        elif isinstance(node, Not):
            lit[node] = -lit[node.child]
        else:
            a, b = lit[node.left], lit[node.right]
            if t and t in (a, b):
                lit[node] = b if a == t else a
            elif t and -t in (a, b):
                lit[node] = -t
            elif a == b:
                lit[node] = a
            elif a == -b:
                lit[node] = -true_lit()
            else:
                n += 1
                clauses += [(-n, a), (-n, b), (n, -a, -b)]
                lit[node] = n
    clauses.append((lit[f],))
    return CNF(n, clauses, var_map)


@dataclass
class SatResult:
    sat: bool
    model: dict[int, bool] | None = None
    decisions: int = 0
    conflicts: int = 0
    propagations: int = 0

    def __bool__(self):
        return self.sat

    def named_model(self, cnf: CNF) -> dict[str, bool] | None:
        if self.model is None:
            return None
        return {name: self.model[i] for name, i in cnf.var_map.items()}


def dpll_sat(cnf: CNF) -> SatResult:
    """Decide satisfiability; a returned model assigns every variable."""
    n = cnf.n_vars
    # literal l is stored at index 2|l| + (l < 0); val[i] is 1 true, -1 false, 0 open
    val = [0] * (2 * n + 2)
    watches: list[list[list[int]]] = [[] for _ in range(2 * n + 2)]
    units: list[int] = []
    for c in cnf.clauses:
        c = list(dict.fromkeys(2 * abs(l) + (l < 0) for l in c))
        if not c:
            return SatResult(False)
        if any(x ^ 1 in c for x in c):
            continue  # tautology
        if len(c) == 1:
            units.append(c[0])
            continue
        watches[c[0]].append(c)
        watches[c[1]].append(c)

    stats = SatResult(False)
    trail: list[int] = []

    def enqueue(x: int) -> bool:
        v = val[x]
        if v:
            return v > 0
        val[x] = 1
        val[x ^ 1] = -1
        trail.append(x)
        return True

    def propagate(qhead: int) -> bool:
        props = 0
        while qhead < len(trail):
            false_x = trail[qhead] ^ 1
            qhead += 1
            props += 1
            watching = watches[false_x]
            if not watching:
                continue
            keep = []
            i, m = 0, len(watching)
            while i < m:
                c = watching[i]
                i += 1
                other = c[0]
                if other == false_x:
                    other = c[1]
                    c[0], c[1] = other, false_x
                if val[other] > 0:
                    keep.append(c)
                    continue
                for k in range(2, len(c)):
                    y = c[k]
                    if val[y] >= 0:
                        c[1], c[k] = y, false_x
                        watches[y].append(c)
                        break
                else:
                    keep.append(c)
                    if val[other] < 0:
                        keep.extend(watching[i:])
                        watches[false_x] = keep
                        stats.propagations += props
                        return False
                    val[other] = 1
                    val[other ^ 1] = -1
                    trail.append(other)
            watches[false_x] = keep
        stats.propagations += props
        return True

    for u in units:
        if not enqueue(u):
            return stats
    if not propagate(0):
        return stats

    # each level: (trail length before the decision, decision literal, flipped)
    levels: list[tuple[int, int, bool]] = []
    next_var = 1

    def undo(to: int) -> int:
        low = n + 1
        while len(trail) > to:
            x = trail.pop()
            val[x] = val[x ^ 1] = 0
            if x >> 1 < low:
                low = x >> 1
        return low

    ok = True
    while True:
        if not ok:
            stats.conflicts += 1
            while levels and levels[-1][2]:
                next_var = min(next_var, undo(levels.pop()[0]))
            if not levels:
                return stats
            start, decision, _ = levels.pop()
            next_var = min(next_var, undo(start))
            levels.append((start, decision ^ 1, True))
            enqueue(decision ^ 1)
            ok = propagate(start)
            continue
        while next_var <= n and val[2 * next_var]:
            next_var += 1
        if next_var > n:
            stats.sat = True
            stats.model = {v: val[2 * v] > 0 for v in range(1, n + 1)}
            return stats
        stats.decisions += 1
        x = 2 * next_var + 1  # false first
        levels.append((len(trail), x, False))
        enqueue(x)
        ok = propagate(len(trail) - 1)


def solve_formula(f: Formula, order: Iterable[str] = ()) -> tuple[SatResult, CNF]:
    cnf = tseitin_cnf(f, order)
    return dpll_sat(cnf), cnf


def export_dimacs(cnf: CNF) -> str:
    """DIMACS text; comment lines ``c var <index> <name>`` record the variable map."""
    lines = [f"c var {i} {name}" for name, i in sorted(cnf.var_map.items(), key=lambda kv: kv[1])]
    lines.append(f"p cnf {cnf.n_vars} {len(cnf.clauses)}")
    lines += [" ".join(map(str, c)) + " 0" for c in cnf.clauses]
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CNF:
    """Read DIMACS CNF, including the variable-map comments written by :func:`export_dimacs`."""
    n_vars = n_clauses = None
    var_map: dict[str, int] = {}
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) == 4 and parts[1] == "var":
                var_map[parts[3]] = int(parts[2])
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise QifSyntaxError("bad problem line", lineno, 1)
            n_vars, n_clauses = int(parts[2]), int(parts[3])
            continue
        if n_vars is None:
            raise QifSyntaxError("clause before problem line", lineno, 1)
        try:
            nums = [int(t) for t in line.split()]
        except ValueError:
            raise QifSyntaxError("non-integer literal", lineno, 1) from None
        for x in nums:
            if x == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(x)
    if n_vars is None:
        raise QifSyntaxError("missing problem line", 1, 1)
    if current:
        clauses.append(tuple(current))
    if len(clauses) != n_clauses:
        raise QifSyntaxError(f"header announces {n_clauses} clauses, found {len(clauses)}", 1, 1)
    return CNF(n_vars, clauses, var_map)


def brute_force_sat(cnf: CNF) -> bool:
    """Exhaustive satisfiability check for small instances."""
    for bits_ in itertools.product((False, True), repeat=cnf.n_vars):
        model = dict(enumerate(bits_, 1))
        if cnf.satisfied_by(model):
            return True
    return False


__all__ = [
    "CNF", "SatResult", "tseitin_cnf", "dpll_sat", "solve_formula",
    "export_dimacs", "parse_dimacs", "brute_force_sat",
]
