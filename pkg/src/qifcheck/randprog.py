"""Seeded random formulas, programs and CNFs for property tests and demos."""

from __future__ import annotations

import random
from typing import Sequence

from .lang import FALSE, TRUE, And, Assign, Formula, If, Not, ProgramUnit, Skip, Stmt, Var, disj, seq
from .sat import CNF


def random_formula(rng: random.Random, names: Sequence[str], size: int = 6) -> Formula:
    """A formula with about ``size`` connectives over ``names``."""
    if not names or (size <= 0 and rng.random() < 0.1):
        return rng.choice((TRUE, FALSE))
    if size <= 0:
        v = Var(rng.choice(names))
        return Not(v) if rng.random() < 0.3 else v
    roll = rng.random()
    if roll < 0.2:
        return Not(random_formula(rng, names, size - 1))
    left = rng.randint(0, size - 1)
    a = random_formula(rng, names, left)
    b = random_formula(rng, names, size - 1 - left)
    return And(a, b) if roll < 0.6 else disj(a, b)


def random_stmt(rng: random.Random, targets: Sequence[str], readable: Sequence[str],
                n_stmts: int = 4, depth: int = 2, expr_size: int = 3) -> Stmt:
    parts: list[Stmt] = []
    for _ in range(n_stmts):
        roll = rng.random()
        if depth > 0 and roll < 0.3:
            cond = random_formula(rng, readable, rng.randint(0, expr_size))
            k = max(1, n_stmts // 2)
            parts.append(If(cond,
                            random_stmt(rng, targets, readable, rng.randint(1, k), depth - 1, expr_size),
                            random_stmt(rng, targets, readable, rng.randint(0, k), depth - 1, expr_size)))
        elif roll < 0.95 and targets:
            parts.append(Assign(rng.choice(targets),
                                random_formula(rng, readable, rng.randint(0, expr_size))))
        else:
            parts.append(Skip())
    return seq(*parts) if parts else Skip()


def random_program(rng: random.Random, n_high: int = 2, n_low: int = 1, n_out: int = 1,
                   n_local: int = 0, n_stmts: int = 4, depth: int = 2, expr_size: int = 3,
                   assign_inputs: bool = False) -> ProgramUnit:
    """A random program over ``h0..``, ``l0..``, outputs ``o0..`` and locals ``t0..``.

    Inputs are only assigned when ``assign_inputs`` is set.
    """
    high = tuple(f"h{i}" for i in range(n_high))
    low = tuple(f"l{i}" for i in range(n_low))
    out = tuple(f"o{i}" for i in range(n_out))
    local = tuple(f"t{i}" for i in range(n_local))
    targets = out + local + ((high + low) if assign_inputs else ())
    readable = high + low + out + local
    body = random_stmt(rng, targets, readable, n_stmts, depth, expr_size)
    return ProgramUnit(high, low, out, local, body)


def random_pair(rng: random.Random, **kwargs) -> tuple[ProgramUnit, ProgramUnit]:
    """Two programs over the same inputs; output counts may differ."""
    a = random_program(rng, **kwargs)
    kwargs = dict(kwargs, n_out=rng.randint(1, max(1, kwargs.get("n_out", 1))))
    b = random_program(rng, **kwargs)
    return a, b


def random_cnf(rng: random.Random, n_vars: int, n_clauses: int, max_width: int = 3) -> CNF:
    clauses = []
    for _ in range(n_clauses):
        width = rng.randint(1, max_width)
        clauses.append(tuple(rng.choice((-1, 1)) * rng.randint(1, n_vars) for _ in range(width)))
    return CNF(n_vars, clauses)
