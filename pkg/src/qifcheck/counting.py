"""Model counting through leakage-comparison oracles.

``count_via_oracle`` recovers ``#SAT(phi)`` by binary search, asking only
whether one program leaks at most as much as another under the uniform
distribution.  Probe programs wrap a formula with exactly ``n`` models
(from :func:`gen_count_formula`) and compare it with the same wrapping of
``phi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .compare import cmp_denotations
from .lang import (
    FALSE,
    TRUE,
    And,
    Assign,
    Formula,
    If,
    ProgramUnit,
    Var,
    disj,
    enumeration_env,
    evaluate_formula,
    render_formula,
    seq,
    variables,
)
from .semantics import DEFAULT_CAPACITY, check_capacity, denotation

ORACLE_KINDS = ("SE", "ME", "GE", "CC")
MAX_COUNT_VARS = 16
_ENUM_CHUNK = 1 << 18


def gen_count_formula(k: int, names: Sequence[str]) -> Formula:
    """A formula over ``names`` with exactly ``k`` satisfying assignments.

    Bit ``i`` of ``k`` decides whether ``names[i]`` enters as a disjunct
    (bit set) or a conjunct; the base case is false.  ``k = 2**len(names)``
    gives true.  The size is linear in ``len(names)``.
    """
    names = list(names)
    n = len(names)
    if not 0 <= k <= 1 << n:
        raise ValueError(f"count {k} outside 0..{1 << n} for {n} variables")
    if k == 1 << n:
        return TRUE
    f = FALSE
    for i, name in enumerate(names):
        f = disj(Var(name), f) if (k >> i) & 1 else And(Var(name), f)
    return f


def sharp_sat_enum(f: Formula, names: Sequence[str] | None = None,
                   capacity: int = DEFAULT_CAPACITY) -> int:
    """Number of models of ``f`` over ``names`` (default: its variables), by enumeration."""
    names = tuple(variables(f) if names is None else names)
    check_capacity(len(names), capacity, "formula")
    total = 1 << len(names)
    count = 0
    for start in range(0, total, _ENUM_CHUNK):
        stop = min(total, start + _ENUM_CHUNK)
        val = evaluate_formula(f, enumeration_env(names, start, stop))
        count += int(np.count_nonzero(val)) if isinstance(val, np.ndarray) else (stop - start) * bool(val)
    return count


def _fresh(base: str, taken) -> str:
    name, i = base, 0
    while name in taken:
        i += 1
        name = f"{base}{i}"
    return name


def boolenc_T(f: Formula, high: Sequence[str] | None = None) -> ProgramUnit:
    """``if f then { of := true; O := H } else { of := false; O := 0 }``.

    ``O`` has one output per high variable.  When ``f`` has fewer than
    ``2**|H|`` models the program has exactly ``#SAT(f) + 1`` outputs.
    """
    high = tuple(variables(f) if high is None else high)
    taken = set(high)
    flag = _fresh("of", taken)
    taken.add(flag)
    outs = []
    for h in high:
        o = _fresh(f"o_{h}", taken)
        taken.add(o)
        outs.append(o)
    then = seq(Assign(flag, TRUE), *(Assign(o, Var(h)) for o, h in zip(outs, high)))
    orelse = seq(Assign(flag, FALSE), *(Assign(o, FALSE) for o in outs))
    return ProgramUnit(high, (), (flag, *outs), (), If(f, then, orelse))


def padded_program(f: Formula, high: Sequence[str]) -> ProgramUnit:
    """``o := f`` over the given high variables."""
    high = tuple(high)
    o = _fresh("o", set(high))
    return ProgramUnit(high, (), (o,), (), Assign(o, f))


@dataclass
class CountRun:
    """One model-counting run and its binary-search trace."""

    formula: Formula
    kind: str
    count: int
    oracle_calls: int
    n_vars: int
    trace: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def call_bound(self) -> int:
        return 3 * (self.n_vars + 1) + 2

    def to_json(self) -> dict:
        return {
            "formula": render_formula(self.formula),
            "oracle": self.kind,
            "count": self.count,
            "oracle_calls": self.oracle_calls,
            "n_vars": self.n_vars,
            "call_bound": self.call_bound if self.kind != "ENUM" else None,
            "trace": [{"l": l, "r": r, "n": n} for l, r, n in self.trace],
        }


def count_via_oracle(f: Formula, kind: str, names: Sequence[str] | None = None,
                     capacity: int = MAX_COUNT_VARS + 1) -> CountRun:
    """Count the models of ``f`` by binary search with a comparison oracle.

    With ``k`` variables, each probe compares ``M' = P(f & H')`` with
    ``P(psi_n & H')`` where ``psi_n`` has exactly ``n`` models, ``H'`` is a
    fresh high variable and ``P`` is ``o := .`` for SE and GE or the
    encoding :func:`boolenc_T` for ME and CC.  The search keeps
    ``l <= count < r``, starting from ``l = 0, r = 2**k + 1``, and stops when
    the oracle answers both directions positively.  Every oracle
    consultation is counted: two for each loop test and one for the branch.
    """
    kind = kind.upper()
    names = tuple(variables(f) if names is None else names)
    if kind == "ENUM":
        return CountRun(f, kind, sharp_sat_enum(f, names), 0, len(names))
    if kind not in ORACLE_KINDS:
        raise ValueError(f"unknown oracle {kind!r}; expected one of {ORACLE_KINDS} or ENUM")
    k = len(names)
    check_capacity(k + 1, capacity, "oracle program")
    pad = _fresh("hpad", set(names))
    high = names + (pad,)
    wrap = padded_program if kind in ("SE", "GE") else (lambda g, hs: boolenc_T(g, hs))
    ref = denotation(wrap(And(f, Var(pad)), high), capacity)
    probes: dict[int, object] = {}
    calls = 0

    def oracle(a, b) -> bool:
        nonlocal calls
        calls += 1
        return cmp_denotations(a, b, kind)

    def probe(n: int):
        if n not in probes:
            probes[n] = denotation(wrap(And(gen_count_formula(n, names), Var(pad)), high), capacity)
        return probes[n]

    l, r = 0, (1 << k) + 1
    n = (l + r) // 2
    trace = []
    while True:
        trace.append((l, r, n))
        below = oracle(probe(n), ref)
        above = oracle(ref, probe(n))
        if below and above:
            break
        if oracle(probe(n), ref):
            l = n
        else:
            r = n
        n = (l + r) // 2
    return CountRun(f, kind, n, calls, k, trace)
