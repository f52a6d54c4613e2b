"""Weakest preconditions and self-composition checks.

``wp_naive`` applies the textbook rules and may grow exponentially in the
number of sequenced conditionals.  ``wp_optimized`` first puts the program
in single-assignment form: every assignment (other than a plain copy or a
constant) and every join point after a conditional defines a fresh
auxiliary variable ``x'k`` by an equation, and
the result is ``C => post`` where ``C`` is the guarded conjunction of those
equations.  Auxiliary variables are implicitly universally quantified; as
``C`` determines them uniquely from the original variables, validity and
the set of satisfying original valuations agree with ``wp_naive``.

Non-interference and the relation ``R`` are decided by composing renamed
copies of the programs, taking the weakest precondition of the relational
postcondition, and asking the SAT solver whether its negation has a model.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .compare import check_domains
from .errors import DeclarationError
from .lang import (
    FALSE,
    IDENT_RE,
    And,
    Assign,
    Formula,
    If,
    InputDomain,
    Not,
    ProgramUnit,
    Stmt,
    TrueF,
    Var,
    assigned_vars,
    conj_all,
    disj_all,
    flatten_seq,
    iff,
    implies,
    map_stmt_formulas,
    seq,
    stmt_variables,
    substitute,
    variables,
    xor,
)
from .sat import CNF, SatResult, dpll_sat, tseitin_cnf
from .semantics import evaluate

WpFn = Callable[[Stmt, Formula], Formula]


# ---------------------------------------------------------------------------
# Weakest preconditions


def wp_naive(s: Stmt, post: Formula) -> Formula:
    """Textbook weakest precondition: substitution, guarded split, composition."""
    for part in reversed(flatten_seq(s)):
        if isinstance(part, Assign):
            post = substitute(post, {part.var: part.expr})
        elif isinstance(part, If):
            post = And(implies(part.cond, wp_naive(part.then, post)),
                       implies(Not(part.cond), wp_naive(part.orelse, post)))
    return post


@dataclass(frozen=True)
class Passified:
    """Single-assignment form: ``constraint`` defines ``aux`` from the original variables."""

    constraint: Formula
    post: Formula
    aux: tuple[str, ...]

    @property
    def formula(self) -> Formula:
        return implies(self.constraint, self.post)


class _Passifier:
    def __init__(self, used):
        self.used = set(used)
        self.counter: dict[str, int] = {}
        self.aux: list[str] = []

    def fresh(self, v: str) -> Var:
        i = self.counter.get(v, 0)
        while True:
            i += 1
            name = f"{v}'{i}"
            if name not in self.used:
                break
        self.counter[v] = i
        self.used.add(name)
        self.aux.append(name)
        return Var(name)

    def run(self, s: Stmt, cur: dict[str, Formula]) -> list[Formula]:
        out: list[Formula] = []
        for part in flatten_seq(s):
            if isinstance(part, Assign):
                rhs = substitute(part.expr, cur)
                if isinstance(rhs, (Var, TrueF)) or rhs is FALSE:
                    cur[part.var] = rhs  # copies and constants need no equation
                    continue
                new = self.fresh(part.var)
                out.append(iff(new, rhs))
                cur[part.var] = new
            elif isinstance(part, If):
                guard = substitute(part.cond, cur)
                then_cur, else_cur = dict(cur), dict(cur)
                then_c = self.run(part.then, then_cur)
                else_c = self.run(part.orelse, else_cur)
                for v in dict.fromkeys(assigned_vars(part.then) + assigned_vars(part.orelse)):
                    a, b = then_cur.get(v, Var(v)), else_cur.get(v, Var(v))
                    if a is b:
                        cur[v] = a
                        continue
                    new = self.fresh(v)
                    then_c.append(iff(new, a))
                    else_c.append(iff(new, b))
                    cur[v] = new
                out.append(And(implies(guard, conj_all(then_c)),
                               implies(Not(guard), conj_all(else_c))))
        return out


def passify(s: Stmt, post: Formula) -> Passified:
    p = _Passifier(set(stmt_variables(s)) | set(variables(post)))
    cur: dict[str, Formula] = {}
    constraints = p.run(s, cur)
    return Passified(conj_all(constraints), substitute(post, cur), tuple(p.aux))


def wp_optimized(s: Stmt, post: Formula) -> Formula:
    """Weakest precondition through single-assignment passification.

    The result mentions auxiliary variables ``x'k``; it is valid exactly when
    :func:`wp_naive` is, and for each valuation of the original variables it
    holds for all auxiliary values iff :func:`wp_naive` holds.
    """
    return passify(s, post).formula


# ---------------------------------------------------------------------------
# Renaming and self-composition


def rename_apart(p: ProgramUnit, tag: str) -> ProgramUnit:
    """Copy of ``p`` with every variable ``v`` renamed to ``v + tag``."""
    if not tag:
        raise ValueError("rename tag must be non-empty")
    if not IDENT_RE.fullmatch("x" + tag):
        raise ValueError(f"tag {tag!r} would not produce valid identifiers")
    names = p.variables
    ren = {v: v + tag for v in names}
    if set(ren.values()) & set(names):
        raise DeclarationError(f"tag {tag!r} collides with existing variable names")
    vmap = {v: Var(n) for v, n in ren.items()}
    body = map_stmt_formulas(p.body, lambda f: substitute(f, vmap), ren.__getitem__)
    return ProgramUnit(tuple(ren[v] for v in p.high), tuple(ren[v] for v in p.low),
                       tuple(ren[v] for v in p.out), tuple(ren[v] for v in p.local), body)


def _separator(names) -> str:
    sep = "__"
    while any(sep in n for n in names):
        sep += "_"
    return sep


@dataclass(frozen=True)
class SelfComposition:
    """Sequenced copies of one or two programs over shared input variables.

    ``high_a`` and ``high_b`` name the two high inputs ``H`` and ``H'``;
    ``low`` names the low input shared by every copy.
    """

    domain: InputDomain
    body: Stmt
    post: Formula
    high_a: tuple[str, ...]
    high_b: tuple[str, ...]
    low: tuple[str, ...]

    def vc(self, wp: WpFn = wp_optimized) -> Formula:
        return wp(self.body, self.post)

    def input_order(self) -> list[str]:
        """Shared inputs interleaved bit by bit, least significant first."""
        order: list[str] = []
        n = max(len(self.high_a), len(self.low))
        for j in range(1, n + 1):
            if j <= len(self.low):
                order.append(self.low[-j])
            if j <= len(self.high_a):
                order += [self.high_a[-j], self.high_b[-j]]
        return order

    def decode(self, model: dict[str, bool]) -> tuple[int, int, int]:
        """``(l, h, h2)`` codes from a model of the negated condition."""
        def code(names):
            c = 0
            for n in names:
                c = (c << 1) | int(model.get(n, False))
            return c
        return code(self.low), code(self.high_a), code(self.high_b)


def _copy(p: ProgramUnit, sep: str, tag: str, high_src, low_src) -> tuple[Stmt, dict[str, str]]:
    ren = {v: f"{v}{sep}{tag}" for v in p.variables}
    init = [Assign(ren[h], Var(s)) for h, s in zip(p.high, high_src)]
    init += [Assign(ren[l], Var(s)) for l, s in zip(p.low, low_src)]
    init += [Assign(ren[v], FALSE) for v in p.variables if v not in p.inputs]
    vmap = {v: Var(n) for v, n in ren.items()}
    body = map_stmt_formulas(p.body, lambda f: substitute(f, vmap), ren.__getitem__)
    return seq(*init, body), ren


def _shared_inputs(dom: InputDomain, sep: str):
    return (tuple(f"{h}{sep}a" for h in dom.high), tuple(f"{h}{sep}b" for h in dom.high),
            tuple(f"{l}{sep}l" for l in dom.low))


def self_compose_ni(m: ProgramUnit) -> SelfComposition:
    """Two copies of ``m`` on ``(H, L)`` and ``(H', L)``; post: equal outputs."""
    sep = _separator(m.variables)
    ha, hb, lo = _shared_inputs(m.domain, sep)
    c1, r1 = _copy(m, sep, "c1", ha, lo)
    c2, r2 = _copy(m, sep, "c2", hb, lo)
    post = conj_all(iff(Var(r1[o]), Var(r2[o])) for o in m.out)
    return SelfComposition(m.domain, seq(c1, c2), post, ha, hb, lo)


def self_compose_r(m1: ProgramUnit, m2: ProgramUnit) -> SelfComposition:
    """Four copies: ``m1`` and ``m2`` each on ``(H, L)`` and ``(H', L)``.

    Post: if the two ``m1`` runs differ in some output then so do the two
    ``m2`` runs.
    """
    dom = check_domains(m1, m2)
    sep = _separator(m1.variables + m2.variables)
    ha, hb, lo = _shared_inputs(dom, sep)
    c1a, r1a = _copy(m1, sep, "c1a", ha, lo)
    c1b, r1b = _copy(m1, sep, "c1b", hb, lo)
    c2a, r2a = _copy(m2, sep, "c2a", ha, lo)
    c2b, r2b = _copy(m2, sep, "c2b", hb, lo)
    differ1 = disj_all(xor(Var(r1a[o]), Var(r1b[o])) for o in m1.out)
    differ2 = disj_all(xor(Var(r2a[o]), Var(r2b[o])) for o in m2.out)
    return SelfComposition(dom, seq(c1a, c1b, c2a, c2b), implies(differ1, differ2), ha, hb, lo)


def vc_ni(m: ProgramUnit, wp: WpFn = wp_optimized) -> Formula:
    """A formula that is valid iff ``m`` is non-interferent."""
    return self_compose_ni(m).vc(wp)


def vc_r(m1: ProgramUnit, m2: ProgramUnit, wp: WpFn = wp_optimized) -> Formula:
    """A formula that is valid iff ``R(m1, m2)``."""
    return self_compose_r(m1, m2).vc(wp)


# ---------------------------------------------------------------------------
# Decision via SAT


@dataclass(frozen=True)
class SymbolicVerdict:
    """Outcome of a symbolic check.

    ``counterexample`` is ``(l, h, h2)`` as input codes when the property
    fails.  ``sat`` keeps solver statistics.
    """

    holds: bool
    counterexample: tuple[int, int, int] | None
    domain: InputDomain
    sat: SatResult | None = None
    cnf_size: tuple[int, int] = (0, 0)

    def __bool__(self):
        return self.holds

    def to_json(self) -> dict:
        cex = None
        if self.counterexample is not None:
            l, h, h2 = self.counterexample
            d = self.domain
            cex = {"l": d.low_bits(l), "h": d.high_bits(h), "h2": d.high_bits(h2)}
        return {"holds": self.holds, "counterexample": cex}


def _decide(sc: SelfComposition, wp: WpFn) -> SymbolicVerdict:
    cnf: CNF = tseitin_cnf(Not(sc.vc(wp)), sc.input_order())
    result = dpll_sat(cnf)
    size = (cnf.n_vars, len(cnf.clauses))
    if not result.sat:
        return SymbolicVerdict(True, None, sc.domain, result, size)
    cex = sc.decode(result.named_model(cnf))
    return SymbolicVerdict(False, cex, sc.domain, result, size)


def check_ni_symbolic(m: ProgramUnit, wp: WpFn = wp_optimized) -> SymbolicVerdict:
    """Non-interference of ``m`` by self-composition and SAT."""
    return _decide(self_compose_ni(m), wp)


def check_r_symbolic(m1: ProgramUnit, m2: ProgramUnit, wp: WpFn = wp_optimized) -> SymbolicVerdict:
    """``R(m1, m2)`` by four-way self-composition and SAT."""
    return _decide(self_compose_r(m1, m2), wp)


def replays_ni(m: ProgramUnit, cex: tuple[int, int, int]) -> bool:
    l, h, h2 = cex
    d = m.domain
    return evaluate(m, d.valuation(h, l)) != evaluate(m, d.valuation(h2, l))


def replays_r(m1: ProgramUnit, m2: ProgramUnit, cex: tuple[int, int, int]) -> bool:
    l, h, h2 = cex
    d = m1.domain
    a, b = d.valuation(h, l), d.valuation(h2, l)
    return evaluate(m1, a) != evaluate(m1, b) and evaluate(m2, a) == evaluate(m2, b)
