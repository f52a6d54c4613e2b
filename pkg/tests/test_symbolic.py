import random

import numpy as np
import pytest
from hypothesis import assume, given, settings

from qifcheck.compare import check_R, is_noninterferent
from qifcheck.errors import DeclarationError
from qifcheck.lang import (
    TRUE, And, Assign, If, Not, ProgramUnit, Skip, Var, disj, enumeration_env, evaluate_formula,
    parse_formula, parse_program, seq, tree_size, truth_table, variables, xor,
)
from qifcheck.randprog import random_formula, random_pair
from qifcheck.sat import dpll_sat, tseitin_cnf
from qifcheck.semantics import denotation
from qifcheck.symbolic import (
    check_ni_symbolic, check_r_symbolic, rename_apart, replays_ni, replays_r, vc_ni, vc_r,
    wp_naive, wp_optimized,
)

from conftest import rng_program, seeds


def valid(f):
    return not dpll_sat(tseitin_cnf(Not(f))).sat


def forall_aux_table(f, names):
    """Truth table over ``names`` with every other variable universally quantified."""
    aux = [v for v in variables(f) if v not in names]
    env = enumeration_env(list(names) + aux)
    table = np.broadcast_to(evaluate_formula(f, env), (1 << (len(names) + len(aux)),))
    return table.reshape(1 << len(names), 1 << len(aux)).all(axis=1)


def test_wp_assignment():
    x, y = Var("x"), Var("y")
    assert wp_naive(Assign("x", And(x, y)), x) == And(x, y)


def test_wp_conditional_table():
    s = If(Var("y"), Assign("x", TRUE), Assign("x", Not(TRUE)))
    for wp in (wp_naive, wp_optimized):
        assert np.array_equal(forall_aux_table(wp(s, Var("x")), ["x", "y"]), np.array([False, True, False, True]))


def test_wp_skip_identity():
    post = xor(Var("a"), Var("b"))
    assert np.array_equal(forall_aux_table(wp_optimized(Skip(), post), ["a", "b"]), truth_table(post, ["a", "b"]))


@given(seeds)
def test_wp_sequence_composes(seed):
    rng = random.Random(seed)
    p, q = rng_program(seed), rng_program(seed + 1)
    q = ProgramUnit(p.high, p.low, p.out, p.local, q.body) if set(q.variables) <= set(p.variables) else p
    post = random_formula(rng, p.out, 3)
    a = wp_naive(seq(p.body, q.body), post)
    b = wp_naive(p.body, wp_naive(q.body, post))
    names = list(p.variables)
    assert np.array_equal(truth_table(a, names), truth_table(b, names))


@settings(max_examples=200)
@given(seeds)
def test_wp_optimized_equivalent(seed):
    rng = random.Random(seed)
    p = rng_program(seed, n_high=rng.randint(1, 3), n_low=rng.randint(0, 2), n_local=rng.randint(0, 2))
    names = list(p.variables)
    assume(len(names) <= 8)
    post = random_formula(rng, names, 4)
    opt = wp_optimized(p.body, post)
    aux = [v for v in variables(opt) if v not in names]
    assume(len(names) + len(aux) <= 18)
    assert np.array_equal(forall_aux_table(opt, names), truth_table(wp_naive(p.body, post), names))


def _if_chain(n):
    h, x, y = Var("h"), Var("x"), Var("y")
    return seq(*[If(h, Assign("x", And(x, y)), Assign("y", disj(x, h))) for _ in range(n)])


def test_size_census():
    post = xor(Var("x"), Var("y"))
    naive = [tree_size(wp_naive(_if_chain(n), post)) for n in range(4, 13)]
    opt = [tree_size(wp_optimized(_if_chain(n), post)) for n in range(4, 13)]
    # optimized stays within c*n^2 and naive at least doubles per extra if
    for n, size in zip(range(4, 13), opt):
        assert size <= 30 * n * n
    assert all(b >= 2 * a for a, b in zip(naive, naive[1:]))
    assert opt[-1] < naive[-1] / 1000


def test_rename_twice_disjoint(intro):
    p = intro["M1_intro"]
    a, b = rename_apart(p, "_a"), rename_apart(p, "_b")
    assert not set(a.variables) & set(b.variables)


def test_rename_preserves_semantics(zw):
    rng = random.Random(3)
    for _ in range(20):
        p = rng_program(rng.randrange(1 << 30), n_high=3, n_low=2, n_out=1)
        r = rename_apart(p, "_r")
        assert np.array_equal(denotation(p).table, denotation(r).table)
    assert rename_apart(zw, "'").out == ("z'", "w'")


def test_rename_errors(zw):
    with pytest.raises(ValueError):
        rename_apart(zw, "")
    with pytest.raises(ValueError):
        rename_apart(zw, "-x")
    p = parse_program("high h, h_1; out o; o := h")
    with pytest.raises(DeclarationError):
        rename_apart(p, "_1")


def test_vc_ni_examples():
    assert valid(vc_ni(parse_program("high h; low l; out o; o := l")))
    leak = parse_program("high h; low l; out o; o := h")
    assert not valid(vc_ni(leak))
    v = check_ni_symbolic(leak)
    _, h, h2 = v.counterexample
    assert h != h2


@pytest.mark.parametrize("phi, sat", [("a & !a", False), ("a | b", True), ("a & b & !c", True), ("false", False)])
def test_vc_ni_reduction(phi, sat):
    f = parse_formula(phi)
    names = ", ".join(sorted(set(variables(f)) | {"a"}))
    p = parse_program(f"high H, {names}; out O; if ({phi}) & H then {{ O := true }} else {{ O := false }}")
    assert valid(vc_ni(p)) == (not sat)


def test_vc_r_examples(login4, intro):
    m = intro["M1_intro"]
    assert valid(vc_r(m, m))
    assert valid(vc_r(login4["M4"], login4["M_spec"]))
    assert not valid(vc_r(login4["M1"], login4["M_spec"]))
    v = check_r_symbolic(login4["M1"], login4["M_spec"])
    assert not v.holds and replays_r(login4["M1"], login4["M_spec"], v.counterexample)


def test_check_ni_direct_leak():
    p = parse_program("high h; low l; out o; o := h & l")
    v = check_ni_symbolic(p)
    assert not v.holds
    l, h, h2 = v.counterexample
    assert l == 1 and h != h2 and replays_ni(p, v.counterexample)


def test_login_m3_half_width(login4):
    v = check_r_symbolic(login4["M3"], login4["M_spec"])
    assert not v.holds
    l, h, h2 = v.counterexample
    # M3 only compares the low half: exactly one secret matches l there,
    # while the full check rejects both
    assert ((h & 0b11) == (l & 0b11)) != ((h2 & 0b11) == (l & 0b11))
    assert h != l and h2 != l
    assert replays_r(login4["M3"], login4["M_spec"], v.counterexample)


def test_naive_flag_agrees(login4):
    for name in ("M1", "M2", "M3", "M4"):
        a = check_r_symbolic(login4[name], login4["M_spec"], wp=wp_naive)
        b = check_r_symbolic(login4[name], login4["M_spec"])
        assert a.holds == b.holds


@settings(max_examples=150)
@given(seeds)
def test_symbolic_r_agrees_with_brute_force(seed):
    rng = random.Random(seed)
    a, b = random_pair(rng, n_high=rng.randint(1, 4), n_low=rng.randint(0, 4), n_out=2,
                       n_local=rng.randint(0, 1), n_stmts=rng.randint(1, 4))
    v = check_r_symbolic(a, b)
    assert v.holds == check_R(a, b).holds
    if not v.holds:
        assert replays_r(a, b, v.counterexample)


@settings(max_examples=150)
@given(seeds)
def test_symbolic_ni_agrees_with_brute_force(seed):
    rng = random.Random(seed)
    p = rng_program(seed, n_high=rng.randint(1, 4), n_low=rng.randint(0, 4))
    v = check_ni_symbolic(p)
    assert v.holds == is_noninterferent(p)
    if not v.holds:
        assert replays_ni(p, v.counterexample)
