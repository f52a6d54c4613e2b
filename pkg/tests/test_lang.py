import random

import numpy as np
import pytest
from hypothesis import given

from qifcheck.corpus import gen_intro_examples, gen_login_corpus, gen_zw_example
from qifcheck.errors import DeclarationError, QifSyntaxError
from qifcheck.lang import (
    FALSE, TRUE, And, Assign, If, Not, ProgramUnit, Seq, Skip, TrueF, Var, disj, iff, implies,
    parse_formula, parse_program, flatten_seq, postorder, render_formula, render_program, truth_table, xor,
)
from qifcheck.randprog import random_formula

from conftest import rng_program, seeds


def test_parse_simple_assignment():
    p = parse_program("high h; out o; o := h")
    assert p.high == ("h",) and p.out == ("o",)
    assert p.body == Assign("o", Var("h"))


def test_parse_login_spec_shape():
    text = render_program(gen_login_corpus(2)["M_spec"])
    p = parse_program(text)
    assert isinstance(p.body, If)
    assert isinstance(p.body.then, Assign) and isinstance(p.body.orelse, Assign)
    # the equality test desugars into the four core kinds only
    assert all(isinstance(n, (TrueF, Var, And, Not)) for n in postorder(p.body.cond))


def test_trailing_operator_is_syntax_error():
    with pytest.raises(QifSyntaxError) as info:
        parse_program("high h; out o; o := h |")
    assert info.value.line == 1


def test_undeclared_variable_rejected():
    with pytest.raises(DeclarationError):
        parse_program("high h; out o; o := z")


def test_assignment_to_undeclared_rejected():
    with pytest.raises(DeclarationError):
        ProgramUnit(("h",), (), ("o",), (), Assign("q", Var("h")))


def test_bad_identifier_rejected():
    with pytest.raises((ValueError, QifSyntaxError)):
        Var("1abc")


@pytest.mark.parametrize("prog", [
    gen_zw_example(),
    ProgramUnit(("h",), (), ("o",), (), Skip()),
    gen_login_corpus(4)["M_spec"],
    *gen_login_corpus(4).values(),
    *gen_intro_examples().values(),
])
def test_round_trip_corpus(prog):
    assert parse_program(render_program(prog)) == prog


def test_round_trip_skip():
    p = ProgramUnit(("h",), (), ("o",), (), Skip())
    assert parse_program(render_program(p)).body == Skip()


def test_nested_sequence_normalised():
    a, b, c = Assign("o", TRUE), Assign("o", FALSE), Assign("o", Var("h"))
    p = ProgramUnit(("h",), (), ("o",), (), Seq(Seq(a, b), c))
    q = parse_program(render_program(p))
    assert [type(s) for s in flatten_seq(q.body)] == [Assign, Assign, Assign]
    assert parse_program(render_program(q)) == q


def test_extended_connectives_desugar():
    f = parse_formula("(a | b => c) == !d")
    assert all(isinstance(n, (TrueF, Var, And, Not)) for n in postorder(f))


@pytest.mark.parametrize("sugar, core", [
    (lambda a, b: disj(a, b), lambda x, y: x | y),
    (lambda a, b: implies(a, b), lambda x, y: ~x | y),
    (lambda a, b: iff(a, b), lambda x, y: x == y),
    (lambda a, b: xor(a, b), lambda x, y: x != y),
])
def test_connective_truth_tables(sugar, core):
    table = truth_table(sugar(Var("a"), Var("b")), ["a", "b"])
    a = np.array([False, False, True, True])
    b = np.array([False, True, False, True])
    assert np.array_equal(table, core(a, b))


@given(seeds)
def test_formula_round_trip(seed):
    rng = random.Random(seed)
    names = [f"v{i}" for i in range(rng.randint(1, 6))]
    f = random_formula(rng, names, rng.randint(0, 10))
    g = parse_formula(render_formula(f))
    assert np.array_equal(truth_table(f, names), truth_table(g, names))
    assert g == f


@given(seeds)
def test_desugaring_sound(seed):
    # the text form uses sugar freely; parsing must keep the truth table
    rng = random.Random(seed)
    names = [f"v{i}" for i in range(rng.randint(1, 6))]
    a = random_formula(rng, names, 3)
    b = random_formula(rng, names, 3)
    text = f"(({render_formula(a)}) => ({render_formula(b)})) == (!({render_formula(a)}) | ({render_formula(b)}))"
    f = parse_formula(text)
    assert truth_table(f, names).all()
    assert all(isinstance(n, (TrueF, Var, And, Not)) for n in postorder(f))


@given(seeds)
def test_random_program_round_trip(seed):
    p = rng_program(seed)
    assert parse_program(render_program(p)) == p


def test_false_is_negated_true():
    assert FALSE == Not(TRUE)
