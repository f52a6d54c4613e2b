from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qifcheck.dist import from_table, loads, point_pair, sample_random, uniform
from qifcheck.errors import DistributionError
from qifcheck.lang import InputDomain

from conftest import seeds

D2 = InputDomain(("h1", "h0"), ())
D11 = InputDomain(("h",), ("l",))
D01 = InputDomain((), ("l",))


@pytest.mark.parametrize("dom, mass", [(D2, Fraction(1, 4)), (D11, Fraction(1, 4)), (D01, Fraction(1, 2))])
def test_uniform_masses(dom, mass):
    mu = uniform(dom)
    pts = list(mu.items())
    assert len(pts) == dom.size
    assert all(p == mass for _, p in pts)
    assert mu.total() == 1


def test_two_point_distribution():
    mu = from_table(D11, [("0", "1", "1/2"), ("1", "1", "1/2")])
    assert mu.support_size() == 2
    assert mu.prob(0, 1) == mu.prob(1, 1) == Fraction(1, 2)
    assert mu == point_pair(D11, 0, 1, 1)


def test_unnormalised_rejected():
    with pytest.raises(DistributionError):
        from_table(D2, [(0, 0, "1/2"), (1, 0, "1/4")])


def test_negative_and_foreign_points_rejected():
    with pytest.raises(DistributionError):
        from_table(D2, [(0, 0, "3/2"), (1, 0, "-1/2")])
    with pytest.raises(DistributionError):
        from_table(D2, [(4, 0, 1)])


def test_degenerate_point_mass():
    mu = from_table(D2, [("10", "-", 1)])
    assert mu.prob(2) == 1 and mu.prob(0) == 0


def test_seed_determinism():
    assert sample_random(D2, 7) == sample_random(D2, 7)


def test_seeds_differ():
    assert sample_random(D2, 1) != sample_random(D2, 2)


@given(seeds, st.floats(min_value=0.0, max_value=0.9))
def test_random_sums_to_one(seed, sparsity):
    dom = InputDomain(("a", "b", "c"), ("x", "y"))
    mu = sample_random(dom, seed, sparsity)
    assert mu.total() == 1
    assert all(isinstance(p, Fraction) and p > 0 for _, p in mu.items())
    assert all(0 <= h < 8 and 0 <= l < 4 for (h, l), _ in mu.items())


@given(seeds)
def test_marginals_match_direct_sums(seed):
    dom = InputDomain(("a", "b"), ("x", "y"))
    mu = sample_random(dom, seed, 0.3)
    table = mu.as_table()
    mh, ml = mu.marginal_high(), mu.marginal_low()
    for h in range(4):
        assert mh.get(h, 0) == sum((p for (hh, _), p in table.items() if hh == h), Fraction(0))
    for l in range(4):
        assert ml.get(l, 0) == sum((p for (_, ll), p in table.items() if ll == l), Fraction(0))
    assert sum(mh.values()) == sum(ml.values()) == 1


@given(seeds)
def test_text_round_trip(seed):
    dom = InputDomain(("a", "b"), ("x",))
    mu = sample_random(dom, seed, 0.5)
    assert loads(mu.dumps(), dom) == mu
    assert loads(mu.dumps()) == mu


def test_uniform_equals_explicit_table():
    explicit = from_table(D11, [(h, l, Fraction(1, 4)) for h in range(2) for l in range(2)])
    assert explicit.as_table() == uniform(D11).as_table()
