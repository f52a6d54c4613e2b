import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize

from qifcheck.compare import is_noninterferent, ni_counterexample
from qifcheck.dist import point_pair, sample_random, uniform
from qifcheck.errors import DomainMismatchError
from qifcheck.lang import parse_program
from qifcheck.qif import (
    cc, cond_mutual_information, ge, guessing_entropy, induced_joint, me, measure, se,
    shannon_cond_entropy,
)
from qifcheck.semantics import denotation

from conftest import rng_program, seeds

LOG3 = math.log2(3)


def test_entropy_building_blocks():
    assert shannon_cond_entropy({(x, 0): Fraction(1, 4) for x in range(4)}) == 2.0
    assert shannon_cond_entropy({(y, y): Fraction(1, 4) for y in range(4)}) == 0.0
    skew = {("a", 0): Fraction(1, 4), ("b", 0): Fraction(1, 4), ("c", 0): Fraction(1, 2)}
    assert shannon_cond_entropy(skew) == pytest.approx(1.5, abs=1e-12)


@pytest.mark.parametrize("name, kind, expected", [
    ("M1_intro", "SE", 2 - 0.75 * LOG3),
    ("M2_intro", "SE", 2.0),
    ("M1_intro", "ME", 1.0),
    ("M2_intro", "ME", 2.0),
    ("M1_intro", "GE", 0.75),
    ("M2_intro", "GE", 1.5),
    ("M1_intro", "CC", 1.0),
    ("M2_intro", "CC", 2.0),
])
def test_intro_values(intro, name, kind, expected):
    assert measure(intro[name], kind).value == pytest.approx(expected, abs=1e-9)


def test_intro_m1_se_close_to_quoted(intro):
    assert se(intro["M1_intro"]).value == pytest.approx(0.81128, abs=1e-4)


def test_intro_exact_payloads(intro):
    assert ge(intro["M1_intro"]).exact == Fraction(3, 4)
    assert ge(intro["M2_intro"]).exact == Fraction(3, 2)
    assert me(intro["M1_intro"]).exact == 2
    assert cc(intro["M2_intro"]).exact == 4


def test_zw_values(zw):
    assert se(zw).exact.as_fraction() == Fraction(3, 2)
    assert me(zw).value == pytest.approx(LOG3, abs=1e-9)
    assert ge(zw).exact == Fraction(5, 4)
    assert cc(zw).value == pytest.approx(LOG3, abs=1e-9)
    assert cc(zw).exact_str() == "log2(3)"


def test_domain_mismatch(intro, zw):
    with pytest.raises(DomainMismatchError):
        se(intro["M1_intro"], uniform(zw.domain))


def test_report_json(zw):
    j = ge(zw).to_json()
    assert j == {"measure": "GE", "value": 1.25, "exact": "5/4", "mode": "exact"}


# -- independent oracles ------------------------------------------------------

def _joint(p, mu):
    d = denotation(p)
    return {(d.output(h, l), h, l): pr for (h, l), pr in mu.items()}


def _mi_direct(joint):
    """I(O;H|L) from raw sums: sum p(o,h,l) log p(o,h,l) p(l) / (p(o,l) p(h,l))."""
    pl, pol, phl = {}, {}, {}
    for (o, h, l), p in joint.items():
        pl[l] = pl.get(l, 0) + p
        pol[(o, l)] = pol.get((o, l), 0) + p
        phl[(h, l)] = phl.get((h, l), 0) + p
    return sum(float(p) * math.log2(p * pl[l] / (pol[(o, l)] * phl[(h, l)]))
               for (o, h, l), p in joint.items() if p)


def _ge_direct(p, mu):
    d = denotation(p)
    def g(blocks):
        return sum(sum(i * q for i, q in enumerate(sorted(b, reverse=True), 1)) for b in blocks.values())
    by_l, by_ol = {}, {}
    for (h, l), pr in mu.items():
        by_l.setdefault(l, []).append(pr)
        by_ol.setdefault((d.output(h, l), l), []).append(pr)
    return g(by_l) - g(by_ol)


@settings(max_examples=60)
@given(seeds)
def test_se_equals_mutual_information(seed):
    p = rng_program(seed, n_high=random.Random(seed).randint(1, 5), n_low=random.Random(seed + 1).randint(0, 3))
    mu = sample_random(p.domain, seed, 0.3)
    val = se(p, mu).value
    assert val == pytest.approx(_mi_direct(_joint(p, mu)), abs=1e-9)
    assert val == pytest.approx(cond_mutual_information(induced_joint(denotation(p), mu)), abs=1e-9)


@settings(max_examples=60)
@given(seeds)
def test_ge_matches_definition(seed):
    p = rng_program(seed)
    mu = sample_random(p.domain, seed, 0.2)
    assert ge(p, mu).exact == _ge_direct(p, mu)
    assert ge(p).exact == _ge_direct(p, uniform(p.domain))


@given(seeds)
def test_noninterference_iff_zero_se(seed):
    p = rng_program(seed)
    ni = is_noninterferent(p)
    assert ni == (abs(se(p).value) <= 1e-12)
    if not ni:
        l, h, h2 = ni_counterexample(p)
        mu = point_pair(p.domain, h, h2, l)
        assert se(p, mu).value == 1.0
        assert me(p, mu).exact == 2
        assert ge(p, mu).exact == Fraction(1, 2)


@settings(max_examples=40)
@given(seeds)
def test_se_bounded_by_cc(seed):
    p = rng_program(seed)
    cap = cc(p).value
    for k in range(50):
        mu = sample_random(p.domain, seed * 50 + k, 0.4)
        assert se(p, mu).value <= cap + 1e-9


@given(seeds)
def test_ranges(seed):
    p = rng_program(seed)
    n = p.domain.n_high
    mu = sample_random(p.domain, seed, 0.2)
    for m in (None, mu):
        assert -1e-12 <= se(p, m).value <= n + 1e-9
        assert -1e-12 <= me(p, m).value <= n + 1e-9
        assert 0 <= ge(p, m).exact <= Fraction(2**n - 1, 2)
    assert 0 <= cc(p).value <= n + 1e-9


@given(st.lists(st.tuples(st.fractions(0, 1), st.fractions(0, 1)), min_size=1000, max_size=1000))
@settings(max_examples=1)
def test_log_concavity_helper(pairs):
    def xlog(x):
        return 0.0 if x == 0 else float(x) * math.log2(1 / x)
    rng = random.Random(5)
    pairs = pairs + [(Fraction(rng.randint(0, 999), 1000), Fraction(rng.randint(0, 999), 1000)) for _ in range(1000)]
    for p, q in pairs:
        if p + q <= 1:
            assert xlog(p) + xlog(q) >= xlog(p + q) - 1e-12


@given(seeds)
def test_ge_tie_invariance(seed):
    rng = random.Random(seed)
    masses = [Fraction(rng.randint(1, 4), 16) for _ in range(rng.randint(1, 8))]
    ranked = sorted(masses, reverse=True)
    for _ in range(5):
        # shuffle within runs of equal mass
        order = sorted(range(len(masses)), key=lambda i: (-masses[i], rng.random()))
        permuted = [masses[i] for i in order]
        assert sum(i * m for i, m in enumerate(permuted, 1)) == guessing_entropy(dict(enumerate(ranked)))


# -- channel capacity cross-checks --------------------------------------------

def _channels(p):
    d = denotation(p)
    dom = p.domain
    out = []
    for l in range(dom.low_size):
        col = [d.output(h, l) for h in range(dom.high_size)]
        labels = sorted(set(col))
        w = np.zeros((dom.high_size, len(labels)))
        for h, o in enumerate(col):
            w[h, labels.index(o)] = 1.0
        out.append(w)
    return out


def _blahut_arimoto(w, iters=2000):
    nx = w.shape[0]
    r = np.full(nx, 1.0 / nx)
    for _ in range(iters):
        q = r @ w
        with np.errstate(divide="ignore", invalid="ignore"):
            d = np.where(w > 0, w * np.log2(np.where(w > 0, w, 1) / np.where(q > 0, q, 1)), 0).sum(axis=1)
        r = r * np.exp2(d)
        r /= r.sum()
    q = r @ w
    nz = q > 0
    return float(-(q[nz] * np.log2(q[nz])).sum())


def _hill_climb(p, seed):
    d = denotation(p)
    dom = p.domain
    labels = np.array([[d.output(h, l) for l in range(dom.low_size)] for h in range(dom.high_size)])

    def neg_se(theta):
        mu = np.exp(theta - theta.max()).reshape(dom.high_size, dom.low_size)
        mu /= mu.sum()
        total = 0.0
        for l in range(dom.low_size):
            pl = mu[:, l].sum()
            for o in set(labels[:, l]):
                po = mu[labels[:, l] == o, l].sum()
                if po > 0:
                    total += po * math.log2(pl / po)
        return -total

    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(3):
        res = minimize(neg_se, rng.normal(size=dom.size), method="Nelder-Mead",
                       options={"maxiter": 4000, "xatol": 1e-10, "fatol": 1e-12})
        best = max(best, -res.fun)
    return best


@settings(max_examples=40)
@given(seeds)
def test_cc_matches_blahut_arimoto(seed):
    rng = random.Random(seed)
    p = rng_program(seed, n_high=rng.randint(1, 4), n_low=rng.randint(0, 2), n_out=rng.randint(1, 3))
    ba = max(_blahut_arimoto(w) for w in _channels(p))
    assert cc(p).value == pytest.approx(ba, abs=1e-6)


@settings(max_examples=15)
@given(seeds)
def test_cc_bounds_hill_climbing(seed):
    rng = random.Random(seed)
    p = rng_program(seed, n_high=rng.randint(1, 3), n_low=rng.randint(0, 1), n_out=rng.randint(1, 2))
    found = _hill_climb(p, seed)
    assert found <= cc(p).value + 1e-9
    assert found >= cc(p).value - 1e-3


def test_cc_uses_best_low_input():
    p = parse_program("high h1, h0; low l; out o1, o0; if l then { o1 := h1; o0 := h0 } else { o1 := h1 }")
    assert cc(p).exact == 4
    assert cc(p).detail["l"] == "1"
