"""Comparing programs by leakage, and the refinement relation ``R``.

``R(m1, m2)`` holds when ``m1`` is at least as secure as ``m2`` for every
input distribution: whenever ``m1`` tells two secrets apart under some low
input, so does ``m2``.  Under the uniform distribution all four measures
are compared exactly with integer arithmetic.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .dist import JointDist, point_pair
from .errors import DomainMismatchError, NoCounterexampleError
from .lang import InputDomain, ProgramUnit
from .qif import ge_exact, me_ratio, se_of
from .semantics import DEFAULT_CAPACITY, DENSE_LIMIT, Denotation, denotation, evaluate

DEFAULT_EPSILON = 1e-9


def _kind(kind: str, allowed=("SE", "ME", "GE", "CC")) -> str:
    k = str(kind).upper()
    if k not in allowed:
        raise ValueError(f"unknown measure {kind!r}; expected one of {allowed}")
    return k


def check_domains(m1: ProgramUnit, m2: ProgramUnit) -> InputDomain:
    if m1.domain != m2.domain:
        raise DomainMismatchError(
            f"programs have different inputs: {m1.domain.high}|{m1.domain.low} "
            f"vs {m2.domain.high}|{m2.domain.low}")
    return m1.domain


# ---------------------------------------------------------------------------
# Exact comparison under the uniform distribution


def _nlogn_leq(c1: Counter, c2: Counter) -> bool:
    """Decide ``sum_1 n log n <= sum_2 n log n`` over class-size multisets exactly."""
    common = c1 & c2
    a, b = c1 - common, c2 - common
    s1 = math.fsum(m * n * math.log2(n) for n, m in a.items())
    s2 = math.fsum(m * n * math.log2(n) for n, m in b.items())
    # every term carries relative error below 1e-15; leave a wide margin
    bound = 1e-12 * (abs(s1) + abs(s2)) + 1e-12
    if abs(s1 - s2) > bound:
        return s1 < s2
    p1 = p2 = 1
    for n, m in a.items():
        p1 *= n ** (n * m)
    for n, m in b.items():
        p2 *= n ** (n * m)
    return p1 <= p2


def uniform_key(den: Denotation, kind: str):
    """Integer data that orders the uniform measure; see :func:`cmp_denotations`.

    ME and CC grow with their key.  SE and GE shrink as their key grows.
    """
    if kind == "SE":
        return Counter(den.class_counts().tolist())
    if kind == "ME":
        return int(den.image_sizes().sum())
    if kind == "GE":
        counts = den.class_counts().astype(object)
        return int((counts * counts).sum())
    return int(den.image_sizes().max())


def cmp_denotations(d1: Denotation, d2: Denotation, kind: str) -> bool:
    """``measure[U](d1) <= measure[U](d2)`` decided with integer arithmetic."""
    kind = _kind(kind)
    k1, k2 = uniform_key(d1, kind), uniform_key(d2, kind)
    if kind == "SE":
        # SE = n_high - (1/N) sum n log n: larger sum, smaller leakage
        return _nlogn_leq(k2, k1)
    if kind == "GE":
        # GE = |H|/2 - (sum n^2) / 2N
        return k1 >= k2
    return k1 <= k2


def cmp_uniform(m1: ProgramUnit, m2: ProgramUnit, kind: str,
                capacity: int = DEFAULT_CAPACITY) -> bool:
    """Whether ``measure[U](m1) <= measure[U](m2)``, decided exactly."""
    kind = _kind(kind)
    check_domains(m1, m2)
    return cmp_denotations(denotation(m1, capacity), denotation(m2, capacity), kind)


# ---------------------------------------------------------------------------
# Comparison under an arbitrary distribution


@dataclass(frozen=True)
class CmpResult:
    """Outcome of a comparison ``measure[mu](m1) <= measure[mu](m2)``.

    ``conclusive`` is false only for SE when the two floating values lie
    within ``epsilon`` of each other; ``holds`` is then reported as true.
    """

    kind: str
    holds: bool
    conclusive: bool = True
    left: object = None
    right: object = None

    def __bool__(self):
        return self.holds


def cmp_dist(m1: ProgramUnit, m2: ProgramUnit, kind: str, mu: JointDist,
             epsilon: float = DEFAULT_EPSILON, capacity: int = DEFAULT_CAPACITY) -> CmpResult:
    kind = _kind(kind)
    dom = check_domains(m1, m2)
    if mu.domain != dom:
        raise DomainMismatchError("distribution is over a different input domain")
    d1, d2 = denotation(m1, capacity), denotation(m2, capacity)
    if mu.is_uniform or kind == "CC":
        return CmpResult(kind, cmp_denotations(d1, d2, kind))
    if kind == "ME":
        a, b = me_ratio(d1, mu), me_ratio(d2, mu)
        return CmpResult(kind, a <= b, True, a, b)
    if kind == "GE":
        a, b = ge_exact(d1, mu), ge_exact(d2, mu)
        return CmpResult(kind, a <= b, True, a, b)
    a, b = se_of(d1, mu).value, se_of(d2, mu).value
    if abs(a - b) < epsilon:
        return CmpResult(kind, True, False, a, b)
    return CmpResult(kind, a < b, True, a, b)


# ---------------------------------------------------------------------------
# The relation R


@dataclass(frozen=True)
class RVerdict:
    """Result of :func:`check_R`.

    ``counterexample`` is ``(l, h, h2)`` as codes: ``m1`` separates ``h`` and
    ``h2`` under ``l`` while ``m2`` does not.
    """

    holds: bool
    counterexample: tuple[int, int, int] | None
    domain: InputDomain

    def __bool__(self):
        return self.holds

    def to_json(self) -> dict:
        cex = None
        if self.counterexample is not None:
            l, h, h2 = self.counterexample
            d = self.domain
            cex = {"l": d.low_bits(l), "h": d.high_bits(h), "h2": d.high_bits(h2)}
        return {"holds": self.holds, "counterexample": cex}

    def replays(self, m1: ProgramUnit, m2: ProgramUnit) -> bool:
        """Re-run the counterexample through the interpreter."""
        if self.counterexample is None:
            return self.holds
        l, h, h2 = self.counterexample
        d = self.domain
        a, b = d.valuation(h, l), d.valuation(h2, l)
        return evaluate(m1, a) != evaluate(m1, b) and evaluate(m2, a) == evaluate(m2, b)


def _group_ids(keys: np.ndarray, span: int) -> np.ndarray:
    if span <= DENSE_LIMIT:
        return keys
    return np.unique(keys, return_inverse=True)[1].reshape(-1)


def refinement_counterexample(d1: Denotation, d2: Denotation) -> tuple[int, int, int] | None:
    """Smallest ``(l, h, h2)`` with ``d1`` separating and ``d2`` merging, or ``None``."""
    dom = d1.domain
    nh, nl = dom.high_size, dom.low_size
    t1, t2 = d1.table, d2.table
    k2 = d2.n_labels
    low = np.broadcast_to(np.arange(nl, dtype=np.int64), (nh, nl))
    gid = _group_ids((low * k2 + t2).reshape(-1), nl * k2)
    size = int(gid.max()) + 1
    flat1 = t1.reshape(-1)
    lo = np.full(size, np.iinfo(np.int64).max, dtype=np.int64)
    hi = np.full(size, -1, dtype=np.int64)
    np.minimum.at(lo, gid, flat1)
    np.maximum.at(hi, gid, flat1)
    bad = (lo != hi)[gid].reshape(nh, nl)
    if not bad.any():
        return None
    # first violating entry in (l, h) order
    l = int(np.flatnonzero(bad.any(axis=0))[0])
    h = int(np.flatnonzero(bad[:, l])[0])
    same = t2[:, l] == t2[h, l]
    differ = t1[:, l] != t1[h, l]
    h2 = int(np.flatnonzero(same & differ)[0])
    return l, h, h2


def check_R(m1: ProgramUnit, m2: ProgramUnit, capacity: int = DEFAULT_CAPACITY) -> RVerdict:
    """Whether ``m2``'s output partition refines ``m1``'s for every low input."""
    dom = check_domains(m1, m2)
    cex = refinement_counterexample(denotation(m1, capacity), denotation(m2, capacity))
    return RVerdict(cex is None, cex, dom)


def witness_distribution(m1: ProgramUnit, m2: ProgramUnit,
                         capacity: int = DEFAULT_CAPACITY) -> JointDist:
    """Two-point distribution on which ``m1`` leaks strictly more than ``m2``.

    Under it ``m1`` has SE = ME = 1 and GE = 1/2 while ``m2`` leaks nothing.
    """
    verdict = check_R(m1, m2, capacity)
    if verdict.holds:
        raise NoCounterexampleError("R holds, so no distribution separates the programs")
    l, h, h2 = verdict.counterexample
    return point_pair(verdict.domain, h, h2, l)


def universal_cmp(m1: ProgramUnit, m2: ProgramUnit, kind: str,
                  capacity: int = DEFAULT_CAPACITY) -> bool:
    """Whether ``measure[mu](m1) <= measure[mu](m2)`` for every distribution ``mu``.

    For SE, ME and GE this coincides with ``R(m1, m2)``.
    """
    _kind(kind, ("SE", "ME", "GE"))
    return check_R(m1, m2, capacity).holds


def ni_counterexample(p: ProgramUnit, capacity: int = DEFAULT_CAPACITY) -> tuple[int, int, int] | None:
    """Smallest ``(l, h, h2)`` with different outputs, or ``None`` when non-interferent."""
    t = denotation(p, capacity).table
    varies = (t != t[0:1, :]).any(axis=0)
    if not varies.any():
        return None
    l = int(np.flatnonzero(varies)[0])
    h2 = int(np.flatnonzero(t[:, l] != t[0, l])[0])
    return l, 0, h2


def is_noninterferent(p: ProgramUnit, capacity: int = DEFAULT_CAPACITY) -> bool:
    """Brute force: outputs never depend on the high input."""
    return ni_counterexample(p, capacity) is None


__all__ = [
    "cmp_uniform", "cmp_denotations", "cmp_dist", "CmpResult", "check_R", "RVerdict",
    "refinement_counterexample", "witness_distribution", "universal_cmp",
    "is_noninterferent", "ni_counterexample",
]
