"""Leakage measures: Shannon (SE), min-entropy (ME), guessing (GE), capacity (CC).

All logarithms are base 2.  Probabilities stay rational until the final
logarithm; ME and GE are therefore exact, and SE under the uniform
distribution carries an exact payload of output-class counts.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping

import numpy as np

from .dist import JointDist
from .errors import DomainMismatchError
from .lang import ProgramUnit, bits
from .semantics import DEFAULT_CAPACITY, Denotation, denotation

KINDS = ("SE", "ME", "GE", "CC")

# ---------------------------------------------------------------------------
# Entropy building blocks over plain {outcome: probability} mappings.
# Joint outcomes are tuples; conditioning groups by the tail of the tuple.


def _xlog(p) -> float:
    """``p * log2(1/p)`` with ``0 log(1/0) = 0``."""
    if p <= 0:
        return 0.0
    return -float(p) * math.log2(p)


def shannon_entropy(dist: Mapping[Hashable, object]) -> float:
    return sum(_xlog(p) for p in dist.values())


def _group(joint: Mapping[tuple, object], given: int) -> dict[tuple, dict[tuple, object]]:
    """Split ``joint`` over ``(x..., y...)`` by the last ``given`` coordinates."""
    groups: dict[tuple, dict[tuple, object]] = {}
    for key, p in joint.items():
        cut = len(key) - given
        groups.setdefault(key[cut:], {})[key[:cut]] = p
    return groups


def shannon_cond_entropy(joint: Mapping[tuple, object], given: int = 1) -> float:
    """``H(X|Y)`` for a joint keyed by ``(x, y)`` tuples.

    ``given`` is the number of trailing tuple positions forming ``Y``.
    Computed as ``sum mu(x, y) log(mu(y) / mu(x, y))``.
    """
    total = 0.0
    for block in _group(joint, given).values():
        py = sum(block.values())
        if py <= 0:
            continue
        for pxy in block.values():
            if pxy > 0:
                total += float(pxy) * math.log2(py / pxy)
    return total


def cond_mutual_information(joint: Mapping[tuple, object]) -> float:
    """``I(X; Y | Z) = H(X|Z) - H(X|Y,Z)`` for a joint keyed by ``(x, y, z)``."""
    xz: dict[tuple, object] = {}
    for (x, _, z), p in joint.items():
        xz[(x, z)] = xz.get((x, z), 0) + p
    return shannon_cond_entropy(xz, 1) - shannon_cond_entropy(joint, 2)


def cond_vulnerability(joint: Mapping[tuple, object], given: int = 1):
    """``V(X|Y) = sum_y max_x mu(x, y)``; exact for rational input."""
    return sum((max(b.values()) for b in _group(joint, given).values()), Fraction(0))


def min_entropy(dist: Mapping[Hashable, object]) -> float:
    return -math.log2(max(dist.values()))


def guessing_entropy(dist: Mapping[Hashable, object]):
    """``sum_i i * p_i`` over probabilities in nonincreasing order."""
    ranked = sorted(dist.values(), reverse=True)
    return sum((i * p for i, p in enumerate(ranked, 1)), Fraction(0))


def cond_guessing_entropy(joint: Mapping[tuple, object], given: int = 1):
    """``G(X|Y) = sum_y mu(y) G(X | Y=y) = sum_y sum_i i * mu(x_i, y)``."""
    return sum((guessing_entropy(b) for b in _group(joint, given).values()), Fraction(0))


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class UniformSEPayload:
    """Exact data behind SE under the uniform distribution.

    ``SE = n_high - (1/N) * sum n log2 n`` over the output-class sizes ``n``
    (one class per output value and low input), with ``N = |H| * |L|``.
    ``counts`` maps each class size to its multiplicity.
    """

    n_high: int
    n_inputs: int
    counts: tuple[tuple[int, int], ...]

    @property
    def value(self) -> float:
        # sum of n * log2(|H| / n) >= 0 term by term, so no cancellation below 0
        total = math.fsum(m * n * (self.n_high - math.log2(n)) for n, m in self.counts)
        return max(0.0, total / self.n_inputs)

    def product(self) -> int:
        """``prod n^n`` over all classes: a smaller product means larger SE."""
        out = 1
        for n, m in self.counts:
            out *= n ** (n * m)
        return out

    def as_fraction(self) -> Fraction | None:
        """The exact value when every class size is a power of two, else ``None``."""
        if any(n & (n - 1) for n, _ in self.counts):
            return None
        s = sum(m * n * (n.bit_length() - 1) for n, m in self.counts)
        return self.n_high - Fraction(s, self.n_inputs)

    def __str__(self):
        frac = self.as_fraction()
        if frac is not None:
            return str(frac)
        cls = ",".join(f"{n}x{m}" for n, m in self.counts)
        return f"{self.n_high} - log2(prod n^n)/{self.n_inputs}; n x multiplicity = {cls}"


@dataclass(frozen=True)
class MeasureReport:
    """One leakage value.

    ``exact`` is ``None`` for floating-point-only results, a :class:`Fraction`
    (GE, and the vulnerability ratio for ME), an int (image size for CC) or a
    :class:`UniformSEPayload`.
    """

    measure: str
    value: float
    exact: object = None
    mode: str = "float"
    detail: dict = field(default_factory=dict, compare=False)

    def exact_str(self) -> str | None:
        if self.exact is None:
            return None
        if self.measure == "ME":
            return f"log2({self.exact})"
        if self.measure == "CC":
            return f"log2({self.exact})"
        return str(self.exact)

    def to_json(self) -> dict:
        return {"measure": self.measure, "value": self.value,
                "exact": self.exact_str(), "mode": self.mode}

    def __float__(self):
        return self.value


def _log2_fraction(q: Fraction) -> float:
    # log2 of numerator and denominator separately stays accurate for big ints
    return math.log2(q.numerator) - math.log2(q.denominator)


def _prepare(p: ProgramUnit, mu: JointDist | None, capacity: int) -> tuple[Denotation, JointDist | None]:
    if mu is not None and mu.domain != p.domain:
        raise DomainMismatchError(
            f"distribution domain {mu.domain.high}|{mu.domain.low} does not match "
            f"program inputs {p.domain.high}|{p.domain.low}")
    den = denotation(p, capacity)
    if mu is not None and mu.is_uniform:
        mu = None
    return den, mu


def class_masses(den: Denotation, mu: JointDist) -> dict[tuple[int, int], dict[int, Fraction]]:
    """``{(label, l): {h: mu(h, l)}}`` over the support of ``mu``."""
    labels, nl = den.labels, den.domain.low_size
    out: dict[tuple[int, int], dict[int, Fraction]] = {}
    for (h, l), pr in mu.items():
        out.setdefault((int(labels[h * nl + l]), l), {})[h] = pr
    return out


def induced_joint(den: Denotation, mu: JointDist) -> dict[tuple[int, int, int], Fraction]:
    """Joint distribution of ``(output label, h, l)`` induced by the program."""
    labels, nl = den.labels, den.domain.low_size
    return {(int(labels[h * nl + l]), h, l): pr for (h, l), pr in mu.items()}


def uniform_se_payload(den: Denotation) -> UniformSEPayload:
    counts = Counter(den.class_counts().tolist())
    return UniformSEPayload(den.domain.n_high, den.domain.size,
                            tuple(sorted(counts.items(), reverse=True)))


def se_of(den: Denotation, mu: JointDist | None = None) -> MeasureReport:
    if mu is None:
        payload = uniform_se_payload(den)
        return MeasureReport("SE", payload.value, payload, "exact")
    total = 0.0
    by_l: dict[int, Fraction] = {}
    classes = {k: sum(b.values(), Fraction(0)) for k, b in class_masses(den, mu).items()}
    for (_, l), m in classes.items():
        by_l[l] = by_l.get(l, Fraction(0)) + m
    for (_, l), m in classes.items():
        total += float(m) * _log2_fraction(by_l[l] / m)
    return MeasureReport("SE", max(0.0, total), None, "float")


def me_ratio(den: Denotation, mu: JointDist | None = None) -> Fraction:
    """``V(H|O,L) / V(H|L)``, exact."""
    if mu is None:
        return Fraction(int(den.image_sizes().sum()), den.domain.low_size)
    v_l: dict[int, Fraction] = {}
    v_ol = Fraction(0)
    for (_, l), block in class_masses(den, mu).items():
        top = max(block.values())
        v_ol += top
        if top > v_l.get(l, Fraction(0)):
            v_l[l] = top
    return v_ol / sum(v_l.values(), Fraction(0))


def me_of(den: Denotation, mu: JointDist | None = None) -> MeasureReport:
    ratio = me_ratio(den, mu)
    return MeasureReport("ME", max(0.0, _log2_fraction(ratio)), ratio, "exact")


def ge_exact(den: Denotation, mu: JointDist | None = None) -> Fraction:
    if mu is None:
        counts = den.class_counts().astype(object)
        sq = int((counts * counts).sum())
        return Fraction(den.domain.high_size, 2) - Fraction(sq, 2 * den.domain.size)
    g_l: dict[int, dict[int, Fraction]] = {}
    g_ol = Fraction(0)
    for (_, l), block in class_masses(den, mu).items():
        g_ol += _ranked_sum(block)
        g_l.setdefault(l, {}).update(block)
    return sum((_ranked_sum(b) for b in g_l.values()), Fraction(0)) - g_ol


def _ranked_sum(block: Mapping[int, Fraction]) -> Fraction:
    # nonincreasing mass; ties by h code (the value does not depend on it)
    order = sorted(block.items(), key=lambda kv: (-kv[1], kv[0]))
    return sum((i * pr for i, (_, pr) in enumerate(order, 1)), Fraction(0))


def ge_of(den: Denotation, mu: JointDist | None = None) -> MeasureReport:
    value = ge_exact(den, mu)
    return MeasureReport("GE", float(value), value, "exact",
                         {"tie_break": "high code ascending"})


def cc_of(den: Denotation) -> MeasureReport:
    sizes = den.image_sizes()
    l = int(np.argmax(sizes))
    k = int(sizes[l])
    return MeasureReport("CC", math.log2(k), k, "exact",
                         {"l": bits(l, den.domain.n_low)})


def se(p: ProgramUnit, mu: JointDist | None = None, capacity: int = DEFAULT_CAPACITY) -> MeasureReport:
    """Shannon leakage ``H(O|L)`` under ``mu`` (uniform when ``None``)."""
    return se_of(*_prepare(p, mu, capacity))


def me(p: ProgramUnit, mu: JointDist | None = None, capacity: int = DEFAULT_CAPACITY) -> MeasureReport:
    """Min-entropy leakage ``log2(V(H|O,L) / V(H|L))``."""
    return me_of(*_prepare(p, mu, capacity))


def ge(p: ProgramUnit, mu: JointDist | None = None, capacity: int = DEFAULT_CAPACITY) -> MeasureReport:
    """Guessing-entropy leakage ``G(H|L) - G(H|O,L)``, exact."""
    return ge_of(*_prepare(p, mu, capacity))


def cc(p: ProgramUnit, capacity: int = DEFAULT_CAPACITY) -> MeasureReport:
    """Channel capacity ``log2 max_l |image(l)|``."""
    return cc_of(denotation(p, capacity))


def measure(p: ProgramUnit, kind: str, mu: JointDist | None = None,
            capacity: int = DEFAULT_CAPACITY) -> MeasureReport:
    kind = kind.upper()
    if kind == "CC":
        return cc(p, capacity)
    fn = {"SE": se, "ME": me, "GE": ge}.get(kind)
    if fn is None:
        raise ValueError(f"unknown measure {kind!r}; expected one of {KINDS}")
    return fn(p, mu, capacity)
