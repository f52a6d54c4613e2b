"""Exact joint distributions over high and low inputs.

Masses are :class:`fractions.Fraction` values keyed by ``(h, l)`` codes of
an :class:`~qifcheck.lang.InputDomain`.  Points of zero mass are not
stored.  The uniform distribution is kept symbolic so that it can be built
for domains far too large to tabulate.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from .errors import DistributionError, QifSyntaxError
from .lang import IDENT_RE, InputDomain
from .semantics import DEFAULT_CAPACITY, check_capacity

SAMPLE_UNITS_BITS = 16


class JointDist:
    """A probability distribution ``mu(h, l)`` with rational masses."""

    __slots__ = ("domain", "_mass", "_uniform")

    def __init__(self, domain: InputDomain, mass: dict[tuple[int, int], Fraction] | None,
                 _uniform: bool = False):
        self.domain = domain
        self._uniform = _uniform
        self._mass = {} if mass is None else mass

    # construction helpers live at module level; see uniform/from_table

    @property
    def is_uniform(self) -> bool:
        return self._uniform

    def prob(self, h, l=0) -> Fraction:
        h, l = self.domain.encode_high(h), self.domain.encode_low(l)
        if self._uniform:
            return Fraction(1, self.domain.size)
        return self._mass.get((h, l), Fraction(0))

    def items(self) -> Iterator[tuple[tuple[int, int], Fraction]]:
        """Support points in increasing ``(h, l)`` order with their masses."""
        if self._uniform:
            p = Fraction(1, self.domain.size)
            nl = self.domain.low_size
            for idx in range(self.domain.size):
                yield (idx // nl, idx % nl), p
        else:
            for key in sorted(self._mass):
                yield key, self._mass[key]

    def support_size(self) -> int:
        return self.domain.size if self._uniform else len(self._mass)

    def total(self) -> Fraction:
        if self._uniform:
            return Fraction(1)
        return sum(self._mass.values(), Fraction(0))

    def marginal_high(self) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for (h, _), p in self.items():
            out[h] = out.get(h, Fraction(0)) + p
        return out

    def marginal_low(self) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for (_, l), p in self.items():
            out[l] = out.get(l, Fraction(0)) + p
        return out

    def as_table(self) -> dict[tuple[int, int], Fraction]:
        return dict(self.items())

    def __eq__(self, other):
        if not isinstance(other, JointDist) or self.domain != other.domain:
            return NotImplemented if not isinstance(other, JointDist) else False
        if self._uniform and other._uniform:
            return True
        return self.as_table() == other.as_table()

    def __hash__(self):
        return hash((self.domain, tuple(self.items()) if not self._uniform else "U"))

    def __repr__(self):
        if self._uniform:
            return f"JointDist(uniform over {self.domain.size} points)"
        return f"JointDist({len(self._mass)} support points)"

    def dumps(self) -> str:
        """Text form: a ``vars:`` header then ``<h-bits> <l-bits> <num>/<den>`` lines."""
        d = self.domain
        lines = [f"vars: {' '.join(d.high)} | {' '.join(d.low)}".rstrip()]
        for (h, l), p in self.items():
            lines.append(f"{d.high_bits(h)} {d.low_bits(l)} {p.numerator}/{p.denominator}")
        return "\n".join(lines) + "\n"


def uniform(domain: InputDomain, capacity: int = DEFAULT_CAPACITY) -> JointDist:
    """Mass ``1/(|H|*|L|)`` on every input."""
    check_capacity(domain.n_bits, capacity)
    return JointDist(domain, None, _uniform=True)


def from_table(domain: InputDomain, entries: Iterable[tuple[object, object, object]]) -> JointDist:
    """Build a distribution from ``(h, l, mass)`` triples.

    ``h`` and ``l`` may be codes, bit strings or valuations; masses are
    anything :class:`Fraction` accepts.  Repeated points are summed and the
    total must be exactly one.
    """
    mass: dict[tuple[int, int], Fraction] = {}
    for h, l, p in entries:
        try:
            key = (domain.encode_high(h), domain.encode_low(l))
        except (ValueError, KeyError, TypeError) as exc:
            raise DistributionError(f"point ({h!r}, {l!r}) is outside the domain: {exc}") from None
        p = Fraction(p)
        if p < 0:
            raise DistributionError(f"negative mass {p} at ({h!r}, {l!r})")
        mass[key] = mass.get(key, Fraction(0)) + p
    mass = {k: v for k, v in mass.items() if v}
    total = sum(mass.values(), Fraction(0))
    if total != 1:
        raise DistributionError(f"masses sum to {total}, not 1")
    return JointDist(domain, mass)


def point_pair(domain: InputDomain, h, h2, l=0) -> JointDist:
    """Mass 1/2 on each of ``(h, l)`` and ``(h2, l)``."""
    return from_table(domain, [(h, l, Fraction(1, 2)), (h2, l, Fraction(1, 2))])


def sample_random(domain: InputDomain, seed: int, sparsity: float = 0.0,
                  capacity: int = SAMPLE_UNITS_BITS) -> JointDist:
    """A pseudo-random distribution, deterministic in ``seed``.

    Each point is dropped from the support independently with probability
    ``sparsity`` (at least one point is always kept).  The ``2**16`` units of
    mass are split by giving every support point one unit and distributing
    the rest multinomially, so masses are positive multiples of ``2**-16``.
    """
    check_capacity(domain.n_bits, min(capacity, SAMPLE_UNITS_BITS), "distribution")
    if not 0.0 <= sparsity < 1.0:
        raise ValueError("sparsity must lie in [0, 1)")
    rng = np.random.default_rng(seed & ((1 << 64) - 1))
    size = domain.size
    keep = rng.random(size) >= sparsity
    if not keep.any():
        keep[rng.integers(size)] = True
    support = np.flatnonzero(keep)
    units = 1 << SAMPLE_UNITS_BITS
    weights = rng.dirichlet(np.ones(len(support)))
    counts = 1 + rng.multinomial(units - len(support), weights)
    nl = domain.low_size
    mass = {
        (int(i) // nl, int(i) % nl): Fraction(int(c), units)
        for i, c in zip(support, counts)
    }
    return JointDist(domain, mass)


def _parse_names(text: str, lineno: int) -> tuple[str, ...]:
    names = tuple(text.split())
    for n in names:
        if not IDENT_RE.fullmatch(n):
            raise QifSyntaxError(f"bad variable name {n!r}", lineno, 1)
    return names


def loads(text: str, domain: InputDomain | None = None) -> JointDist:
    """Parse the text form written by :meth:`JointDist.dumps`.

    ``-`` stands for an empty bit vector.  If ``domain`` is given, the
    header must name the same variables.
    """
    header = None
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            if not line.startswith("vars:") or "|" not in line:
                raise QifSyntaxError("expected 'vars: <high> | <low>' header", lineno, 1)
            hi, lo = line[len("vars:"):].split("|", 1)
            header = InputDomain(_parse_names(hi, lineno), _parse_names(lo, lineno))
            continue
        parts = line.split()
        if len(parts) != 3:
            raise QifSyntaxError("expected '<h-bits> <l-bits> <num>/<den>'", lineno, 1)
        hb, lb, p = parts
        try:
            mass = Fraction(p)
        except (ValueError, ZeroDivisionError):
            raise QifSyntaxError(f"bad probability {p!r}", lineno, len(hb) + len(lb) + 3) from None
        entries.append((hb, lb, mass))
    if header is None:
        raise QifSyntaxError("empty distribution file", 1, 1)
    if domain is not None and domain != header:
        raise DistributionError(
            f"distribution is over {header.high} | {header.low}, expected {domain.high} | {domain.low}")
    return from_table(header, entries)


def load(path) -> JointDist:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dump(mu: JointDist, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(mu.dumps())


__all__ = [
    "JointDist", "uniform", "from_table", "point_pair", "sample_random",
    "loads", "load", "dump",
]
