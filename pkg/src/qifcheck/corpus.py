"""Generators for the example programs used throughout the package.

Multi-bit values are bit vectors declared most significant bit first
(``h{n-1} .. h0``), so ``h0`` is the ``H & 1`` bit and the input code of a
login valuation is the integer password itself.
"""

from __future__ import annotations

import math

from .errors import CapacityError
from .lang import (
    FALSE,
    TRUE,
    Assign,
    If,
    Not,
    ProgramUnit,
    Skip,
    Var,
    conj_all,
    iff,
    seq,
    xor,
)

MAX_LOGIN_BITS = 24


def _lit(name: str, bit: int):
    return Var(name) if bit else Not(Var(name))


def gen_intro_examples() -> dict[str, ProgramUnit]:
    """The guess-checking program and the copying program over a 2-bit secret.

    The guess is the constant ``01``.
    """
    high, out = ("h1", "h0"), ("o1", "o0")
    guess = conj_all([_lit("h1", 0), _lit("h0", 1)])
    m1 = ProgramUnit(high, (), out, (), If(
        guess,
        seq(Assign("o1", FALSE), Assign("o0", FALSE)),
        seq(Assign("o1", FALSE), Assign("o0", TRUE)),
    ))
    m2 = ProgramUnit(high, (), out, (), seq(Assign("o1", Var("h1")), Assign("o0", Var("h0"))))
    return {"M1_intro": m1, "M2_intro": m2}


def gen_zw_example() -> ProgramUnit:
    """``z := x; w := y; if x & y then z := !z else w := !w`` with ``z, w`` observed."""
    x, y, z, w = (Var(v) for v in "xyzw")
    body = seq(
        Assign("z", x),
        Assign("w", y),
        If(conj_all([x, y]), Assign("z", Not(z)), Assign("w", Not(w))),
    )
    return ProgramUnit(("x", "y"), (), ("z", "w"), (), body)


def login_vars(n_bits: int) -> tuple[tuple[str, ...], tuple[str, ...]]:
    order = range(n_bits - 1, -1, -1)
    return tuple(f"h{i}" for i in order), tuple(f"l{i}" for i in order)


def login_input(n_bits: int, h: int, l: int) -> dict[str, bool]:
    """Valuation of the login inputs for integer password ``h`` and guess ``l``."""
    val = {f"h{i}": bool((h >> i) & 1) for i in range(n_bits)}
    val.update({f"l{i}": bool((l >> i) & 1) for i in range(n_bits)})
    return val


def _bitwise_check(n_compared: int):
    # o := true; then the unrolled "first differing bit clears o and breaks" loop
    body = Skip()
    for i in reversed(range(n_compared)):
        body = If(xor(Var(f"h{i}"), Var(f"l{i}")), Assign("o", FALSE), body)
    return seq(Assign("o", TRUE), body)


def gen_login_corpus(n_bits: int) -> dict[str, ProgramUnit]:
    """The ideal login program and four candidate implementations.

    * ``M_spec``: ``o`` is false iff ``H = L``.
    * ``M1``: copies ``H`` bitwise to ``o{n-1} .. o0``.
    * ``M2``: false on a match, otherwise the low bit of ``H``.
    * ``M3``: compares only the low ``n // 2`` bits (true on match).
    * ``M4``: compares all bits (true on match).
    """
    if not 1 <= n_bits <= MAX_LOGIN_BITS:
        raise CapacityError(f"login corpus supports 1..{MAX_LOGIN_BITS} bits, got {n_bits}")
    high, low = login_vars(n_bits)
    equal = conj_all(iff(Var(h), Var(l)) for h, l in zip(high, low))
    outs = tuple(f"o{i}" for i in range(n_bits - 1, -1, -1))

    def unit(out, body):
        return ProgramUnit(high, low, out, (), body)

    return {
        "M_spec": unit(("o",), If(equal, Assign("o", FALSE), Assign("o", TRUE))),
        "M1": unit(outs, seq(*(Assign(o, Var(h)) for o, h in zip(outs, high)))),
        "M2": unit(("o",), If(equal, Assign("o", FALSE), Assign("o", Var("h0")))),
        "M3": unit(("o",), _bitwise_check(n_bits // 2)),
        "M4": unit(("o",), _bitwise_check(n_bits)),
    }


def _term(count: int, total: int, precise: bool) -> float:
    """``(count/total) * log2(total/count)`` with ``0 log(1/0) = 0``."""
    if count == 0:
        return 0.0
    if not precise:
        c, t = float(count), float(total)
        return c / t * math.log2(t / c)
    if 2 * count <= total:
        return count / total * (math.log2(total) - math.log2(count))
    # log2(t/c) = -log1p(-(t - c)/t) / ln 2 keeps the tail when c is close to t
    return count / total * -math.log1p(-(total - count) / total) / math.log(2)


def login_se_closed_form(n_bits: int, precise: bool = False) -> dict[str, float]:
    """Shannon leakage of the login corpus under the uniform distribution.

    With ``precise=False`` the expressions are evaluated term by term in
    double precision, exactly as written; for large ``n`` the
    ``(N-1)/N * log(N/(N-1))`` tail of ``M_spec`` then rounds to zero.
    ``precise=True`` keeps that tail via ``log1p``.
    """
    if n_bits < 1:
        raise ValueError("n_bits must be positive")
    N = 1 << n_bits
    half = N // 2
    k = n_bits // 2
    match = 1 << (n_bits - k)  # passwords agreeing with the guess on k low bits
    spec = _term(1, N, precise) + _term(N - 1, N, precise)
    m2_odd = _term(half + 1, N, precise) + _term(half - 1, N, precise)
    return {
        "M_spec": spec,
        "M1": float(n_bits),
        "M2": 0.5 + 0.5 * m2_odd,
        "M3": _term(match, N, precise) + _term(N - match, N, precise),
        "M4": spec,
    }
