"""Concrete execution and exhaustive denotations.

``evaluate`` is a direct big-step interpreter for a single input.
``denotation`` runs the program on every input at once, one numpy boolean
column per variable, merging the two arms of a conditional with
``np.where``.  The input space is processed in chunks so memory stays
bounded at the capacity limit.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterator, Mapping

import numpy as np

from .errors import CapacityError
from .lang import (
    Assign,
    If,
    InputDomain,
    ProgramUnit,
    Seq,
    Stmt,
    assigned_vars,
    bits,
    enumeration_env,
    evaluate_formula,
    flatten_seq,
)

DEFAULT_CAPACITY = 24
CHUNK_BITS = 18
DENSE_LIMIT = 1 << 26
MAX_PACKED_OUTPUTS = 62


def check_capacity(n_bits: int, capacity: int = DEFAULT_CAPACITY, what="input") -> None:
    if capacity < 1:
        raise ValueError("capacity must be at least 1 bit")
    if n_bits > capacity:
        raise CapacityError(f"{what} space of {n_bits} bits exceeds capacity of {capacity} bits")


def initial_state(p: ProgramUnit, inputs: Mapping[str, bool]) -> dict[str, bool]:
    missing = [v for v in p.inputs if v not in inputs]
    if missing:
        raise ValueError(f"input does not assign {missing}")
    state = {v: False for v in p.variables}
    for v in p.inputs:
        state[v] = bool(inputs[v])
    return state


def execute(s: Stmt, state: dict[str, bool]) -> dict[str, bool]:
    """Run ``s`` on a scalar state in place and return it."""
    stack = [s]
    while stack:
        node = stack.pop()
        if isinstance(node, Assign):
            state[node.var] = bool(evaluate_formula(node.expr, state))
        elif isinstance(node, Seq):
            stack.append(node.second)
            stack.append(node.first)
        elif isinstance(node, If):
            stack.append(node.then if evaluate_formula(node.cond, state) else node.orelse)
    return state


def evaluate(p: ProgramUnit, inputs: Mapping[str, bool]) -> dict[str, bool]:
    """Final values of the output variables on one input.

    Locals and output-only variables start false.
    """
    state = execute(p.body, initial_state(p, inputs))
    return {o: state[o] for o in p.out}


def evaluate_codes(p: ProgramUnit, h, l=0) -> int:
    """Like :func:`evaluate` with encoded inputs; returns the output code."""
    dom = p.domain
    out = evaluate(p, dom.valuation(dom.encode_high(h), dom.encode_low(l)))
    code = 0
    for o in p.out:
        code = (code << 1) | int(out[o])
    return code


def _exec_vec(s: Stmt, state: dict[str, np.ndarray], size: int) -> None:
    for part in flatten_seq(s):
        if isinstance(part, Assign):
            val = evaluate_formula(part.expr, state)
            if not isinstance(val, np.ndarray):
                val = np.full(size, bool(val))
            state[part.var] = val
        elif isinstance(part, If):
            cond = evaluate_formula(part.cond, state)
            if not isinstance(cond, np.ndarray):
                _exec_vec(part.then if cond else part.orelse, state, size)
                continue
            if cond.all():
                _exec_vec(part.then, state, size)
                continue
            if not cond.any():
                _exec_vec(part.orelse, state, size)
                continue
            then_state = dict(state)
            _exec_vec(part.then, then_state, size)
            else_state = dict(state)
            _exec_vec(part.orelse, else_state, size)
            for v in dict.fromkeys(assigned_vars(part.then) + assigned_vars(part.orelse)):
                state[v] = np.where(cond, then_state[v], else_state[v])


def _pack(columns: list[np.ndarray], size: int) -> np.ndarray:
    if len(columns) > MAX_PACKED_OUTPUTS:
        codes = np.zeros(size, dtype=object)
        for col in columns:
            codes = codes * 2 + col.astype(np.int64).astype(object)
        return codes
    codes = np.zeros(size, dtype=np.int64)
    for col in columns:
        codes = (codes << 1) | col.astype(np.int64)
    return codes


def output_codes(p: ProgramUnit, capacity: int = DEFAULT_CAPACITY) -> np.ndarray:
    """Output code of every input, indexed by ``h * |L| + l``."""
    n_in = len(p.inputs)
    check_capacity(n_in, capacity)
    total = 1 << n_in
    chunk = 1 << CHUNK_BITS
    pieces = []
    for start in range(0, total, chunk):
        stop = min(total, start + chunk)
        size = stop - start
        state = enumeration_env(p.inputs, start, stop)
        for v in p.variables:
            state.setdefault(v, np.zeros(size, dtype=bool))
        _exec_vec(p.body, state, size)
        pieces.append(_pack([state[o] for o in p.out], size))
    return np.concatenate(pieces) if len(pieces) > 1 else pieces[0]


class Denotation:
    """The input/output table of a program: one record per ``(h, l)``.

    Records are ordered lexicographically by the high then low bit strings,
    which is the order of the flat index ``h * |L| + l``.
    """

    def __init__(self, domain: InputDomain, out: tuple[str, ...], codes: np.ndarray):
        self.domain = domain
        self.out = tuple(out)
        self.codes = codes
        if len(codes) != domain.size:
            raise ValueError("denotation must have one record per input")

    def __len__(self):
        return len(self.codes)

    def __eq__(self, other):
        return (isinstance(other, Denotation) and self.domain == other.domain
                and self.out == other.out and np.array_equal(self.codes, other.codes))

    def output(self, h: int, l: int = 0) -> int:
        return int(self.codes[h * self.domain.low_size + l])

    def records(self) -> Iterator[tuple[tuple[int, int], int]]:
        nl = self.domain.low_size
        for idx, code in enumerate(self.codes.tolist()):
            yield (idx // nl, idx % nl), int(code)

    @cached_property
    def labels(self) -> np.ndarray:
        """Dense output labels ``0..K-1`` in increasing order of output code."""
        if self.codes.dtype == object:
            uniq = sorted(set(self.codes.tolist()))
            index = {c: i for i, c in enumerate(uniq)}
            return np.array([index[c] for c in self.codes.tolist()], dtype=np.int64)
        top = int(self.codes.max())
        if top < DENSE_LIMIT:
            # rank codes through a presence table instead of sorting
            present = np.zeros(top + 1, dtype=np.int64)
            present[self.codes] = 1
            rank = np.cumsum(present) - 1
            return rank[self.codes]
        _, inverse = np.unique(self.codes, return_inverse=True)
        return inverse.astype(np.int64).reshape(-1)

    @property
    def n_labels(self) -> int:
        return int(self.labels.max()) + 1

    @property
    def table(self) -> np.ndarray:
        """Labels as a ``(|H|, |L|)`` array."""
        return self.labels.reshape(self.domain.high_size, self.domain.low_size)

    @cached_property
    def _class_keys(self):
        nl, k = self.domain.low_size, self.n_labels
        low = np.tile(np.arange(nl, dtype=np.int64), self.domain.high_size)
        keys = low * k + self.labels
        if nl * k <= DENSE_LIMIT:
            counts = np.bincount(keys, minlength=nl * k)
            present = np.flatnonzero(counts)
            return present, counts[present]
        return np.unique(keys, return_counts=True)

    def class_counts(self) -> np.ndarray:
        """Sizes ``n_{o,l}`` of all non-empty output classes, over every ``l``."""
        return self._class_keys[1]

    def image_sizes(self) -> np.ndarray:
        """``|image(l)|`` for every low input ``l``."""
        keys, _ = self._class_keys
        return np.bincount(keys // self.n_labels, minlength=self.domain.low_size)

    def column(self, l: int) -> np.ndarray:
        return self.table[:, l]

    def image(self, l: int) -> frozenset[str]:
        nl = self.domain.low_size
        codes = self.codes[l::nl]
        return frozenset(bits(int(c), len(self.out)) for c in set(codes.tolist()))

    def partition(self, l: int) -> list[frozenset[str]]:
        col = self.column(l)
        blocks: dict[int, list[str]] = {}
        for h, lab in enumerate(col.tolist()):
            blocks.setdefault(lab, []).append(self.domain.high_bits(h))
        return sorted((frozenset(b) for b in blocks.values()), key=min)

    def serialize(self) -> str:
        dom, width = self.domain, len(self.out)
        lines = [
            f"{dom.high_bits(h)} {dom.low_bits(l)} -> {bits(o, width)}"
            for (h, l), o in self.records()
        ]
        return "\n".join(lines) + "\n"


def denotation(p: ProgramUnit, capacity: int = DEFAULT_CAPACITY) -> Denotation:
    return Denotation(p.domain, p.out, output_codes(p, capacity))


def output_image(p: ProgramUnit, l=0, capacity: int = DEFAULT_CAPACITY) -> frozenset[str]:
    """Distinct output bit strings over all high inputs for low input ``l``."""
    return denotation(p, capacity).image(p.domain.encode_low(l))


def partition(p: ProgramUnit, l=0, capacity: int = DEFAULT_CAPACITY) -> list[frozenset[str]]:
    """Blocks of high bit strings that yield equal outputs under ``l``."""
    return denotation(p, capacity).partition(p.domain.encode_low(l))
