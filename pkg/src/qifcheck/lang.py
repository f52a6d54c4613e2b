"""Loop-free boolean programs: formula AST, statements, parser and printer.

Formulas are hash-consed: structurally equal formulas are the same Python
object, so equality and hashing are O(1) and shared subterms form a DAG.
Only four node kinds exist (``TRUE``, :class:`Var`, :class:`And`,
:class:`Not`); disjunction, implication, equivalence and ``false`` are
built from them by :func:`disj`, :func:`implies`, :func:`iff` and
``FALSE``.

Concrete syntax::

    program := decl* stmt
    decl    := ("high"|"low"|"out"|"local") ident ("," ident)* ";"
    stmt    := ident ":=" formula
             | "if" formula "then" "{" stmt "}" "else" "{" stmt "}"
             | "skip"
             | stmt ";" stmt
    formula := "true" | "false" | ident | "!" formula
             | formula "&" formula | formula "|" formula
             | formula "=>" formula | formula "==" formula | "(" formula ")"

Binding strength is ``!`` > ``&`` > ``|`` > ``==`` > ``=>``; ``=>`` is
right-associative and the others associate to the left.  ``#`` starts a
comment that runs to the end of the line.
"""

from __future__ import annotations

import re
import threading
import weakref
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import DeclarationError, QifSyntaxError

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
KEYWORDS = frozenset(
    {"high", "low", "out", "local", "if", "then", "else", "skip", "true", "false"}
)

_intern_lock = threading.Lock()


# ---------------------------------------------------------------------------
# Formulas


class Formula:
    """Base class of the hash-consed formula nodes."""

    __slots__ = ("__weakref__",)

    def __setattr__(self, name, value):
        raise AttributeError("formulas are immutable")

    def __repr__(self):
        return f"<{type(self).__name__} {render_formula(self)}>"

    def __str__(self):
        return render_formula(self)


class TrueF(Formula):
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = object.__new__(cls)
        return cls._instance

    def __reduce__(self):
        return (TrueF, ())


class Var(Formula):
    __slots__ = ("name",)
    __match_args__ = ("name",)
    _table: "weakref.WeakValueDictionary[str, Var]" = weakref.WeakValueDictionary()

    def __new__(cls, name: str):
        with _intern_lock:
            node = cls._table.get(name)
            if node is None:
                if not isinstance(name, str) or not IDENT_RE.fullmatch(name):
                    raise ValueError(f"invalid variable name {name!r}")
                node = object.__new__(cls)
                object.__setattr__(node, "name", name)
                cls._table[name] = node
        return node

    def __reduce__(self):
        return (Var, (self.name,))


class And(Formula):
    __slots__ = ("left", "right")
    __match_args__ = ("left", "right")
    _table: "weakref.WeakValueDictionary[tuple[int, int], And]" = (
        weakref.WeakValueDictionary()
    )

    def __new__(cls, left: Formula, right: Formula):
        if not isinstance(left, Formula) or not isinstance(right, Formula):
            raise TypeError("And expects two formulas")
        key = (id(left), id(right))
        with _intern_lock:
            node = cls._table.get(key)
            if node is None:
                node = object.__new__(cls)
                object.__setattr__(node, "left", left)
                object.__setattr__(node, "right", right)
                cls._table[key] = node
        return node

    def __reduce__(self):
        return (And, (self.left, self.right))


class Not(Formula):
    __slots__ = ("child",)
    __match_args__ = ("child",)
    _table: "weakref.WeakValueDictionary[int, Not]" = weakref.WeakValueDictionary()

    def __new__(cls, child: Formula):
        if not isinstance(child, Formula):
            raise TypeError("Not expects a formula")
        key = id(child)
        with _intern_lock:
            node = cls._table.get(key)
            if node is None:
                node = object.__new__(cls)
                object.__setattr__(node, "child", child)
                cls._table[key] = node
        return node

    def __reduce__(self):
        return (Not, (self.child,))


TRUE = TrueF()
FALSE = Not(TRUE)


def disj(a: Formula, b: Formula) -> Formula:
    return Not(And(Not(a), Not(b)))


def implies(a: Formula, b: Formula) -> Formula:
    return Not(And(a, Not(b)))


def iff(a: Formula, b: Formula) -> Formula:
    return And(implies(a, b), implies(b, a))


def xor(a: Formula, b: Formula) -> Formula:
    return Not(iff(a, b))


def conj_all(items: Iterable[Formula]) -> Formula:
    """Balanced conjunction; ``TRUE`` for an empty iterable."""
    return _balanced(list(items), And, TRUE)


def disj_all(items: Iterable[Formula]) -> Formula:
    """Balanced disjunction; ``FALSE`` for an empty iterable."""
    return _balanced(list(items), disj, FALSE)


def _balanced(items, op, unit):
    if not items:
        return unit
    while len(items) > 1:
        paired = [op(items[i], items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            paired.append(items[-1])
        items = paired
    return items[0]


def children(node: Formula) -> tuple[Formula, ...]:
    if isinstance(node, And):
        return (node.left, node.right)
    if isinstance(node, Not):
        return (node.child,)
    return ()


def postorder(root: Formula) -> Iterator[Formula]:
    """Yield every distinct node of the DAG once, children before parents."""
    seen = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if node in seen:
            continue
        kids = children(node)
        if expanded or not kids:
            seen.add(node)
            yield node
            continue
        stack.append((node, True))
        for child in reversed(kids):
            if child not in seen:
                stack.append((child, False))


def variables(f: Formula) -> tuple[str, ...]:
    """Variable names of ``f`` in left-to-right order of first occurrence."""
    seen: dict[str, None] = {}
    stack = [f]
    visited = set()
    while stack:
        node = stack.pop()
        if node in visited:
            continue
        visited.add(node)
        if isinstance(node, Var):
            seen.setdefault(node.name)
        else:
            stack.extend(reversed(children(node)))
    return tuple(seen)


def tree_size(f: Formula) -> int:
    """Number of AST nodes when the DAG is unfolded into a tree."""
    size: dict[Formula, int] = {}
    for node in postorder(f):
        size[node] = 1 + sum(size[c] for c in children(node))
    return size[f]


def dag_size(f: Formula) -> int:
    return sum(1 for _ in postorder(f))


def substitute(f: Formula, mapping: Mapping[str, Formula]) -> Formula:
    """Simultaneously replace variables by formulas."""
    if not mapping:
        return f
    out: dict[Formula, Formula] = {}
    for node in postorder(f):
        if isinstance(node, Var):
            out[node] = mapping.get(node.name, node)
        elif isinstance(node, And):
            out[node] = And(out[node.left], out[node.right])
        elif isinstance(node, Not):
            out[node] = Not(out[node.child])
        else:
            out[node] = node
    return out[f]


def evaluate_formula(f: Formula, env: Mapping[str, object]):
    """Evaluate ``f`` under ``env``.

    Values may be Python bools or numpy boolean arrays of a common shape; in
    the array case the result is an array (or a bool if ``f`` is constant).
    """
    val: dict[Formula, object] = {}
    for node in postorder(f):
        if isinstance(node, TrueF):
            val[node] = True
        elif isinstance(node, Var):
            try:
                val[node] = env[node.name]
            except KeyError:
                raise KeyError(f"no value for variable {node.name!r}") from None
        elif isinstance(node, And):
            a, b = val[node.left], val[node.right]
            if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
                val[node] = np.logical_and(a, b)
            else:
                val[node] = bool(a) and bool(b)
        else:
            a = val[node.child]
            val[node] = np.logical_not(a) if isinstance(a, np.ndarray) else not a
    return val[f]


def truth_table(f: Formula, names: Iterable[str] | None = None) -> np.ndarray:
    """Truth table of ``f`` over ``names`` (default: its own variables).

    Row ``i`` assigns ``names[j]`` the bit ``(i >> (n-1-j)) & 1``.
    """
    names = tuple(variables(f) if names is None else names)
    env = enumeration_env(names)
    res = evaluate_formula(f, env)
    return np.broadcast_to(np.asarray(res, dtype=bool), (1 << len(names),)).copy()


def enumeration_env(names, start=0, stop=None) -> dict[str, np.ndarray]:
    """Bit columns for rows ``start..stop`` of the lexicographic enumeration."""
    n = len(names)
    stop = (1 << n) if stop is None else stop
    idx = np.arange(start, stop, dtype=np.int64)
    return {name: ((idx >> (n - 1 - j)) & 1).astype(bool) for j, name in enumerate(names)}


# ---------------------------------------------------------------------------
# Statements


class Stmt:
    """Base class of loop-free statements."""

    __slots__ = ()


@dataclass(frozen=True)
class Assign(Stmt):
    var: str
    expr: Formula


@dataclass(frozen=True)
class If(Stmt):
    cond: Formula
    then: Stmt
    orelse: Stmt


@dataclass(frozen=True)
class Seq(Stmt):
    first: Stmt
    second: Stmt


@dataclass(frozen=True)
class Skip(Stmt):
    pass


def seq(*stmts: Stmt) -> Stmt:
    """Right-nested sequence of ``stmts`` (``Skip`` when empty)."""
    flat: list[Stmt] = []
    for s in stmts:
        flat.extend(flatten_seq(s))
    if not flat:
        return Skip()
    out = flat[-1]
    for s in reversed(flat[:-1]):
        out = Seq(s, out)
    return out


def flatten_seq(s: Stmt) -> list[Stmt]:
    out: list[Stmt] = []
    stack = [s]
    while stack:
        node = stack.pop()
        if isinstance(node, Seq):
            stack.append(node.second)
            stack.append(node.first)
        else:
            out.append(node)
    return out


def walk_stmt(s: Stmt) -> Iterator[Stmt]:
    stack = [s]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Seq):
            stack += [node.second, node.first]
        elif isinstance(node, If):
            stack += [node.orelse, node.then]


def assigned_vars(s: Stmt) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for node in walk_stmt(s):
        if isinstance(node, Assign):
            seen.setdefault(node.var)
    return tuple(seen)


def stmt_variables(s: Stmt) -> tuple[str, ...]:
    """All variables read or written by ``s`` in order of first occurrence."""
    seen: dict[str, None] = {}
    for node in walk_stmt(s):
        if isinstance(node, Assign):
            seen.setdefault(node.var)
            for v in variables(node.expr):
                seen.setdefault(v)
        elif isinstance(node, If):
            for v in variables(node.cond):
                seen.setdefault(v)
    return tuple(seen)


def map_stmt_formulas(s: Stmt, fn, rename=lambda v: v) -> Stmt:
    """Rebuild ``s`` applying ``fn`` to every formula and ``rename`` to targets."""
    if isinstance(s, Assign):
        return Assign(rename(s.var), fn(s.expr))
    if isinstance(s, If):
        return If(fn(s.cond), map_stmt_formulas(s.then, fn, rename),
                  map_stmt_formulas(s.orelse, fn, rename))
    if isinstance(s, Seq):
        parts = [map_stmt_formulas(p, fn, rename) for p in flatten_seq(s)]
        return _reseq_like(s, parts)
    return s


def _reseq_like(original: Seq, parts: list[Stmt]) -> Stmt:
    # rebuild with the same nesting shape as ``original``
    it = iter(parts)

    def build(node):
        if isinstance(node, Seq):
            return Seq(build(node.first), build(node.second))
        return next(it)

    return build(original)


# ---------------------------------------------------------------------------
# Program units and input domains


@dataclass(frozen=True)
class InputDomain:
    """Ordered high and low input variables of a program.

    A high (low) valuation is encoded as the integer whose binary digits,
    most significant first, are the variable values in declared order.
    """

    high: tuple[str, ...]
    low: tuple[str, ...]

    @property
    def n_high(self) -> int:
        return len(self.high)

    @property
    def n_low(self) -> int:
        return len(self.low)

    @property
    def n_bits(self) -> int:
        return len(self.high) + len(self.low)

    @property
    def high_size(self) -> int:
        return 1 << len(self.high)

    @property
    def low_size(self) -> int:
        return 1 << len(self.low)

    @property
    def size(self) -> int:
        return 1 << self.n_bits

    def encode_high(self, value) -> int:
        return _encode(value, self.high, "high")

    def encode_low(self, value) -> int:
        return _encode(value, self.low, "low")

    def high_bits(self, code: int) -> str:
        return bits(code, len(self.high))

    def low_bits(self, code: int) -> str:
        return bits(code, len(self.low))

    def high_valuation(self, code: int) -> dict[str, bool]:
        return decode(code, self.high)

    def low_valuation(self, code: int) -> dict[str, bool]:
        return decode(code, self.low)

    def valuation(self, h: int, l: int) -> dict[str, bool]:
        return {**decode(h, self.high), **decode(l, self.low)}


def bits(code: int, width: int) -> str:
    """Bit string of ``code``, most significant first; ``-`` for width 0."""
    return format(code, f"0{width}b") if width else "-"


def decode(code: int, names) -> dict[str, bool]:
    n = len(names)
    return {name: bool((code >> (n - 1 - j)) & 1) for j, name in enumerate(names)}


def _encode(value, names, kind) -> int:
    n = len(names)
    if isinstance(value, (bool, np.bool_)):
        raise TypeError(f"ambiguous {kind} valuation {value!r}")
    if isinstance(value, (int, np.integer)):
        code = int(value)
    elif isinstance(value, str):
        text = value.strip()
        if text in ("-", ""):
            text = ""
        if len(text) != n or any(c not in "01" for c in text):
            raise ValueError(f"{kind} bit string {value!r} does not match {n} variables")
        code = int(text, 2) if text else 0
    elif isinstance(value, Mapping):
        if set(value) != set(names):
            raise ValueError(f"{kind} valuation must assign exactly {list(names)}")
        code = 0
        for name in names:
            code = (code << 1) | int(bool(value[name]))
    else:
        seq_ = list(value)
        if len(seq_) != n:
            raise ValueError(f"{kind} valuation needs {n} values")
        code = 0
        for b in seq_:
            code = (code << 1) | int(bool(b))
    if not 0 <= code < (1 << n):
        raise ValueError(f"{kind} code {code} out of range for {n} variables")
    return code


@dataclass(frozen=True)
class ProgramUnit:
    """Declarations plus a loop-free body.

    ``out`` may overlap ``high`` or ``low``; the four lists are otherwise
    pairwise disjoint.  Variables that are not inputs start out false.
    """

    high: tuple[str, ...]
    low: tuple[str, ...]
    out: tuple[str, ...]
    local: tuple[str, ...]
    body: Stmt = field(default_factory=Skip)

    def __post_init__(self):
        for name in ("high", "low", "out", "local"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        _check_declarations(self.high, self.low, self.out, self.local)
        declared = set(self.variables)
        for v in stmt_variables(self.body):
            if v not in declared:
                raise DeclarationError(f"undeclared variable {v!r}")

    @property
    def inputs(self) -> tuple[str, ...]:
        return self.high + self.low

    @property
    def variables(self) -> tuple[str, ...]:
        """Every declared name once: high, low, output-only, local."""
        ins = set(self.inputs)
        return self.inputs + tuple(o for o in self.out if o not in ins) + self.local

    @property
    def domain(self) -> InputDomain:
        return InputDomain(self.high, self.low)

    def __str__(self):
        return render_program(self)


def _check_declarations(high, low, out, local):
    for name in (*high, *low, *out, *local):
        if not isinstance(name, str) or not IDENT_RE.fullmatch(name) or name in KEYWORDS:
            raise DeclarationError(f"invalid variable name {name!r}")
    for kind, names in (("high", high), ("low", low), ("out", out), ("local", local)):
        if len(set(names)) != len(names):
            raise DeclarationError(f"duplicate declaration in {kind} list")
    pairs = [("high", high, "low", low), ("high", high, "local", local),
             ("low", low, "local", local), ("out", out, "local", local)]
    for k1, a, k2, b in pairs:
        both = set(a) & set(b)
        if both:
            raise DeclarationError(
                f"variable {sorted(both)[0]!r} declared both {k1} and {k2}")


# ---------------------------------------------------------------------------
# Printer

_LEVEL_IMPLIES, _LEVEL_IFF, _LEVEL_OR, _LEVEL_AND, _LEVEL_ATOM = range(5)


def _sugar(node: Formula):
    """Recognise a derived connective; returns (kind, a, b) or None."""
    if node is FALSE:
        return ("false", None, None)
    if isinstance(node, And):
        l, r = node.left, node.right
        if (isinstance(l, Not) and isinstance(l.child, And) and isinstance(l.child.right, Not)
                and isinstance(r, Not) and isinstance(r.child, And)
                and isinstance(r.child.right, Not)):
            a, b = l.child.left, l.child.right.child
            if r.child.left is b and r.child.right.child is a:
                return ("iff", a, b)
        return None
    if isinstance(node, Not) and isinstance(node.child, And):
        l, r = node.child.left, node.child.right
        if isinstance(l, Not) and isinstance(r, Not):
            return ("or", l.child, r.child)
        if isinstance(r, Not):
            return ("implies", l, r.child)
    return None


def render_formula(f: Formula) -> str:
    """Render with derived connectives re-sugared and minimal parentheses."""
    # iterative to survive deep formulas
    out: dict[tuple[Formula, int], str] = {}
    stack = [(f, 0, False)]
    while stack:
        node, need, ready = stack.pop()
        key = (node, need)
        if key in out:
            continue
        plan = _render_plan(node)
        if not ready:
            stack.append((node, need, True))
            for child, lvl in plan[2]:
                if (child, lvl) not in out:
                    stack.append((child, lvl, False))
            continue
        level, template, parts = plan
        text = template.format(*[out[(c, lvl)] for c, lvl in parts])
        out[key] = f"({text})" if level < need else text
    return out[(f, 0)]


def _render_plan(node):
    s = _sugar(node)
    if s is not None:
        kind, a, b = s
        if kind == "false":
            return (_LEVEL_ATOM, "false", [])
        if kind == "iff":
            return (_LEVEL_IFF, "{} == {}", [(a, _LEVEL_IFF), (b, _LEVEL_OR)])
        if kind == "or":
            return (_LEVEL_OR, "{} | {}", [(a, _LEVEL_OR), (b, _LEVEL_AND)])
        return (_LEVEL_IMPLIES, "{} => {}", [(a, _LEVEL_IFF), (b, _LEVEL_IMPLIES)])
    if isinstance(node, TrueF):
        return (_LEVEL_ATOM, "true", [])
    if isinstance(node, Var):
        return (_LEVEL_ATOM, node.name, [])
    if isinstance(node, And):
        return (_LEVEL_AND, "{} & {}", [(node.left, _LEVEL_AND), (node.right, _LEVEL_ATOM)])
    return (_LEVEL_ATOM, "!{}", [(node.child, _LEVEL_ATOM)])


def render_stmt(s: Stmt, indent: str = "") -> str:
    lines: list[str] = []
    parts = flatten_seq(s)
    for i, part in enumerate(parts):
        sep = ";" if i < len(parts) - 1 else ""
        if isinstance(part, Assign):
            lines.append(f"{indent}{part.var} := {render_formula(part.expr)}{sep}")
        elif isinstance(part, Skip):
            lines.append(f"{indent}skip{sep}")
        else:
            inner = indent + "  "
            lines.append(f"{indent}if {render_formula(part.cond)} then {{")
            lines.append(render_stmt(part.then, inner))
            lines.append(f"{indent}}} else {{")
            lines.append(render_stmt(part.orelse, inner))
            lines.append(f"{indent}}}{sep}")
    return "\n".join(lines)


def render_program(p: ProgramUnit) -> str:
    lines = []
    for kw in ("high", "low", "out", "local"):
        names = getattr(p, kw)
        if names:
            lines.append(f"{kw} {', '.join(names)};")
    lines.append(render_stmt(p.body))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Parser

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\f\v]+)|(?P<nl>\n)|(?P<comment>\#[^\n]*)"
    r"|(?P<op>:=|=>|==|[!&|(){};,])"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # "op", "ident", "kw", "eof"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise QifSyntaxError(f"unexpected character {text[pos]!r}", line,
                                 pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "op":
            toks.append(_Tok("op", m.group(), line, col))
        elif kind == "ident":
            word = m.group()
            toks.append(_Tok("kw" if word in KEYWORDS else "ident", word, line, col))
        pos = m.end()
    toks.append(_Tok("eof", "<end of input>", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, declared: Mapping[str, str] | None = None):
        self.toks = _tokenize(text)
        self.i = 0
        self.declared = declared  # None: accept any identifier

    # token helpers
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message, tok=None):
        tok = tok or self.tok
        return QifSyntaxError(message, tok.line, tok.col)

    def at(self, text) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text == text

    def expect(self, text) -> _Tok:
        if not self.at(text):
            raise self.error(f"expected {text!r} but found {self.tok.text!r}")
        tok = self.tok
        self.i += 1
        return tok

    def ident(self) -> _Tok:
        if self.tok.kind != "ident":
            raise self.error(f"expected identifier but found {self.tok.text!r}")
        tok = self.tok
        self.i += 1
        return tok

    def use(self, tok: _Tok) -> str:
        if self.declared is not None and tok.text not in self.declared:
            raise DeclarationError(
                f"undeclared variable {tok.text!r} (line {tok.line}, column {tok.col})")
        return tok.text

    # program
    def program(self) -> ProgramUnit:
        decls = {"high": [], "low": [], "out": [], "local": []}
        allowed_overlap = ({"out", "high"}, {"out", "low"})
        while self.tok.kind == "kw" and self.tok.text in decls:
            kind = self.tok.text
            self.i += 1
            while True:
                tok = self.ident()
                for other, names in decls.items():
                    if tok.text in names and {kind, other} not in allowed_overlap:
                        raise DeclarationError(
                            f"duplicate declaration of {tok.text!r} "
                            f"(line {tok.line}, column {tok.col})")
                decls[kind].append(tok.text)
                if not self.at(","):
                    break
                self.i += 1
            self.expect(";")
        self.declared = {name for names in decls.values() for name in names}
        body = self.stmt_seq()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r} after program body")
        return ProgramUnit(tuple(decls["high"]), tuple(decls["low"]),
                           tuple(decls["out"]), tuple(decls["local"]), body)

    def stmt_seq(self) -> Stmt:
        parts = [self.stmt()]
        while self.at(";"):
            self.i += 1
            if self.tok.kind == "eof" or self.at("}"):
                break  # tolerate a trailing separator
            parts.append(self.stmt())
        return seq(*parts)

    def stmt(self) -> Stmt:
        if self.at("skip"):
            self.i += 1
            return Skip()
        if self.at("if"):
            self.i += 1
            cond = self.formula()
            self.expect("then")
            self.expect("{")
            then = self.stmt_seq()
            self.expect("}")
            self.expect("else")
            self.expect("{")
            orelse = self.stmt_seq()
            self.expect("}")
            return If(cond, then, orelse)
        if self.tok.kind == "ident":
            target = self.use(self.ident())
            self.expect(":=")
            return Assign(target, self.formula())
        raise self.error(f"expected a statement but found {self.tok.text!r}")

    # formulas, lowest binding first
    def formula(self) -> Formula:
        left = self.iff_level()
        if self.at("=>"):
            self.i += 1
            return implies(left, self.formula())
        return left

    def iff_level(self) -> Formula:
        left = self.or_level()
        while self.at("=="):
            self.i += 1
            left = iff(left, self.or_level())
        return left

    def or_level(self) -> Formula:
        left = self.and_level()
        while self.at("|"):
            self.i += 1
            left = disj(left, self.and_level())
        return left

    def and_level(self) -> Formula:
        left = self.unary()
        while self.at("&"):
            self.i += 1
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        if self.at("!"):
            self.i += 1
            return Not(self.unary())
        if self.at("("):
            self.i += 1
            inner = self.formula()
            self.expect(")")
            return inner
        if self.at("true"):
            self.i += 1
            return TRUE
        if self.at("false"):
            self.i += 1
            return FALSE
        if self.tok.kind == "ident":
            return Var(self.use(self.ident()))
        raise self.error(f"expected a formula but found {self.tok.text!r}")


def parse_program(text: str) -> ProgramUnit:
    """Parse program text; extended connectives are desugared to the core."""
    return _Parser(text).program()


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after formula")
    return f
