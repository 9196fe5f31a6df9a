"""Piecewise closed-form sequences over the integers.

Expressions use one variable ``n``, decimal literals, ``+ - * / ^``, unary
minus and the functions sqrt, log (natural), exp and abs. Precedence from
loosest to tightest::

    + -   <   * /   <   unary -   <   ^

``^`` is right-associative and its exponent may carry its own unary minus,
so ``-2^n`` is ``-(2^n)`` and ``2^-n`` is ``2^(-n)``.

A sequence is an ordered list of ``(condition, expression)`` pieces; the
first matching piece wins.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .core import BasisVariant, RootLimit, root_limit
from .errors import (ExprSyntaxError, NoMatchingPiece, NonFiniteValue, RadiiCollapse,
                     UnknownFunction, UnknownIdentifier, ZeroA)

FUNCTIONS = {
    "sqrt": math.sqrt,
    "log": math.log,
    "exp": math.exp,
    "abs": abs,
}


# --------------------------------------------------------------------- AST

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str = "n"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Num | Var | Neg | BinOp | Call


def to_source(e: Expr) -> str:
    """Fully parenthesized text that parses back to the same tree."""
    if isinstance(e, Num):
        return repr(float(e.value))
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_source(e.operand)})"
    if isinstance(e, BinOp):
        return f"({to_source(e.left)}{e.op}{to_source(e.right)})"
    if isinstance(e, Call):
        return f"{e.func}({to_source(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


# ------------------------------------------------------------------ lexer

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str     # num, ident, op, end
    text: str
    offset: int   # byte offset into the UTF-8 source


def _tokenize(src: str):
    toks = []
    pos = 0
    # byte offsets, so that non-ASCII input reports positions correctly
    byte_at = _byte_offsets(src)
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ExprSyntaxError(src, byte_at[pos], {"number", "n", "function", "(", "-"})
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), byte_at[pos]))
        pos = m.end()
    toks.append(_Tok("end", "", byte_at[len(src)]))
    return toks


def _byte_offsets(src):
    out = [0]
    for ch in src:
        out.append(out[-1] + len(ch.encode("utf-8")))
    return out


# ----------------------------------------------------------------- parser

_ATOM_START = {"number", "n", "function", "("}


class _Parser:
    def __init__(self, src):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def fail(self, expected):
        raise ExprSyntaxError(self.src, self.tok.offset, expected)

    def take(self):
        t = self.tok
        self.i += 1
        return t

    def is_op(self, *ops):
        return self.tok.kind == "op" and self.tok.text in ops

    def parse(self):
        e = self.expr()
        if self.tok.kind != "end":
            self.fail({"+", "-", "*", "/", "^", "end of input"})
        return e

    def expr(self):
        e = self.term()
        while self.is_op("+", "-"):
            op = self.take().text
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.unary()
        while self.is_op("*", "/"):
            op = self.take().text
            e = BinOp(op, e, self.unary())
        return e

    def unary(self):
        if self.is_op("-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.is_op("^"):
            self.take()
            # exponent is a unary, so ^ groups to the right
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.take()
            return Num(float(t.text))
        if t.kind == "ident":
            self.take()
            if self.is_op("("):
                if t.text not in FUNCTIONS:
                    raise UnknownFunction(t.text, self.src, t.offset)
                self.take()
                arg = self.expr()
                if not self.is_op(")"):
                    self.fail({")", "+", "-", "*", "/", "^"})
                self.take()
                return Call(t.text, arg)
            if t.text == "n":
                return Var("n")
            if t.text in FUNCTIONS:
                raise ExprSyntaxError(self.src, self.tok.offset, {"("})
            raise UnknownIdentifier(t.text, self.src, t.offset)
        if self.is_op("("):
            self.take()
            e = self.expr()
            if not self.is_op(")"):
                self.fail({")", "+", "-", "*", "/", "^"})
            self.take()
            return e
        self.fail(_ATOM_START | {"-"})


def parse_expression(src: str) -> Expr:
    """Parse an expression in ``n``; raises on syntax errors and unknown names."""
    if not isinstance(src, str) or not src.strip():
        raise ExprSyntaxError(src if isinstance(src, str) else "", 0, _ATOM_START | {"-"})
    return _Parser(src).parse()


# -------------------------------------------------------------- evaluation

def _pow(x, y):
    return math.pow(x, y)


_BINOPS = {
    "+": lambda x, y: x + y,
    "-": lambda x, y: x - y,
    "*": lambda x, y: x * y,
    "/": lambda x, y: x / y,
    "^": _pow,
}


def compile_expr(e: Expr) -> Callable[[float], float]:
    """Turn a tree into a closure ``n -> float``; domain errors propagate."""
    if isinstance(e, Num):
        v = float(e.value)
        return lambda n: v
    if isinstance(e, Var):
        return lambda n: n
    if isinstance(e, Neg):
        f = compile_expr(e.operand)
        return lambda n: -f(n)
    if isinstance(e, BinOp):
        f, g, op = compile_expr(e.left), compile_expr(e.right), _BINOPS[e.op]
        return lambda n: op(f(n), g(n))
    if isinstance(e, Call):
        f, fn = compile_expr(e.arg), FUNCTIONS[e.func]
        return lambda n: fn(f(n))
    raise TypeError(f"not an expression node: {e!r}")


def evaluate_expr(e: Expr, n: int) -> float:
    """Evaluate at integer n. Domain errors and overflow become NonFiniteValue."""
    return _safe_eval(compile_expr(e), n, to_source(e))


def _safe_eval(fn, n, label=""):
    try:
        v = float(fn(float(n)))
    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        raise NonFiniteValue(n, f"{label}: {exc}" if label else str(exc)) from None
    if not math.isfinite(v):
        raise NonFiniteValue(n, label)
    return v


# ------------------------------------------------------------- conditions

_COND_PATTERNS = [
    (re.compile(r"^n\s*>=\s*([+-]?\d+)$"), "ge"),
    (re.compile(r"^n\s*<=\s*([+-]?\d+)$"), "le"),
    (re.compile(r"^n\s*==\s*([+-]?\d+)$"), "eq"),
    (re.compile(r"^([+-]?\d+)\s*<=\s*n\s*<=\s*([+-]?\d+)$"), "range"),
    (re.compile(r"^otherwise$"), "otherwise"),
]


@dataclass(frozen=True)
class PieceCondition:
    kind: str            # ge, le, eq, range, otherwise
    lo: int | None = None
    hi: int | None = None

    @classmethod
    def parse(cls, text: str) -> "PieceCondition":
        s = text.strip()
        for pat, kind in _COND_PATTERNS:
            m = pat.match(s)
            if not m:
                continue
            if kind == "ge":
                return cls(kind, lo=int(m.group(1)))
            if kind == "le":
                return cls(kind, hi=int(m.group(1)))
            if kind == "eq":
                k = int(m.group(1))
                return cls(kind, lo=k, hi=k)
            if kind == "range":
                lo, hi = int(m.group(1)), int(m.group(2))
                if lo > hi:
                    raise ExprSyntaxError(text, 0, {"K1 <= K2"})
                return cls(kind, lo=lo, hi=hi)
            return cls("otherwise")
        raise ExprSyntaxError(text, 0, {"n>=K", "n<=K", "n==K", "K1<=n<=K2", "otherwise"})

    def matches(self, n: int) -> bool:
        if self.kind == "otherwise":
            return True
        if self.lo is not None and n < self.lo:
            return False
        if self.hi is not None and n > self.hi:
            return False
        return True

    def __str__(self):
        return {
            "ge": lambda: f"n>={self.lo}",
            "le": lambda: f"n<={self.hi}",
            "eq": lambda: f"n=={self.lo}",
            "range": lambda: f"{self.lo}<=n<={self.hi}",
            "otherwise": lambda: "otherwise",
        }[self.kind]()


@dataclass
class SequenceSpec:
    """Piecewise sequence; the first matching piece is used.

    With ``default_zero`` set, indices matched by no piece evaluate to 0.
    Instances are callable and cache their values.
    """

    pieces: Sequence[tuple[PieceCondition, Expr]]
    default_zero: bool = False
    name: str = ""
    _compiled: list = field(default_factory=list, init=False, repr=False, compare=False)
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.pieces = tuple(self.pieces)
        for k, (cond, _) in enumerate(self.pieces):
            if cond.kind == "otherwise" and k != len(self.pieces) - 1:
                raise ExprSyntaxError("otherwise", 0, {"'otherwise' only as the final piece"})
        self._compiled = [(c, compile_expr(e), to_source(e)) for c, e in self.pieces]

    @classmethod
    def from_pieces(cls, pieces, default_zero=False, name=""):
        """Build from ``[(condition_text, expression_text), ...]`` or dicts
        with keys ``where`` and ``expr``."""
        parsed = []
        for piece in pieces:
            if isinstance(piece, dict):
                where, expr = piece["where"], piece["expr"]
            else:
                where, expr = piece
            parsed.append((PieceCondition.parse(where), parse_expression(str(expr))))
        return cls(parsed, default_zero, name)

    @classmethod
    def constant(cls, value, name=""):
        return cls([(PieceCondition("otherwise"), Num(float(value)))], name=name)

    def __call__(self, n: int) -> float:
        return eval_sequence(self, n)

    def to_json(self):
        return [{"where": str(c), "expr": to_source(e)} for c, e in self.pieces]


def eval_sequence(spec: SequenceSpec, n: int) -> float:
    """Value of the first matching piece at n."""
    n = int(n)
    v = spec._cache.get(n)
    if v is not None:
        return v
    for cond, fn, label in spec._compiled:
        if cond.matches(n):
            try:
                v = _safe_eval(fn, n, label)
            except NonFiniteValue as exc:
                raise NonFiniteValue(n, str(exc), spec.name) from None
            break
    else:
        if not spec.default_zero:
            raise NoMatchingPiece(n, spec.name)
        v = 0.0
    spec._cache[n] = v
    return v


# ------------------------------------------------------------- validation

@dataclass
class ValidationReport:
    window: tuple
    r: float
    R: float
    r_estimate: RootLimit
    inv_R_estimate: RootLimit
    assumption2: str                     # "degenerate", "diverges", "inconclusive"
    assumption2_evidence: list
    degenerate_annulus: bool = False
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return True   # failures raise instead

    def to_dict(self):
        return {
            "window": list(self.window),
            "r": self.r,
            "R": self.R,
            "r_raw": self.r_estimate.raw,
            "R_raw": (1.0 / self.inv_R_estimate.raw) if self.inv_R_estimate.raw > 0 else None,
            "radius_method": [self.r_estimate.method, self.inv_R_estimate.method],
            "r_tail": [list(t) for t in self.r_estimate.tail],
            "inv_R_tail": [list(t) for t in self.inv_R_estimate.tail],
            "assumption2": self.assumption2,
            "assumption2_partial_sups": self.assumption2_evidence,
            "degenerate_annulus": self.degenerate_annulus,
            "notes": list(self.notes),
        }


def validate_config(a, b, w, window, basis_variant=BasisVariant.SPLIT,
                    radius_tol: float = 1e-6) -> ValidationReport:
    """Check the standing assumptions on a window and estimate the radii.

    ``a``, ``b`` and ``w`` are callables (usually :class:`SequenceSpec`).
    """
    lo, hi = (int(x) for x in window)
    if not lo <= hi:
        raise ValueError("empty window")
    split = BasisVariant(basis_variant) is BasisVariant.SPLIT

    def b_eff(n):
        return 0.0 if (split and n <= -1) else b(n)

    for n in range(lo, hi + 1):
        if a(n) == 0.0:
            raise ZeroA(n)
        b_eff(n)
        w(n)

    # assumption (2): sup over n <= -1 of |a_{n+1}...a_0 / (b_n...b_{-1})|
    evidence = []
    negs = list(range(-1, lo - 1, -1))
    if any(b_eff(n) == 0.0 for n in negs):
        status = "degenerate"
    else:
        running, best = 0.0, -math.inf
        for n in negs:
            running += math.log(abs(a(n + 1))) - math.log(abs(b_eff(n)))
            best = max(best, running)
            evidence.append([n, best])
        status = "diverges" if best > math.log(1e9) and evidence[-1][1] == best else "inconclusive"

    r_est = root_limit(lambda k: abs(a(-k)) + abs(b_eff(-k)), -lo) if lo < 0 else None
    inv_R = root_limit(lambda k: abs(a(k)) + abs(b_eff(k)), hi) if hi > 0 else None
    r = r_est.value
    R = 1.0 / inv_R.value if inv_R.value > 0 else math.inf
    notes = []
    degenerate = False
    if r > R * (1.0 + radius_tol) + radius_tol:
        raise RadiiCollapse(r, R)
    if abs(r - R) <= radius_tol * max(1.0, R):
        degenerate = True
        notes.append("r and R coincide within tolerance: the annulus is degenerate")
    for est, label in ((r_est, "r"), (inv_R, "1/R")):
        if est.method == "raw":
            notes.append(f"{label} extrapolation did not fit the tail; raw top-quartile estimate used")
    return ValidationReport((lo, hi), r, R, r_est, inv_R, status, evidence, degenerate, notes)
