"""Phase-space observables and the small expression language describing them.

Grammar (whitespace is free between tokens)::

    expression ::= ['+'|'-'] term (('+'|'-') term)*
    term       ::= factor ('*' factor)*
    factor     ::= atom ('^' integer)?
    atom       ::= 'x' | 'xi' | number | 'exp' '(' expression ')'
                 | '(' expression ')'

Numbers are nonnegative decimal literals (integer, decimal point, optional
exponent); negative constants are written with the leading sign of the
enclosing expression, as in ``exp(-x^2 - xi^2)``.

Parsing produces a small AST.  Observables know their routing class:

* ``position_only``  -- no use of ``xi`` (constants included);
* ``momentum_only``  -- no use of ``x``;
* ``split``          -- a sum of pure-x and pure-xi terms;
* ``general``        -- anything else.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ObservableExpr",
    "ObservableParseError",
    "Observable",
    "parse_observable",
    "tokenize",
]


class ObservableParseError(ValueError):
    """Syntax error with the offset of the offending token."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = expected
        hint = f" (expected {' or '.join(expected)})" if expected else ""
        super().__init__(f"{message} at offset {offset}{hint}")


# ---------------------------------------------------------------------------
# AST


class ObservableExpr:
    """Base class for expression nodes."""

    def eval(self, x, xi):
        raise NotImplementedError

    def eval_scalar(self, x: float, xi: float) -> float:
        """Reference evaluator: plain Python recursion, no numpy."""
        raise NotImplementedError

    def variables(self) -> frozenset:
        raise NotImplementedError

    def to_string(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_string()!r})"

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash((type(self).__name__, self._key()))

    def _key(self):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Const(ObservableExpr):
    value: float

    def eval(self, x, xi):
        return np.full(np.broadcast(np.asarray(x), np.asarray(xi)).shape, self.value)

    def eval_scalar(self, x, xi):
        return self.value

    def variables(self):
        return frozenset()

    def to_string(self):
        return format(self.value, ".17g")

    def _key(self):
        return (self.value,)


@dataclass(frozen=True, eq=False)
class Var(ObservableExpr):
    name: str  # "x" or "xi"

    def eval(self, x, xi):
        v = np.asarray(x if self.name == "x" else xi, dtype=float)
        return np.broadcast_to(v, np.broadcast(np.asarray(x), np.asarray(xi)).shape)

    def eval_scalar(self, x, xi):
        return float(x if self.name == "x" else xi)

    def variables(self):
        return frozenset((self.name,))

    def to_string(self):
        return self.name

    def _key(self):
        return (self.name,)


@dataclass(frozen=True, eq=False)
class Sum(ObservableExpr):
    # (sign, term) pairs; sign is +1.0 or -1.0
    terms: tuple[tuple[float, ObservableExpr], ...]

    def eval(self, x, xi):
        out = None
        for s, t in self.terms:
            v = s * np.asarray(t.eval(x, xi))
            out = v if out is None else out + v
        return out

    def eval_scalar(self, x, xi):
        return sum(s * t.eval_scalar(x, xi) for s, t in self.terms)

    def variables(self):
        return frozenset().union(*(t.variables() for _, t in self.terms))

    def to_string(self):
        parts = []
        for i, (s, t) in enumerate(self.terms):
            if i == 0:
                parts.append(("-" if s < 0 else "") + t.to_string())
            else:
                parts.append((" - " if s < 0 else " + ") + t.to_string())
        return "".join(parts)

    def _key(self):
        return self.terms


@dataclass(frozen=True, eq=False)
class Prod(ObservableExpr):
    factors: tuple[ObservableExpr, ...]

    def eval(self, x, xi):
        out = None
        for f in self.factors:
            v = np.asarray(f.eval(x, xi))
            out = v if out is None else out * v
        return out

    def eval_scalar(self, x, xi):
        out = 1.0
        for f in self.factors:
            out *= f.eval_scalar(x, xi)
        return out

    def variables(self):
        return frozenset().union(*(f.variables() for f in self.factors))

    def to_string(self):
        parts = []
        for f in self.factors:
            s = f.to_string()
            if isinstance(f, Sum):
                s = f"({s})"
            parts.append(s)
        return " * ".join(parts)

    def _key(self):
        return self.factors


@dataclass(frozen=True, eq=False)
class Pow(ObservableExpr):
    base: ObservableExpr
    exponent: int

    def eval(self, x, xi):
        return np.asarray(self.base.eval(x, xi)) ** self.exponent

    def eval_scalar(self, x, xi):
        return self.base.eval_scalar(x, xi) ** self.exponent

    def variables(self):
        return self.base.variables()

    def to_string(self):
        s = self.base.to_string()
        if isinstance(self.base, (Sum, Prod, Pow)):
            s = f"({s})"
        return f"{s}^{self.exponent}"

    def _key(self):
        return (self.base, self.exponent)


@dataclass(frozen=True, eq=False)
class Exp(ObservableExpr):
    arg: ObservableExpr

    def eval(self, x, xi):
        return np.exp(self.arg.eval(x, xi))

    def eval_scalar(self, x, xi):
        import math

        return math.exp(self.arg.eval_scalar(x, xi))

    def variables(self):
        return self.arg.variables()

    def to_string(self):
        return f"exp({self.arg.to_string()})"

    def _key(self):
        return (self.arg,)


@dataclass(frozen=True, eq=False)
class Group(ObservableExpr):
    """Explicit parentheses, kept so print -> parse round-trips exactly."""

    inner: ObservableExpr

    def eval(self, x, xi):
        return self.inner.eval(x, xi)

    def eval_scalar(self, x, xi):
        return self.inner.eval_scalar(x, xi)

    def variables(self):
        return self.inner.variables()

    def to_string(self):
        return f"({self.inner.to_string()})"

    def _key(self):
        return (self.inner,)


# ---------------------------------------------------------------------------
# Tokenizer / parser


_TOKEN_NAMES = {
    "+": "'+'", "-": "'-'", "*": "'*'", "^": "'^'",
    "(": "'('", ")": "')'",
}


def tokenize(text: str) -> list[tuple[str, object, int]]:
    """Split into (kind, value, offset) tokens; kinds: op, num, name, end."""
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "+-*^()":
            tokens.append(("op", c, i))
            i += 1
            continue
        if c.isdigit() or c == ".":
            j = i
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                seen_dot = seen_dot or text[j] == "."
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    k += 1
                    while k < n and text[k].isdigit():
                        k += 1
                    j = k
            try:
                val = float(text[i:j])
            except ValueError:
                raise ObservableParseError("malformed number", i)
            tokens.append(("num", val, i))
            i = j
            continue
        if c.isalpha():
            j = i
            while j < n and text[j].isalpha():
                j += 1
            word = text[i:j]
            if word not in ("x", "xi", "exp"):
                raise ObservableParseError(
                    f"unknown name {word!r}", i, ("x", "xi", "exp", "number"))
            tokens.append(("name", word, i))
            i = j
            continue
        raise ObservableParseError(f"unexpected character {c!r}", i)
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect_op(self, op: str):
        kind, val, off = self.peek()
        if kind != "op" or val != op:
            raise ObservableParseError(
                f"unexpected {self._describe()}", off, (_TOKEN_NAMES[op],))
        return self.advance()

    def _describe(self):
        kind, val, _ = self.peek()
        if kind == "end":
            return "end of input"
        if kind == "op":
            return f"token {val!r}"
        return f"{kind} {val!r}"

    def parse(self) -> ObservableExpr:
        e = self.expression()
        kind, _, off = self.peek()
        if kind != "end":
            raise ObservableParseError(f"unexpected {self._describe()}", off,
                                       ("'+'", "'-'", "'*'", "end of input"))
        return e

    def expression(self) -> ObservableExpr:
        terms = []
        sign = 1.0
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.advance()
            sign = -1.0 if val == "-" else 1.0
        terms.append((sign, self.term()))
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                terms.append((-1.0 if val == "-" else 1.0, self.term()))
            else:
                break
        if len(terms) == 1 and terms[0][0] > 0:
            return terms[0][1]
        return Sum(tuple(terms))

    def term(self) -> ObservableExpr:
        factors = [self.factor()]
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.advance()
                factors.append(self.factor())
            else:
                break
        if len(factors) == 1:
            return factors[0]
        return Prod(tuple(factors))

    def factor(self) -> ObservableExpr:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            kind, val, off = self.peek()
            if kind != "num" or float(val) != int(val):
                raise ObservableParseError(
                    f"unexpected {self._describe()}", off, ("integer",))
            self.advance()
            return Pow(base, int(val))
        return base

    def atom(self) -> ObservableExpr:
        kind, val, off = self.peek()
        if kind == "num":
            self.advance()
            return Const(float(val))
        if kind == "name":
            self.advance()
            if val in ("x", "xi"):
                return Var(val)
            self.expect_op("(")
            inner = self.expression()
            self.expect_op(")")
            return Exp(inner)
        if kind == "op" and val == "(":
            self.advance()
            inner = self.expression()
            self.expect_op(")")
            return Group(inner)
        raise ObservableParseError(
            f"unexpected {self._describe()}", off,
            ("'x'", "'xi'", "number", "'exp'", "'('"))


def _routing(expr: ObservableExpr) -> str:
    vars_ = expr.variables()
    if "xi" not in vars_:
        return "position_only"
    if "x" not in vars_:
        return "momentum_only"
    terms = expr.terms if isinstance(expr, Sum) else ((1.0, expr),)
    if all(len(t.variables()) <= 1 for _, t in terms):
        return "split"
    return "general"


@dataclass(frozen=True)
class Observable:
    """A parsed observable with routing metadata and an identity string."""

    expr: ObservableExpr
    source: str
    routing: str

    @property
    def id(self) -> str:
        return self.expr.to_string()

    def __call__(self, x, xi):
        return self.expr.eval(x, xi)

    def variables(self) -> frozenset:
        return self.expr.variables()

    def split_parts(self) -> tuple[ObservableExpr | None, ObservableExpr | None]:
        """(pure-x part, pure-xi part); only valid for split routing.

        Constant terms are attached to the position part.
        """
        if self.routing == "position_only":
            return self.expr, None
        if self.routing == "momentum_only":
            return None, self.expr
        if self.routing != "split":
            raise ValueError("observable does not split")
        xs: list[tuple[float, ObservableExpr]] = []
        xis: list[tuple[float, ObservableExpr]] = []
        terms = self.expr.terms if isinstance(self.expr, Sum) else ((1.0, self.expr),)
        for s, t in terms:
            (xis if "xi" in t.variables() else xs).append((s, t))

        def pack(ts):
            if not ts:
                return None
            if len(ts) == 1 and ts[0][0] > 0:
                return ts[0][1]
            return Sum(tuple(ts))

        return pack(xs), pack(xis)

    def bound_on(self, box: tuple[float, float, float, float], samples: int = 513) -> float:
        """Sampled sup of |a| on a phase-space box (boundedness certificate).

        An odd node count keeps the box center on the lattice.
        """
        x = np.linspace(box[0], box[1], samples)
        xi = np.linspace(box[2], box[3], samples)
        vals = self.expr.eval(x[:, None], xi[None, :])
        return float(np.max(np.abs(vals)))


def parse_observable(text: str) -> Observable:
    """Parse the expression language into an Observable.

    Raises ObservableParseError with the offset of the first offending token
    and the token classes that would have been accepted there.
    """
    expr = _Parser(text).parse()
    return Observable(expr=expr, source=text, routing=_routing(expr))
