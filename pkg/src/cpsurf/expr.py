"""Closed-form complex expressions in the Wirtinger pair (xi, xibar).

An Expression is a small immutable AST over complex constants, the two
independent variables ``xi`` and ``xibar``, named parameters, the elementary
functions exp/ln/sinh/cosh/tanh/sech/sqrt/sin/cos, and the arithmetic
operators ``+ - * / ^`` (``^`` is right-associative, implicit multiplication
is not allowed).  The two variables are treated as algebraically independent,
so differentiation is Wirtinger differentiation:

    d(xibar)/d(xi) = 0        d(xi)/d(xibar) = 0

Grammar (EBNF, also documented in the README):

    expr    = term , { ("+" | "-") , term } ;
    term    = unary , { ("*" | "/") , unary } ;
    unary   = "-" , unary | power ;
    power   = atom , [ "^" , unary ] ;
    atom    = NUMBER | "i" | "xi" | "xibar"
            | IDENT , "(" , expr , ")"        (* known function call *)
            | IDENT                           (* named parameter *)
            | "(" , expr , ")" ;

Powers with non-integer exponents use the principal branch exp(c*ln u);
crossing the cut on the negative real axis is the caller's responsibility.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

__all__ = [
    "Expression",
    "Const",
    "Var",
    "Param",
    "Call",
    "Neg",
    "BinOp",
    "ExpressionError",
    "ExpressionSyntaxError",
    "EvaluationError",
    "UnboundParameterError",
    "EvalPoint",
    "Jet",
    "JET_ORDERS",
    "parse",
    "to_text",
    "differentiate",
    "conjugate_expression",
    "normalize",
    "evaluate",
    "evaluate_jet",
    "JetEvaluator",
    "const",
    "add",
    "sub",
    "mul",
    "div",
    "pow_",
    "call",
    "XI",
    "XIBAR",
    "ZERO",
    "ONE",
]

FUNCTIONS = ("exp", "ln", "sinh", "cosh", "tanh", "sech", "sqrt", "sin", "cos")

VARIABLES = ("xi", "xibar")


class ExpressionError(Exception):
    pass


class ExpressionSyntaxError(ExpressionError):
    """Malformed input text; ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class EvaluationError(ExpressionError):
    """Numeric domain failure; carries the offending subexpression as text."""

    def __init__(self, message: str, subexpression: "Expression"):
        super().__init__(f"{message} in subexpression '{to_text(subexpression)}'")
        self.subexpression = subexpression


class UnboundParameterError(EvaluationError):
    def __init__(self, name: str, subexpression: "Expression"):
        super().__init__(f"parameter '{name}' is not bound", subexpression)
        self.name = name


# --------------------------------------------------------------------------
# AST node types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Expression:
    def __add__(self, other):
        return add(self, _as_expr(other))

    def __radd__(self, other):
        return add(_as_expr(other), self)

    def __sub__(self, other):
        return sub(self, _as_expr(other))

    def __rsub__(self, other):
        return sub(_as_expr(other), self)

    def __mul__(self, other):
        return mul(self, _as_expr(other))

    def __rmul__(self, other):
        return mul(_as_expr(other), self)

    def __truediv__(self, other):
        return div(self, _as_expr(other))

    def __rtruediv__(self, other):
        return div(_as_expr(other), self)

    def __pow__(self, other):
        return pow_(self, _as_expr(other))

    def __neg__(self):
        return neg(self)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Const(Expression):
    value: complex


@dataclass(frozen=True)
class Var(Expression):
    name: str  # "xi" or "xibar"


@dataclass(frozen=True)
class Param(Expression):
    name: str


@dataclass(frozen=True)
class Call(Expression):
    fn: str
    arg: Expression


@dataclass(frozen=True)
class Neg(Expression):
    arg: Expression


@dataclass(frozen=True)
class BinOp(Expression):
    op: str  # one of + - * / ^
    lhs: Expression
    rhs: Expression


ZERO = Const(0j)
ONE = Const(1 + 0j)
XI = Var("xi")
XIBAR = Var("xibar")


def _as_expr(x) -> Expression:
    if isinstance(x, Expression):
        return x
    if isinstance(x, (int, float, complex)):
        return const(x)
    raise TypeError(f"cannot coerce {x!r} to Expression")


def const(value) -> Expression:
    return Const(complex(value))


def _is_const(e: Expression, value=None) -> bool:
    if not isinstance(e, Const):
        return False
    return value is None or e.value == value


# Smart constructors fold literal zeros/ones (and constant pairs); anything
# beyond that is deliberately left untouched -- there is no simplifier.

def add(a: Expression, b: Expression) -> Expression:
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    return BinOp("+", a, b)


def sub(a: Expression, b: Expression) -> Expression:
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return neg(b)
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    return BinOp("-", a, b)


def mul(a: Expression, b: Expression) -> Expression:
    if _is_const(a, 0) or _is_const(b, 0):
        return ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    return BinOp("*", a, b)


def div(a: Expression, b: Expression) -> Expression:
    if _is_const(b, 1):
        return a
    if _is_const(a, 0) and not _is_const(b, 0):
        return ZERO
    return BinOp("/", a, b)


def pow_(a: Expression, b: Expression) -> Expression:
    if _is_const(b, 1):
        return a
    if _is_const(b, 0):
        return ONE
    return BinOp("^", a, b)


def neg(a: Expression) -> Expression:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def call(fn: str, arg: Expression) -> Expression:
    if fn not in FUNCTIONS:
        raise ExpressionError(f"unknown function '{fn}'")
    return Call(fn, arg)


def normalize(e: Expression) -> Expression:
    """Rebuild the tree through the folding constructors (0/1 identities and
    literal-constant arithmetic only).  Used for structural comparisons."""
    if isinstance(e, (Const, Var, Param)):
        return e
    if isinstance(e, Neg):
        return neg(normalize(e.arg))
    if isinstance(e, Call):
        return Call(e.fn, normalize(e.arg))
    a, b = normalize(e.lhs), normalize(e.rhs)
    return {"+": add, "-": sub, "*": mul, "/": div, "^": pow_}[e.op](a, b)


# --------------------------------------------------------------------------
# Tokenizer / recursive-descent parser
# --------------------------------------------------------------------------

_OPS = set("+-*/^()")


def _tokenize(text: str):
    tokens = []  # (kind, value, offset)
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _OPS:
            tokens.append(("op", c, i))
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            try:
                value = float(text[i:j])
            except ValueError:
                raise ExpressionSyntaxError(f"bad numeric literal '{text[i:j]}'", i)
            tokens.append(("num", value, i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
            continue
        raise ExpressionSyntaxError(f"unexpected character {c!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, value, offset = self.peek()
        if kind != "op" or value != op:
            raise ExpressionSyntaxError(f"expected '{op}'", offset)
        return self.take()

    def parse(self) -> Expression:
        e = self.expr()
        kind, value, offset = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected trailing input {value!r}", offset)
        return e

    def expr(self) -> Expression:
        e = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.take()
                rhs = self.term()
                e = BinOp(value, e, rhs)
            else:
                return e

    def term(self) -> Expression:
        e = self.unary()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.take()
                rhs = self.unary()
                e = BinOp(value, e, rhs)
            else:
                return e

    def unary(self) -> Expression:
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expression:
        kind, value, offset = self.take()
        if kind == "num":
            return Const(complex(value))
        if kind == "op" and value == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        if kind == "ident":
            if value == "i":
                return Const(1j)
            if value in VARIABLES:
                return Var(value)
            nkind, nvalue, _ = self.peek()
            if nkind == "op" and nvalue == "(":
                if value not in FUNCTIONS:
                    raise ExpressionSyntaxError(f"unknown function '{value}'", offset)
                self.take()
                arg = self.expr()
                self.expect_op(")")
                return Call(value, arg)
            return Param(value)
        raise ExpressionSyntaxError(f"expected a value, found {value!r}", offset)


def parse(text: str) -> Expression:
    """Parse infix text into an Expression tree."""
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# Printing (round-trips through parse to a structurally equal tree)
# --------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 2, "^": 3, "atom": 4}


def _fmt_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _print(e: Expression) -> tuple[str, int]:
    """Return (text, precedence-of-root)."""
    if isinstance(e, Const):
        z = e.value
        if z.imag == 0:
            if z.real < 0:
                return f"-{_fmt_real(-z.real)}", _PREC["neg"]
            return _fmt_real(z.real), _PREC["atom"]
        if z.real == 0:
            if z.imag == 1:
                return "i", _PREC["atom"]
            if z.imag == -1:
                return "-i", _PREC["neg"]
            if z.imag < 0:
                return f"-{_fmt_real(-z.imag)}*i", _PREC["neg"]
            return f"{_fmt_real(z.imag)}*i", _PREC["*"]
        re, im = _fmt_real(abs(z.real)), _fmt_real(abs(z.imag))
        s = f"{'-' if z.real < 0 else ''}{re}{'-' if z.imag < 0 else '+'}{im}*i"
        return f"({s})", _PREC["atom"]
    if isinstance(e, Var):
        return e.name, _PREC["atom"]
    if isinstance(e, Param):
        return e.name, _PREC["atom"]
    if isinstance(e, Call):
        inner, _ = _print(e.arg)
        return f"{e.fn}({inner})", _PREC["atom"]
    if isinstance(e, Neg):
        inner, prec = _print(e.arg)
        if prec < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}", _PREC["neg"]
    op = e.op
    ltext, lprec = _print(e.lhs)
    rtext, rprec = _print(e.rhs)
    prec = _PREC[op]
    # left operand: parenthesize if looser; for '^' the base must be an atom
    if op == "^":
        if lprec < _PREC["atom"]:
            ltext = f"({ltext})"
        if rprec < prec:
            rtext = f"({rtext})"
    else:
        if lprec < prec:
            ltext = f"({ltext})"
        # '-' and '/' are left-associative: the right side needs parens at equal precedence
        if rprec < prec or (rprec == prec and op in "-/") or (op in "*/" and rprec == _PREC["neg"]):
            rtext = f"({rtext})"
    return f"{ltext} {op} {rtext}" if op in "+-" else f"{ltext}{op}{rtext}", prec


def to_text(e: Expression) -> str:
    return _print(e)[0]


# --------------------------------------------------------------------------
# Wirtinger differentiation
# --------------------------------------------------------------------------

def _dcall(fn: str, u: Expression, du: Expression) -> Expression:
    if fn == "exp":
        outer = Call("exp", u)
    elif fn == "ln":
        return div(du, u)
    elif fn == "sinh":
        outer = Call("cosh", u)
    elif fn == "cosh":
        outer = Call("sinh", u)
    elif fn == "tanh":
        outer = pow_(Call("sech", u), const(2))
    elif fn == "sech":
        outer = neg(mul(Call("sech", u), Call("tanh", u)))
    elif fn == "sqrt":
        return div(du, mul(const(2), Call("sqrt", u)))
    elif fn == "sin":
        outer = Call("cos", u)
    elif fn == "cos":
        outer = neg(Call("sin", u))
    else:  # pragma: no cover
        raise ExpressionError(f"no derivative rule for '{fn}'")
    return mul(outer, du)


def differentiate(e: Expression, var: str) -> Expression:
    """Wirtinger partial of ``e`` with respect to ``var`` ('xi' or 'xibar').

    xi and xibar are independent, so the cross-derivatives vanish.  Only
    0/1 constant folding is applied to the result.
    """
    if var not in VARIABLES:
        raise ExpressionError(f"unknown variable '{var}'")
    if isinstance(e, (Const, Param)):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == var else ZERO
    if isinstance(e, Neg):
        return neg(differentiate(e.arg, var))
    if isinstance(e, Call):
        return _dcall(e.fn, e.arg, differentiate(e.arg, var))
    a, b = e.lhs, e.rhs
    da, db = differentiate(a, var), differentiate(b, var)
    if e.op == "+":
        return add(da, db)
    if e.op == "-":
        return sub(da, db)
    if e.op == "*":
        return add(mul(da, b), mul(a, db))
    if e.op == "/":
        return sub(div(da, b), div(mul(a, db), pow_(b, const(2))))
    # power: constant exponent keeps the power-rule form (principal-branch
    # consistent); general exponent goes through exp(v ln u)
    if isinstance(b, Const):
        c = b.value
        return mul(mul(b, pow_(a, Const(c - 1))), da)
    dv_lnu = mul(db, Call("ln", a))
    v_du_u = div(mul(b, da), a)
    return mul(pow_(a, b), add(dv_lnu, v_du_u))


def conjugate_expression(e: Expression) -> Expression:
    """Formal conjugate field: swaps xi <-> xibar, conjugates constants and
    toggles each parameter with its '_bar' partner.  Pointwise, evaluating the
    result equals the complex conjugate of evaluating ``e`` (principal-branch
    functions off their cuts)."""
    if isinstance(e, Const):
        return Const(e.value.conjugate())
    if isinstance(e, Var):
        return XIBAR if e.name == "xi" else XI
    if isinstance(e, Param):
        name = e.name
        if name.endswith("_bar"):
            return Param(name[:-4])
        return Param(name + "_bar")
    if isinstance(e, Neg):
        return Neg(conjugate_expression(e.arg))
    if isinstance(e, Call):
        return Call(e.fn, conjugate_expression(e.arg))
    return BinOp(e.op, conjugate_expression(e.lhs), conjugate_expression(e.rhs))


# --------------------------------------------------------------------------
# Evaluation and jets
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EvalPoint:
    """Evaluation site: xibar is always the complex conjugate of xi."""

    xi: complex
    params: dict | None = None

    @property
    def xibar(self) -> complex:
        return self.xi.conjugate()


_INT_EXP_LIMIT = 128


def _eval_pow(base: complex, expo: complex, node: Expression) -> complex:
    r = expo.real
    if expo.imag == 0 and r == int(r) and abs(r) <= _INT_EXP_LIMIT:
        n = int(r)
        if base == 0 and n < 0:
            raise EvaluationError("zero raised to a negative power", node)
        return base ** n
    if base == 0:
        if r > 0:
            return 0j
        raise EvaluationError("zero base with non-positive exponent", node)
    return cmath.exp(expo * cmath.log(base))


_FUNC_EVAL = {
    "exp": cmath.exp,
    "sinh": cmath.sinh,
    "cosh": cmath.cosh,
    "tanh": cmath.tanh,
    "sech": lambda z: 1.0 / cmath.cosh(z),
    "sqrt": cmath.sqrt,
    "sin": cmath.sin,
    "cos": cmath.cos,
}


def evaluate(e: Expression, point: EvalPoint) -> complex:
    """Evaluate at (xi, conj(xi)) with the point's parameter bindings."""
    params = point.params or {}
    return _evaluate(e, point.xi, point.xibar, params)


def _evaluate(e: Expression, xi: complex, xibar: complex, params: dict) -> complex:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return xi if e.name == "xi" else xibar
    if isinstance(e, Param):
        try:
            return complex(params[e.name])
        except KeyError:
            raise UnboundParameterError(e.name, e) from None
    if isinstance(e, Neg):
        return -_evaluate(e.arg, xi, xibar, params)
    if isinstance(e, Call):
        u = _evaluate(e.arg, xi, xibar, params)
        if e.fn == "ln":
            if u == 0:
                raise EvaluationError("ln of zero", e)
            return cmath.log(u)
        try:
            return _FUNC_EVAL[e.fn](u)
        except (OverflowError, ValueError) as exc:
            raise EvaluationError(f"{e.fn} failed: {exc}", e) from None
    a = _evaluate(e.lhs, xi, xibar, params)
    b = _evaluate(e.rhs, xi, xibar, params)
    op = e.op
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if b == 0:
            raise EvaluationError("division by zero", e)
        return a / b
    try:
        return _eval_pow(a, b, e)
    except OverflowError:
        raise EvaluationError("power overflow", e) from None


def jet_orders(order: int) -> tuple[tuple[int, int], ...]:
    """All Wirtinger multi-indices (a, b) with a + b <= order."""
    return tuple((a, b) for total in range(order + 1) for a in range(total, -1, -1) for b in (total - a,))


JET_ORDERS = {k: jet_orders(k) for k in range(5)}


@dataclass(frozen=True)
class Jet:
    """Value plus Wirtinger partials d^a dbar^b up to a + b <= order."""

    order: int
    entries: dict  # (a, b) -> complex

    @property
    def value(self) -> complex:
        return self.entries[(0, 0)]

    def d(self, a: int, b: int) -> complex:
        return self.entries[(a, b)]


class JetEvaluator:
    """Evaluates one expression together with its derivative tower.

    Derivative trees are built symbolically once per (a, b) and memoized; the
    canonical build order (xibar first, then xi) is immaterial because mixed
    Wirtinger partials commute.
    """

    def __init__(self, e: Expression, max_order: int = 3):
        self.expression = e
        self.max_order = max_order
        self._trees = {(0, 0): e}

    def tree(self, a: int, b: int) -> Expression:
        key = (a, b)
        if key not in self._trees:
            if a > 0:
                self._trees[key] = differentiate(self.tree(a - 1, b), "xi")
            else:
                self._trees[key] = differentiate(self.tree(0, b - 1), "xibar")
        return self._trees[key]

    def evaluate(self, point: EvalPoint, order: int) -> Jet:
        if order > self.max_order:
            raise ExpressionError(f"jet order {order} exceeds maximum {self.max_order}")
        params = point.params or {}
        xi, xibar = point.xi, point.xibar
        entries = {}
        for a, b in jet_orders(order):
            entries[(a, b)] = _evaluate(self.tree(a, b), xi, xibar, params)
        return Jet(order, entries)


def evaluate_jet(e: Expression, point: EvalPoint, order: int) -> Jet:
    """One-shot jet evaluation (order <= 3); see JetEvaluator for reuse."""
    if not 0 <= order <= 3:
        raise ExpressionError(f"jet order must be in 0..3, got {order}")
    return JetEvaluator(e, order).evaluate(point, order)
