"""A small expression language for multivariate fractional calculus.

Grammar (EBNF; whitespace insignificant, ``#`` starts nothing — comments are
handled by the config layer, not here)::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | power
    power    := atom ['^' exponent]
    exponent := ['-'] NUMBER
    atom     := NUMBER | IDENT ['(' expr (',' expr)* ')'] | '(' expr ')'

Precedence, tightest first: power, unary minus, ``* /``, ``+ -``; all binary
operators are left-associative, power is non-associative and its exponent
must be a (possibly negated) numeric literal — fractional calculus on the
monomial fragment needs exponents known at parse time.

Known functions: ``gamma(x)`` and ``ml(alpha, z)`` (one-parameter
Mittag-Leffler). Variables are arbitrary identifiers; the geometry layers use
``x1..xn`` for base coordinates and ``y<i>_<a>`` for the order-``a`` fibre
coordinate of axis ``i``.

The *monomial fragment* is the set of expressions that normalize to sums
``sum_k c_k * prod_v v^(p_kv) * (opaque factors)``; fractional partial
derivatives are exact there, with coefficients tracked as
:class:`~fracosc.gammaledger.GammaProduct` so telescoped gamma ratios cancel
structurally (bitwise) rather than merely to rounding.

The fractional partial derivative along ``var`` follows the reviewed
power-rule convention: terms free of ``var`` are annihilated, exponents in
(0, alpha) are inadmissible (DomainError), and ``v^alpha -> Gamma(1+alpha)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Union

from .errors import DomainError, EvalError, ParseError
from .gammaledger import GammaProduct
from .specfun import gamma as _gamma_fn
from .specfun import mittag_leffler as _ml_fn

__all__ = [
    "Expr", "Num", "Var", "Call", "Neg", "Add", "Sub", "Mul", "Div", "Pow",
    "parse", "to_str", "evaluate", "free_vars", "simplify",
    "Term", "normalize_terms", "terms_to_expr", "normal_form",
    "term_frac_partial", "frac_partial", "classical_partial",
    "frac_partial_at", "is_monomial_in",
]

# --------------------------------------------------------------------- AST --


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Div:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: float


Expr = Union[Num, Var, Call, Neg, Add, Sub, Mul, Div, Pow]

_FUNCTION_ARITY = {"gamma": 1, "ml": 2}

# --------------------------------------------------------------- tokenizer --

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number | ident | op | eof
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        lexeme = m.group(0)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str) -> _Token:
        tok = self.next()
        if tok.kind != "op" or tok.text != op:
            raise ParseError(f"expected {op!r}, found {tok.text or 'end of input'!r}",
                             tok.line, tok.col)
        return tok

    def at_op(self, *ops: str) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text in ops

    # grammar rules ----------------------------------------------------------

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while self.at_op("+", "-"):
            op = self.next().text
            rhs = self.parse_term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def parse_term(self) -> Expr:
        node = self.parse_unary()
        while self.at_op("*", "/"):
            op = self.next().text
            rhs = self.parse_unary()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def parse_unary(self) -> Expr:
        if self.at_op("-"):
            self.next()
            return Neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        if self.at_op("^"):
            self.next()
            sign = 1.0
            if self.at_op("-"):
                self.next()
                sign = -1.0
            tok = self.next()
            if tok.kind != "number":
                raise ParseError("power exponent must be a numeric literal",
                                 tok.line, tok.col)
            return Pow(base, sign * float(tok.text))
        return base

    def parse_atom(self) -> Expr:
        tok = self.next()
        if tok.kind == "number":
            return Num(float(tok.text))
        if tok.kind == "ident":
            if self.at_op("("):
                if tok.text not in _FUNCTION_ARITY:
                    raise ParseError(f"unknown function {tok.text!r}", tok.line, tok.col)
                self.next()
                args = [self.parse_expr()]
                while self.at_op(","):
                    self.next()
                    args.append(self.parse_expr())
                self.expect_op(")")
                arity = _FUNCTION_ARITY[tok.text]
                if len(args) != arity:
                    raise ParseError(
                        f"{tok.text} takes {arity} argument(s), got {len(args)}",
                        tok.line, tok.col)
                return Call(tok.text, tuple(args))
            return Var(tok.text)
        if tok.kind == "op" and tok.text == "(":
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        raise ParseError(f"unexpected token {tok.text or 'end of input'!r}",
                         tok.line, tok.col)


def parse(text: str) -> Expr:
    """Parse ``text`` into an Expr; raises ParseError with line/col."""
    p = _Parser(text)
    node = p.parse_expr()
    tok = p.peek()
    if tok.kind != "eof":
        raise ParseError(f"trailing input starting at {tok.text!r}", tok.line, tok.col)
    return node

# ----------------------------------------------------------------- printing --


def _fmt_num(v: float) -> str:
    # repr round-trips; integer-valued floats get a stable short form
    if v == int(v) and abs(v) < 1e16:
        return f"{int(v)}.0"
    return repr(v)


def _prec(e: Expr) -> int:
    if isinstance(e, (Add, Sub)):
        return 1
    if isinstance(e, (Mul, Div)):
        return 2
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Pow):
        return 4
    return 5  # atoms


def _paren(child: Expr, parent_prec: int, strict: bool = False) -> str:
    s = to_str(child)
    cp = _prec(child)
    if cp < parent_prec or (strict and cp == parent_prec):
        return f"({s})"
    return s


def to_str(e: Expr) -> str:
    """Canonical text form; ``parse(to_str(e))`` reproduces the same tree
    shape up to constant-sign normalization, and printing is idempotent."""
    if isinstance(e, Num):
        if e.value < 0 or (e.value == 0 and math.copysign(1, e.value) < 0):
            return f"-{_fmt_num(-e.value)}"
        return _fmt_num(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.fn}({', '.join(to_str(a) for a in e.args)})"
    if isinstance(e, Neg):
        return f"-{_paren(e.arg, 3)}"
    if isinstance(e, Add):
        return f"{_paren(e.left, 1)} + {_paren(e.right, 1, strict=True)}"
    if isinstance(e, Sub):
        return f"{_paren(e.left, 1)} - {_paren(e.right, 1, strict=True)}"
    if isinstance(e, Mul):
        return f"{_paren(e.left, 2)}*{_paren(e.right, 2, strict=True)}"
    if isinstance(e, Div):
        return f"{_paren(e.left, 2)}/{_paren(e.right, 2, strict=True)}"
    if isinstance(e, Pow):
        exp = _fmt_num(e.exponent) if e.exponent >= 0 else f"-{_fmt_num(-e.exponent)}"
        return f"{_paren(e.base, 4, strict=True)}^{exp}"
    raise TypeError(f"not an Expr: {e!r}")

# --------------------------------------------------------------- evaluation --


def evaluate(e: Expr, env: dict[str, float]) -> float:
    """Evaluate at a point. Unknown variables and arithmetic domain failures
    raise EvalError; gamma poles surface as DomainError."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        try:
            return float(env[e.name])
        except KeyError:
            raise EvalError(f"unbound variable {e.name!r}") from None
    if isinstance(e, Call):
        vals = [evaluate(a, env) for a in e.args]
        if e.fn == "gamma":
            return _gamma_fn(vals[0])
        if e.fn == "ml":
            return _ml_fn(vals[0], vals[1])
        raise EvalError(f"unknown function {e.fn!r}")
    if isinstance(e, Neg):
        return -evaluate(e.arg, env)
    if isinstance(e, Add):
        return evaluate(e.left, env) + evaluate(e.right, env)
    if isinstance(e, Sub):
        return evaluate(e.left, env) - evaluate(e.right, env)
    if isinstance(e, Mul):
        return evaluate(e.left, env) * evaluate(e.right, env)
    if isinstance(e, Div):
        denom = evaluate(e.right, env)
        if denom == 0.0:
            raise EvalError("division by zero")
        return evaluate(e.left, env) / denom
    if isinstance(e, Pow):
        base = evaluate(e.base, env)
        return _pow_value(base, e.exponent)
    raise TypeError(f"not an Expr: {e!r}")


def _pow_value(base: float, p: float) -> float:
    if base == 0.0:
        if p > 0:
            return 0.0
        if p == 0:
            return 1.0
        raise EvalError("0 raised to a negative power")
    if base < 0.0 and p != int(p):
        raise EvalError(f"negative base {base} with non-integer exponent {p}")
    try:
        return base**p
    except OverflowError:
        raise EvalError(f"overflow computing {base}^{p}") from None


def free_vars(e: Expr) -> frozenset[str]:
    if isinstance(e, Num):
        return frozenset()
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Call):
        out: frozenset[str] = frozenset()
        for a in e.args:
            out |= free_vars(a)
        return out
    if isinstance(e, Neg):
        return free_vars(e.arg)
    if isinstance(e, Pow):
        return free_vars(e.base)
    return free_vars(e.left) | free_vars(e.right)

# ---------------------------------------------------------------- simplify --


def simplify(e: Expr) -> Expr:
    """Cheap structural cleanup: constant folding and 0/1 identities.
    gamma/ml calls are *not* folded (the term layer keeps them exact)."""
    if isinstance(e, (Num, Var)):
        return e
    if isinstance(e, Call):
        return Call(e.fn, tuple(simplify(a) for a in e.args))
    if isinstance(e, Neg):
        a = simplify(e.arg)
        if isinstance(a, Num):
            return Num(-a.value)
        if isinstance(a, Neg):
            return a.arg
        return Neg(a)
    if isinstance(e, Pow):
        b = simplify(e.base)
        if e.exponent == 0.0:
            return Num(1.0)
        if e.exponent == 1.0:
            return b
        if isinstance(b, Num):
            try:
                return Num(_pow_value(b.value, e.exponent))
            except EvalError:
                return Pow(b, e.exponent)
        return Pow(b, e.exponent)
    a, b = simplify(e.left), simplify(e.right)
    if isinstance(e, Add):
        if isinstance(a, Num) and a.value == 0.0:
            return b
        if isinstance(b, Num) and b.value == 0.0:
            return a
        if isinstance(a, Num) and isinstance(b, Num):
            return Num(a.value + b.value)
        return Add(a, b)
    if isinstance(e, Sub):
        if isinstance(b, Num) and b.value == 0.0:
            return a
        if isinstance(a, Num) and isinstance(b, Num):
            return Num(a.value - b.value)
        if isinstance(a, Num) and a.value == 0.0:
            return simplify(Neg(b))
        return Sub(a, b)
    if isinstance(e, Mul):
        if isinstance(a, Num):
            if a.value == 0.0:
                return Num(0.0)
            if a.value == 1.0:
                return b
        if isinstance(b, Num):
            if b.value == 0.0:
                return Num(0.0)
            if b.value == 1.0:
                return a
        if isinstance(a, Num) and isinstance(b, Num):
            return Num(a.value * b.value)
        return Mul(a, b)
    if isinstance(e, Div):
        if isinstance(b, Num) and b.value == 1.0:
            return a
        if isinstance(a, Num) and a.value == 0.0 and not (
            isinstance(b, Num) and b.value == 0.0
        ):
            return Num(0.0)
        if isinstance(a, Num) and isinstance(b, Num) and b.value != 0.0:
            return Num(a.value / b.value)
        return Div(a, b)
    raise TypeError(f"not an Expr: {e!r}")

# -------------------------------------------------------- monomial fragment --


@dataclass(frozen=True)
class Term:
    """One monomial:  coeff * prod(var^power) * prod(opaque_factor^power).

    ``powers`` maps variable names to real exponents (sorted tuple of pairs);
    ``others`` holds non-decomposable factors (calls with variable arguments,
    powers of sums, ...) keyed canonically by their printed form.
    """

    coeff: GammaProduct
    powers: tuple[tuple[str, float], ...] = ()
    others: tuple[tuple[Expr, float], ...] = ()

    def power_of(self, var: str) -> float:
        for name, p in self.powers:
            if name == var:
                return p
        return 0.0

    def collection_key(self):
        return (self.powers, tuple((to_str(f), p) for f, p in self.others))


def _term_one() -> Term:
    return Term(GammaProduct.of(1.0))


def _term_mul(a: Term, b: Term) -> Term:
    powers: dict[str, float] = dict(a.powers)
    for name, p in b.powers:
        powers[name] = powers.get(name, 0.0) + p
    others: dict[str, tuple[Expr, float]] = {to_str(f): (f, p) for f, p in a.others}
    for f, p in b.others:
        key = to_str(f)
        if key in others:
            others[key] = (others[key][0], others[key][1] + p)
        else:
            others[key] = (f, p)
    return Term(
        a.coeff.times(b.coeff),
        tuple(sorted((n, p) for n, p in powers.items() if p != 0.0)),
        tuple(sorted(((f, p) for f, p in others.values() if p != 0.0),
                     key=lambda fp: (to_str(fp[0]), fp[1]))),
    )


def _term_pow(t: Term, p: float) -> Term | None:
    """Raise a single term to a real power; None when that is not sound
    (ledgered gamma content with non-integer power)."""
    if p == int(p) and abs(p) <= 8:
        # exact by repeated multiplication / inversion
        k = int(p)
        if k == 0:
            return _term_one()
        base = t if k > 0 else _term_invert(t)
        if base is None:
            return None
        out = base
        for _ in range(abs(k) - 1):
            out = _term_mul(out, base)
        return out
    if t.coeff.num or t.coeff.den:
        return None
    if t.coeff.factor < 0.0:
        return None
    return Term(
        GammaProduct.of(t.coeff.factor**p),
        tuple((n, q * p) for n, q in t.powers),
        tuple((f, q * p) for f, q in t.others),
    )


def _term_invert(t: Term) -> Term | None:
    if t.coeff.factor == 0.0:
        return None
    inv = GammaProduct(1.0 / t.coeff.factor, t.coeff.den, t.coeff.num)
    return Term(
        inv,
        tuple((n, -p) for n, p in t.powers),
        tuple((f, -p) for f, p in t.others),
    )


def _normalize(e: Expr) -> list[Term]:
    if isinstance(e, Num):
        return [] if e.value == 0.0 else [Term(GammaProduct.of(e.value))]
    if isinstance(e, Var):
        return [Term(GammaProduct.of(1.0), ((e.name, 1.0),))]
    if isinstance(e, Call):
        if e.fn == "gamma" and isinstance(e.args[0], Num):
            return [Term(GammaProduct.of(1.0).times_ratio(e.args[0].value, 1.0))]
        if not free_vars(e):
            return _normalize(Num(evaluate(e, {})))
        return [Term(GammaProduct.of(1.0), (), ((e, 1.0),))]
    if isinstance(e, Neg):
        return [Term(t.coeff.scaled(-1.0), t.powers, t.others) for t in _normalize(e.arg)]
    if isinstance(e, Add):
        return _normalize(e.left) + _normalize(e.right)
    if isinstance(e, Sub):
        return _normalize(e.left) + _normalize(Neg(e.right))
    if isinstance(e, Mul):
        out = []
        right = _normalize(e.right)
        for ta in _normalize(e.left):
            for tb in right:
                out.append(_term_mul(ta, tb))
        return out
    if isinstance(e, Div):
        dens = _normalize(e.right)
        if len(dens) == 1:
            inv = _term_invert(dens[0])
            if inv is not None:
                return [_term_mul(t, inv) for t in _normalize(e.left)]
        opaque = Term(GammaProduct.of(1.0), (), ((simplify(e.right), -1.0),))
        return [_term_mul(t, opaque) for t in _normalize(e.left)]
    if isinstance(e, Pow):
        bases = _normalize(e.base)
        if len(bases) == 1:
            raised = _term_pow(bases[0], e.exponent)
            if raised is not None:
                return [raised]
        elif e.exponent == int(e.exponent) and 0 <= e.exponent <= 8:
            out = [_term_one()]
            for _ in range(int(e.exponent)):
                out = [_term_mul(t, b) for t in out for b in bases]
            return out
        return [Term(GammaProduct.of(1.0), (), ((simplify(e), 1.0),))]
    raise TypeError(f"not an Expr: {e!r}")


def _collect(terms: Iterable[Term]) -> tuple[Term, ...]:
    """Group structurally identical monomials; coefficients with the same
    gamma ledger add exactly (so opposite pairs cancel to true zero)."""
    groups: dict = {}
    for t in terms:
        if t.coeff.is_zero:
            continue
        key = t.collection_key()
        bucket = groups.setdefault(key, [])
        for i, prev in enumerate(bucket):
            if prev.coeff.same_structure(t.coeff):
                bucket[i] = Term(
                    GammaProduct(prev.coeff.factor + t.coeff.factor,
                                 prev.coeff.num, prev.coeff.den),
                    t.powers, t.others)
                break
        else:
            bucket.append(t)
    out = []
    for key in sorted(groups, key=repr):
        for t in groups[key]:
            if not t.coeff.is_zero:
                out.append(t)
    return tuple(out)


def normalize_terms(e: Expr) -> tuple[Term, ...]:
    """Full distribution of ``e`` into collected monomial terms. Total: parts
    that do not decompose become opaque factors inside their term."""
    return _collect(_normalize(e))


def terms_to_expr(terms: Iterable[Term]) -> Expr:
    """Fold a term list back into a deterministic Expr (ledgers folded)."""
    pieces: list[Expr] = []
    for t in terms:
        factors: list[Expr] = []
        c = t.coeff.value()
        if c == 0.0:
            continue
        for name, p in t.powers:
            factors.append(Var(name) if p == 1.0 else Pow(Var(name), p))
        for f, p in t.others:
            factors.append(f if p == 1.0 else Pow(f, p))
        node: Expr = Num(c)
        if factors:
            prod = factors[0]
            for f in factors[1:]:
                prod = Mul(prod, f)
            node = prod if c == 1.0 else Mul(Num(c), prod)
        pieces.append(node)
    if not pieces:
        return Num(0.0)
    out = pieces[0]
    for p in pieces[1:]:
        out = Add(out, p)
    return out


def normal_form(e: Expr) -> Expr:
    """Distribute, collect, cancel, rebuild. Deterministic canonical sum."""
    return terms_to_expr(normalize_terms(e))

# ------------------------------------------------------ fractional partials --

#: exponent snap width shared with the series layer
_EXP_SNAP = 1e-12


def term_frac_partial(t: Term, var: str, alpha: float) -> Term | None:
    """Reviewed fractional partial of a single term along ``var``.

    Returns None when the term is annihilated (no ``var`` content). Raises
    DomainError when ``var`` occurs inside an opaque factor (not in the
    monomial fragment) or carries an inadmissible exponent.
    """
    for f, _ in t.others:
        if var in free_vars(f):
            raise DomainError(
                f"term has non-monomial dependence on {var!r}: {to_str(f)}")
    p = t.power_of(var)
    if p == 0.0:
        return None
    if p < alpha - _EXP_SNAP:
        raise DomainError(
            f"exponent {p} of {var!r} below derivative order {alpha}: inadmissible")
    new_p = p - alpha
    if abs(new_p) < _EXP_SNAP:
        new_p = 0.0
    coeff = t.coeff.times_ratio(1.0 + p, 1.0 + new_p)
    powers = tuple(
        (n, new_p if n == var else q)
        for n, q in t.powers
        if not (n == var and new_p == 0.0)
    )
    return Term(coeff, powers, t.others)


def frac_partial(e: Expr, var: str, alpha: float) -> Expr:
    """Exact fractional partial on the monomial fragment (DomainError off it)."""
    out = []
    for t in normalize_terms(e):
        d = term_frac_partial(t, var, alpha)
        if d is not None:
            out.append(d)
    return terms_to_expr(_collect(out))


def is_monomial_in(e: Expr, var: str) -> bool:
    """True when frac_partial(e, var, .) is available symbolically."""
    try:
        for t in normalize_terms(e):
            for f, _ in t.others:
                if var in free_vars(f):
                    return False
    except DomainError:
        return False
    return True


def frac_partial_at(e: Expr, var: str, alpha: float, env: dict[str, float],
                    h: float = 1e-4) -> float:
    """Fractional partial evaluated at a point.

    Symbolic path when available; otherwise a Grunwald-Letnikov fallback
    along the ``var`` axis from 0 to env[var] with step ~h (the reviewed
    convention is honored by differencing f - f(axis origin))."""
    try:
        return evaluate(frac_partial(e, var, alpha), env)
    except DomainError:
        pass
    from .numeric import gl_derivative  # local import: numeric is expr-free

    T = env[var]
    if T <= 0:
        raise DomainError(f"numeric fractional partial needs {var!r} > 0 at the point")
    n = max(8, int(round(T / h)))
    grid = [T * j / n for j in range(n + 1)]
    vals = []
    scratch = dict(env)
    for s in grid:
        scratch[var] = s
        vals.append(evaluate(e, scratch))
    return float(gl_derivative(vals, alpha, T / n)[-1])

# ------------------------------------------------------- classical partials --


def classical_partial(e: Expr, var: str) -> Expr:
    """Ordinary symbolic partial derivative. Function calls must not contain
    ``var`` (their derivatives are outside this small language)."""
    if isinstance(e, Num):
        return Num(0.0)
    if isinstance(e, Var):
        return Num(1.0 if e.name == var else 0.0)
    if isinstance(e, Call):
        if var in free_vars(e):
            raise DomainError(
                f"classical_partial cannot differentiate through {e.fn}(...) in {var!r}")
        return Num(0.0)
    if isinstance(e, Neg):
        return simplify(Neg(classical_partial(e.arg, var)))
    if isinstance(e, Add):
        return simplify(Add(classical_partial(e.left, var),
                            classical_partial(e.right, var)))
    if isinstance(e, Sub):
        return simplify(Sub(classical_partial(e.left, var),
                            classical_partial(e.right, var)))
    if isinstance(e, Mul):
        return simplify(Add(Mul(classical_partial(e.left, var), e.right),
                            Mul(e.left, classical_partial(e.right, var))))
    if isinstance(e, Div):
        num = Sub(Mul(classical_partial(e.left, var), e.right),
                  Mul(e.left, classical_partial(e.right, var)))
        return simplify(Div(num, Pow(e.right, 2.0)))
    if isinstance(e, Pow):
        inner = classical_partial(e.base, var)
        return simplify(Mul(Mul(Num(e.exponent), Pow(e.base, e.exponent - 1.0)), inner))
    raise TypeError(f"not an Expr: {e!r}")
