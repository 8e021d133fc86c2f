"""Exact rational functions in the coordinates x0..x3.

``Scalar`` is the coefficient ring used everywhere in the package: a reduced
fraction of integer polynomials. Constants are the degenerate case, so the same
type carries both fiberwise (rational) and symbolic (coordinate dependent)
computations.
"""

from __future__ import annotations

import ast
from fractions import Fraction
from numbers import Rational

import flint

VARIABLES = ("x0", "x1", "x2", "x3")
_CTX = flint.fmpz_mpoly_ctx.get(VARIABLES, "lex")
_ONE = _CTX.from_dict({(0, 0, 0, 0): 1})
_ZERO = _CTX.from_dict({})


def _const(n) -> flint.fmpz_mpoly:
    n = int(n)
    return _CTX.from_dict({(0, 0, 0, 0): n}) if n else _ZERO


class Scalar:
    """Immutable element of Q(x0, x1, x2, x3) kept in canonical reduced form.

    Canonical form: numerator and denominator coprime (content included) and the
    leading coefficient of the denominator positive. Equality is therefore
    structural.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, value=0, den=None):
        if isinstance(value, str):
            value = parse_scalar(value)
        if isinstance(value, Scalar):
            num, d = value.num, value.den
        elif isinstance(value, flint.fmpz_mpoly):
            num, d = value, _ONE
        elif isinstance(value, (bool, int, flint.fmpz)):
            num, d = _const(value), _ONE
        elif isinstance(value, (Rational, flint.fmpq)):
            num, d = _const(value.numerator), _const(value.denominator)
        else:
            raise TypeError(f"cannot build Scalar from {type(value).__name__}")
        if den is not None:
            other = Scalar(den)
            if other.num.is_zero():
                raise ZeroDivisionError("Scalar division by zero")
            num = num * other.den
            d = d * other.num
        self.num, self.den = _reduce(num, d)
        self._hash = None

    @classmethod
    def _raw(cls, num, den) -> Scalar:
        obj = object.__new__(cls)
        obj.num, obj.den, obj._hash = num, den, None
        return obj

    @classmethod
    def var(cls, mu: int) -> Scalar:
        return cls._raw(_CTX.gens()[mu], _ONE)

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def to_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        n = int(self.num.leading_coefficient()) if not self.num.is_zero() else 0
        return Fraction(n, int(self.den.leading_coefficient()))

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        if o.num.is_zero():
            return self
        if self.num.is_zero():
            return o
        if self.den.is_one() and o.den.is_one():
            return Scalar._raw(self.num + o.num, _ONE)
        if self.den == o.den:
            return Scalar._raw(*_reduce(self.num + o.num, self.den))
        return Scalar._raw(*_reduce(self.num * o.den + o.num * self.den, self.den * o.den))

    __radd__ = __add__

    def __neg__(self) -> Scalar:
        return Scalar._raw(-self.num, self.den)

    def __sub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        if self.num.is_zero() or o.num.is_zero():
            return ZERO
        if self.den.is_one() and o.den.is_one():
            return Scalar._raw(self.num * o.num, _ONE)
        g1 = self.num.gcd(o.den)
        g2 = o.num.gcd(self.den)
        num = (self.num / g1) * (o.num / g2)
        den = (self.den / g2) * (o.den / g1)
        return Scalar._raw(*_normalize_sign(num, den))

    __rmul__ = __mul__

    def inverse(self) -> Scalar:
        if self.num.is_zero():
            raise ZeroDivisionError("Scalar division by zero")
        return Scalar._raw(*_normalize_sign(self.den, self.num))

    def __truediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int) -> Scalar:
        if n < 0:
            return self.inverse() ** (-n)
        return Scalar._raw(self.num**n, self.den**n)

    # -- calculus ---------------------------------------------------------
    def diff(self, mu: int) -> Scalar:
        """Exact partial derivative with respect to x_mu."""
        dn = self.num.derivative(mu)
        if self.den.is_one():
            return Scalar._raw(dn, _ONE)
        dd = self.den.derivative(mu)
        if dd.is_zero():
            return Scalar._raw(*_reduce(dn, self.den))
        return Scalar._raw(*_reduce(dn * self.den - self.num * dd, self.den * self.den))

    def evaluate(self, point) -> Fraction:
        """Value at a rational point (x0, x1, x2, x3)."""
        pt = [Fraction(p) for p in point]
        d = _eval_poly(self.den, pt)
        if d == 0:
            raise ZeroDivisionError(f"{self} has a pole at {tuple(point)}")
        return _eval_poly(self.num, pt) / d

    # -- comparison / hashing / text -------------------------------------
    def __eq__(self, other) -> bool:
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((str(self.num), str(self.den)))
        return self._hash

    def __str__(self) -> str:
        n = str(self.num) if not self.num.is_zero() else "0"
        if self.den.is_one():
            return n
        return f"({n})/({self.den})"

    def __repr__(self) -> str:
        return f"Scalar('{self}')"


def _coerce(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (bool, int, flint.fmpz)):
        return Scalar._raw(_const(x), _ONE)
    if isinstance(x, (Rational, flint.fmpq)):
        return Scalar(x)
    return NotImplemented


def _normalize_sign(num, den):
    if num.is_zero():
        return _ZERO, _ONE
    if den.leading_coefficient() < 0:
        return -num, -den
    return num, den


def _reduce(num, den):
    if num.is_zero():
        return _ZERO, _ONE
    if den.is_one():
        return num, den
    g = num.gcd(den)
    if not g.is_one():
        num = num / g
        den = den / g
    return _normalize_sign(num, den)


def _eval_poly(p, pt) -> Fraction:
    total = Fraction(0)
    for exps, c in p.to_dict().items():
        term = Fraction(int(c))
        for e, v in zip(exps, pt):
            if e:
                term *= Fraction(v) ** int(e)
        total += term
    return total


ZERO = Scalar._raw(_ZERO, _ONE)
ONE = Scalar._raw(_ONE, _ONE)
X = tuple(Scalar.var(mu) for mu in range(4))


def partial(mu: int, f) -> Scalar:
    """d/dx_mu of ``f``; constants (int, Fraction) differentiate to zero."""
    if not 0 <= mu <= 3:
        raise ValueError(f"coordinate index {mu} out of range")
    if isinstance(f, Scalar):
        return f.diff(mu)
    return ZERO


def scalar(value) -> Scalar:
    if isinstance(value, str):
        return parse_scalar(value)
    return Scalar(value)


_BINOPS = {ast.Add: "__add__", ast.Sub: "__sub__", ast.Mult: "__mul__", ast.Div: "__truediv__"}


def parse_scalar(text: str) -> Scalar:
    """Parse expressions such as ``"(2*x0^2 - 1)/(3*x1)"``."""
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse scalar {text!r}") from exc

    def walk(node) -> Scalar:
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return Scalar(node.value)
        if isinstance(node, ast.Name) and node.id in VARIABLES:
            return X[VARIABLES.index(node.id)]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                    raise ValueError("only integer exponents are supported")
                return walk(node.left) ** node.right.value
            op = _BINOPS.get(type(node.op))
            if op is None:
                raise ValueError(f"unsupported operator in {text!r}")
            return getattr(walk(node.left), op)(walk(node.right))
        raise ValueError(f"unsupported syntax in {text!r}")

    return walk(tree)


class CScalar:
    """Complex coefficient re + i*im over ``Scalar``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Scalar(re) if not isinstance(re, Scalar) else re
        self.im = Scalar(im) if not isinstance(im, Scalar) else im

    def conj(self) -> CScalar:
        return CScalar(self.re, -self.im)

    def __add__(self, other):
        o = _ccoerce(other)
        return CScalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return CScalar(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-_ccoerce(other))

    def __rsub__(self, other):
        return _ccoerce(other) + (-self)

    def __mul__(self, other):
        o = _ccoerce(other)
        return CScalar(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _ccoerce(other)
        n = o.re * o.re + o.im * o.im
        return self * CScalar(o.re / n, -o.im / n)

    def __eq__(self, other):
        o = _ccoerce(other)
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def __repr__(self):
        return f"CScalar({self.re}, {self.im})"


I_UNIT = CScalar(0, 1)


def _ccoerce(x) -> CScalar:
    if isinstance(x, CScalar):
        return x
    if isinstance(x, complex):
        return CScalar(Fraction(x.real), Fraction(x.imag))
    return CScalar(x, 0)
