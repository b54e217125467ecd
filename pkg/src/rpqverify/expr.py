"""Safe evaluation of preset expressions over exact monomials.

Expressions are ordinary arithmetic over symbols (s, t, p, q and named
extras), with ``^`` or ``**`` for powers.  Every symbol that stands for a
power of p or q is carried as a :class:`Mono` so that fractional exponents
stay exact until the very end.
"""
import ast
from fractions import Fraction

from .errors import ConfigError, FractionalPowerError, PoleError
from .rational import Q, ZERO

_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_ALLOWED_UNARY = (ast.UAdd, ast.USub)


def integer_root(n, k):
    """Exact k-th root of a non-negative integer, or None."""
    if n < 0:
        raise ValueError("negative radicand")
    if n < 2:
        return n
    x = int(round(n ** (1.0 / k))) if n.bit_length() < 1000 else 1 << (n.bit_length() // k + 1)
    # Newton refinement in integers; the float guess may be off for big n
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    for cand in (x - 1, x, x + 1):
        if cand >= 0 and cand ** k == n:
            return cand
    return None


def rational_power(base, exponent):
    """base**exponent for Fractions, exact or FractionalPowerError."""
    base = Fraction(base)
    exponent = Fraction(exponent)
    if exponent.denominator == 1:
        e = int(exponent)
        if base == 0 and e < 0:
            raise PoleError("0 raised to a negative power")
        return base ** e
    k = exponent.denominator
    sign = 1
    if base < 0:
        if k % 2 == 0:
            raise FractionalPowerError("even root of a negative number")
        sign = -1
        base = -base
    rn = integer_root(base.numerator, k)
    rd = integer_root(base.denominator, k)
    if rn is None or rd is None:
        raise FractionalPowerError("%s^(1/%d) is not rational" % (base, k))
    root = Fraction(sign * rn, rd)
    e = exponent.numerator
    if root == 0 and e < 0:
        raise PoleError("0 raised to a negative power")
    return root ** e


class Mono:
    """coef * u**eu * v**ev with rational exponents, u and v the root symbols."""

    __slots__ = ("coef", "eu", "ev", "_q")

    def __init__(self, coef, eu=0, ev=0):
        self.coef = Fraction(coef)
        self.eu = Fraction(eu)
        self.ev = Fraction(ev)
        self._q = Q(self.coef)

    def is_const(self):
        return self.eu == 0 and self.ev == 0

    def value(self, u, v):
        if self.coef == 0:
            return ZERO
        if self.eu.denominator != 1 or self.ev.denominator != 1:
            raise FractionalPowerError(
                "exponent (%s, %s) needs a larger root denominator" % (self.eu, self.ev))
        return self._q * Q(u) ** int(self.eu) * Q(v) ** int(self.ev)

    def __mul__(self, other):
        return Mono(self.coef * other.coef, self.eu + other.eu, self.ev + other.ev)

    def inverse(self):
        if self.coef == 0:
            raise PoleError("division by zero")
        return Mono(1 / self.coef, -self.eu, -self.ev)

    def power(self, r):
        r = Fraction(r)
        return Mono(rational_power(self.coef, r), self.eu * r, self.ev * r)

    def __repr__(self):
        return "Mono(%s, %s, %s)" % (self.coef, self.eu, self.ev)


class Expression:
    """A parsed arithmetic expression with a fixed symbol whitelist."""

    def __init__(self, source, symbols):
        self.source = source
        self.symbols = frozenset(symbols)
        try:
            tree = ast.parse(source.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ConfigError("cannot parse expression %r: %s" % (source, exc)) from None
        self._check(tree.body)
        self.tree = tree.body

    def _check(self, node):
        if isinstance(node, ast.BinOp):
            if not isinstance(node.op, _ALLOWED_BINOPS):
                raise ConfigError("operator not allowed in %r" % self.source)
            self._check(node.left)
            self._check(node.right)
        elif isinstance(node, ast.UnaryOp):
            if not isinstance(node.op, _ALLOWED_UNARY):
                raise ConfigError("operator not allowed in %r" % self.source)
            self._check(node.operand)
        elif isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, int):
                raise ConfigError("only integer literals are allowed in %r" % self.source)
        elif isinstance(node, ast.Name):
            if node.id not in self.symbols:
                raise ConfigError("unknown symbol %r in %r" % (node.id, self.source))
        else:
            raise ConfigError("unsupported syntax in %r" % self.source)

    def names(self):
        return {n.id for n in ast.walk(self.tree) if isinstance(n, ast.Name)}

    def evaluate(self, env, u, v):
        """Evaluate to a Mono; env maps symbol names to Mono values."""
        return _Evaluator(env, u, v).visit(self.tree)

    def __repr__(self):
        return "Expression(%r)" % self.source


class _Evaluator:
    def __init__(self, env, u, v):
        self.env = env
        self.u = u
        self.v = v

    def _collapse(self, m):
        return Mono(m.value(self.u, self.v))

    def visit(self, node):
        if isinstance(node, ast.Constant):
            return Mono(node.value)
        if isinstance(node, ast.Name):
            return self.env[node.id]
        if isinstance(node, ast.UnaryOp):
            m = self.visit(node.operand)
            if isinstance(node.op, ast.USub):
                return Mono(-m.coef, m.eu, m.ev)
            return m
        left = self.visit(node.left)
        right = self.visit(node.right)
        op = node.op
        if isinstance(op, ast.Mult):
            return left * right
        if isinstance(op, ast.Div):
            if right.coef == 0:
                raise PoleError("division by zero while evaluating expression")
            return left * right.inverse()
        if isinstance(op, ast.Pow):
            if not right.is_const():
                right = self._collapse(right)
            return left.power(right.coef)
        if right.coef == 0:
            return left
        if left.coef == 0:
            return right if isinstance(op, ast.Add) else Mono(-right.coef, right.eu, right.ev)
        # addition: keep monomial form when exponents agree
        if left.eu == right.eu and left.ev == right.ev:
            c = left.coef + right.coef if isinstance(op, ast.Add) else left.coef - right.coef
            return Mono(c, left.eu, left.ev)
        a = left.value(self.u, self.v)
        b = right.value(self.u, self.v)
        return Mono(a + b if isinstance(op, ast.Add) else a - b)
