"""The super Laurent module Q[z, 1/z] + theta Q[z, 1/z] and linear operators on it.

Basis vectors are pairs (k, parity).  Operators are lazy composition trees;
each node memoizes its action on basis vectors.  ``A * B`` means "apply B
first", matching the usual operator-product notation.
"""
import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import MixedContextError
from .rational import ONE, Q, ZERO
from .scalars import rpq_number_at, tau_power


class SuperLaurentPoly:
    """Finite Q-combination of z^k (parity 0) and theta z^k (parity 1)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for key, c in dict(terms).items():
                c = Q(c)
                if c:
                    self.terms[(int(key[0]), int(key[1]))] = c

    @classmethod
    def basis(cls, k, parity=0):
        return cls({(k, parity): 1})

    def __add__(self, other):
        out = dict(self.terms)
        for key, c in other.terms.items():
            v = out.get(key, 0) + c
            if v:
                out[key] = v
            else:
                out.pop(key, None)
        res = SuperLaurentPoly()
        res.terms = out
        return res

    def __neg__(self):
        res = SuperLaurentPoly()
        res.terms = {k: -c for k, c in self.terms.items()}
        return res

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = Q(c)
        res = SuperLaurentPoly()
        if c:
            res.terms = {k: c * v for k, v in self.terms.items()}
        return res

    __rmul__ = scale

    def __eq__(self, other):
        return isinstance(other, SuperLaurentPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def coeff(self, k, parity=0):
        return self.terms.get((k, parity), ZERO)

    def max_abs(self):
        return max((abs(c) for c in self.terms.values()), default=ZERO)

    def to_json(self):
        return [[k, par, str(c)] for (k, par), c in sorted(self.terms.items())]

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (k, par), c in sorted(self.terms.items()):
            parts.append("%s*%sz^%d" % (c, "θ" if par else "", k))
        return " + ".join(parts)


@dataclass(frozen=True)
class Window:
    kmin: int = -6
    kmax: int = 6
    parities: tuple = (0, 1)

    def __post_init__(self):
        if self.kmin > self.kmax:
            raise ValueError("window needs kmin <= kmax")
        object.__setattr__(self, "parities", tuple(sorted(set(self.parities))))

    def basis(self):
        for par in self.parities:
            for k in range(self.kmin, self.kmax + 1):
                yield (k, par)

    def label(self):
        return "%d..%d" % (self.kmin, self.kmax)


# --- operators ----------------------------------------------------------------

def _merge_ctx(*ops):
    ctx = None
    for op in ops:
        if op.ctx is None:
            continue
        if ctx is None:
            ctx = op.ctx
        elif op.ctx != ctx:
            raise MixedContextError("operators built over different presets or sample points")
    return ctx


class LinearOperator:
    """Base class; subclasses implement ``_image(k, parity) -> dict``."""

    ctx = None

    def __init__(self):
        self._memo = {}

    def _image(self, k, par):
        raise NotImplementedError

    def on_basis(self, k, par=0):
        """Image of (k, par) as a dict; shared with the memo, so callers must not mutate it."""
        key = (k, par)
        img = self._memo.get(key)
        if img is None:
            # setdefault keeps the first result if two threads race
            img = self._memo.setdefault(key, self._image(k, par))
        return img

    def __call__(self, poly):
        acc = {}
        for (k, par), c in poly.terms.items():
            for key, v in self.on_basis(k, par).items():
                acc[key] = acc.get(key, 0) + c * v
        return SuperLaurentPoly(acc)

    def apply_basis(self, k, par=0):
        return SuperLaurentPoly(self.on_basis(k, par))

    def __add__(self, other):
        return Sum([self, other])

    def __sub__(self, other):
        return Sum([self, Scaled(-1, other)])

    def __neg__(self):
        return Scaled(-1, self)

    def __mul__(self, other):
        if isinstance(other, LinearOperator):
            return Product([self, other])
        return Scaled(other, self)

    def __rmul__(self, c):
        return Scaled(c, self)


class Zero(LinearOperator):
    def _image(self, k, par):
        return {}

    def __repr__(self):
        return "0"


class Identity(LinearOperator):
    def _image(self, k, par):
        return {(k, par): ONE}

    def __repr__(self):
        return "1"


class Shift(LinearOperator):
    """z^k -> z^(k+s), parity kept."""

    def __init__(self, s):
        super().__init__()
        self.s = int(s)

    def _image(self, k, par):
        return {(k + self.s, par): ONE}

    def __repr__(self):
        return "Shift(%d)" % self.s


class ThetaMultiply(LinearOperator):
    def _image(self, k, par):
        return {} if par else {(k, 1): ONE}

    def __repr__(self):
        return "θ"


class Scale(LinearOperator):
    def __init__(self, c):
        super().__init__()
        self.c = Q(c)

    def _image(self, k, par):
        return {(k, par): self.c} if self.c else {}

    def __repr__(self):
        return "Scale(%s)" % self.c


class Diagonal(LinearOperator):
    """Multiplication of z^k (either parity) by fn(k, parity)."""

    def __init__(self, fn, ctx=None, label="diag"):
        super().__init__()
        self.fn = fn
        self.ctx = ctx
        self.label = label

    def _image(self, k, par):
        c = Q(self.fn(k, par))
        return {(k, par): c} if c else {}

    def __repr__(self):
        return self.label


class DiagDeformedNumber(Diagonal):
    """z^k -> [slope*k + offset + theta_weight*parity]_{R(p^a, q^a)} z^k."""

    def __init__(self, slope, offset, preset, sp, a=1, theta_weight=0):
        slope, offset, tw = Fraction(slope), Fraction(offset), Fraction(theta_weight)

        def fn(k, par):
            return rpq_number_at(slope * k + offset + tw * par, preset, sp, a)

        super().__init__(fn, (preset, sp), "[%s*k+%s]" % (slope, offset))


_BASES = {
    "p": lambda sp, e: sp.ppow(e),
    "q": lambda sp, e: sp.qpow(e),
    "pq": lambda sp, e: sp.ppow(e) * sp.qpow(e),
    "q/p": lambda sp, e: sp.qpow(e) / sp.ppow(e),
    "p/q": lambda sp, e: sp.ppow(e) / sp.qpow(e),
}


class DiagPower(Diagonal):
    """z^k -> base^(slope*k + offset) z^k; base is p, q, pq, q/p, p/q or a tau selector."""

    def __init__(self, base, slope, offset, preset, sp, a=1):
        slope, offset = Fraction(slope), Fraction(offset)
        if base in _BASES:
            f = _BASES[base]

            def fn(k, par):
                return f(sp, a * (slope * k + offset))
        else:
            def fn(k, par):
                return tau_power(base, slope * k + offset, preset, sp, a)
        super().__init__(fn, (preset, sp), "%s^(%s*k+%s)" % (base, slope, offset))


class Scaled(LinearOperator):
    def __init__(self, c, op):
        super().__init__()
        self.c = Q(c)
        self.op = op
        self.ctx = op.ctx

    def _image(self, k, par):
        if not self.c:
            return {}
        return {key: self.c * v for key, v in self.op.on_basis(k, par).items()}

    def __repr__(self):
        return "%s*(%r)" % (self.c, self.op)


class Sum(LinearOperator):
    def __init__(self, ops):
        super().__init__()
        flat = []
        for op in ops:
            flat.extend(op.ops if isinstance(op, Sum) else [op])
        self.ops = flat
        self.ctx = _merge_ctx(*flat)

    def _image(self, k, par):
        acc = {}
        for op in self.ops:
            for key, v in op.on_basis(k, par).items():
                acc[key] = acc.get(key, 0) + v
        return {key: v for key, v in acc.items() if v}

    def __repr__(self):
        return "(" + " + ".join(map(repr, self.ops)) + ")"


class Product(LinearOperator):
    """ops[0] * ops[1] * ... ; the rightmost factor acts first."""

    def __init__(self, ops):
        super().__init__()
        flat = []
        for op in ops:
            flat.extend(op.ops if isinstance(op, Product) else [op])
        self.ops = flat
        self.ctx = _merge_ctx(*flat)

    def _image(self, k, par):
        cur = {(k, par): ONE}
        for op in reversed(self.ops):
            if len(cur) == 1:
                # single-term chains are the common case: skip the accumulation dict
                ((kk, pp), c), = cur.items()
                img = op.on_basis(kk, pp)
                cur = img if c == 1 else {key: c * v for key, v in img.items()}
                if not cur:
                    break
                continue
            nxt = {}
            for (kk, pp), c in cur.items():
                for key, v in op.on_basis(kk, pp).items():
                    nxt[key] = nxt.get(key, 0) + c * v
            cur = {key: v for key, v in nxt.items() if v}
            if not cur:
                break
        return cur

    def __repr__(self):
        return "*".join(map(repr, self.ops))


class WeightedShift(LinearOperator):
    """z^k (parity e) -> coef(k, e) * theta^raise z^(k+s); the generic generator atom."""

    def __init__(self, s, coef, ctx, label, raise_parity=False):
        super().__init__()
        self.s = int(s)
        self.coef = coef
        self.ctx = ctx
        self.label = label
        self.raise_parity = raise_parity

    def _image(self, k, par):
        if self.raise_parity:
            if par:
                return {}
            out_par = 1
        else:
            out_par = par
        c = Q(self.coef(k, par))
        return {(k + self.s, out_par): c} if c else {}

    def __repr__(self):
        return self.label


def add(A, B):
    return Sum([A, B])


def scale(c, A):
    return Scaled(c, A)


def compose(A, B):
    """A after B."""
    return Product([A, B])


# --- generator families -------------------------------------------------------

GENERATOR_READINGS = ("closed", "ordered")


def _l_argument(k, n, delta, reading):
    if reading == "closed":
        return k + delta * (n + 1) - n
    if reading == "ordered":
        return k + delta * (n + 1)
    raise ValueError("unknown generator reading %r" % reading)


def gen_L(n, delta, preset, sp, reading="closed", sign=-1):
    """z^k -> -[k + delta(n+1) - n] z^(k+n) on both parities.

    ``reading='ordered'`` lets z d/dz act after the z^n factor, giving
    [k + delta(n+1)] instead.
    """
    off = _l_argument(0, n, Q(delta), reading)

    def coef(k, par):
        return sign * rpq_number_at(k + off, preset, sp)

    return WeightedShift(n, coef, (preset, sp), "L[%d,%s]" % (n, reading))


def gen_G(n, delta, preset, sp, reading="closed", sign=-1):
    off = _l_argument(0, n, Q(delta), reading)

    def coef(k, par):
        return sign * rpq_number_at(k + off, preset, sp)

    return WeightedShift(n, coef, (preset, sp), "G[%d,%s]" % (n, reading), raise_parity=True)


T_READINGS = ("closed", "defining")


def _t_argument(k, par, m, delta, reading, theta_weight):
    base = delta * (m + 1)
    if reading == "closed":
        return base
    if reading == "defining":
        return base + k + theta_weight * par
    raise ValueError("unknown T reading %r" % reading)


def gen_T(m, a, delta, preset, sp, reading="closed", theta_weight=0):
    """Multiplication by [delta(m+1)]_{R(p^a,q^a)} z^m.

    ``reading='defining'`` keeps the dependence on the input degree that the
    derivative definition produces: z^k -> [k + delta(m+1)]_a z^(k+m).
    """
    base = _t_argument(0, 0, m, Q(delta), reading, theta_weight)
    step = 0 if reading == "closed" else 1
    tw = Q(theta_weight) * step

    def coef(k, par):
        return rpq_number_at(base + step * k + tw * par, preset, sp, a)

    return WeightedShift(m, coef, (preset, sp), "T[%d,a=%s,%s]" % (m, a, reading))


def gen_TT(m, a, delta, preset, sp, reading="closed", theta_weight=0):
    return Product([ThetaMultiply(), gen_T(m, a, delta, preset, sp, reading, theta_weight)])


# --- brackets -----------------------------------------------------------------

def _as_left_factor(x):
    return x if isinstance(x, LinearOperator) else Scale(x)


def deformed_bracket(A, B, x, y):
    """x*A*B - y*B*A; x and y may be scalars or (diagonal) operators applied on the left."""
    return Sum([Product([_as_left_factor(x), A, B]),
                Scaled(-1, Product([_as_left_factor(y), B, A]))])


def permutation_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def eps_bracket(ops, weights=None):
    """Sum over orderings of sign * weight(perm) * ops[perm[0]] * ... * ops[perm[-1]].

    ``weights(perm)`` may return a scalar or an operator placed on the left.
    """
    if len(ops) < 2:
        raise ValueError("an n-bracket needs at least two operators")
    terms = []
    for perm in itertools.permutations(range(len(ops))):
        sign = permutation_sign(perm)
        chain = [ops[i] for i in perm]
        if weights is not None:
            w = weights(perm)
            if isinstance(w, LinearOperator):
                chain = [w] + chain
            else:
                sign = sign * Q(w)
        if sign:
            terms.append(Scaled(sign, Product(chain)))
    return Sum(terms)


def super_n_bracket(evens, odd):
    """Sum_j (-1)^(n-1+j) eps-sum with the odd operator inserted after j evens."""
    n = len(evens) + 1
    if n < 2:
        raise ValueError("a super n-bracket needs n >= 2")
    terms = []
    for j in range(n):
        outer = (-1) ** (n - 1 + j)
        for perm in itertools.permutations(range(n - 1)):
            chain = [evens[i] for i in perm]
            chain.insert(j, odd)
            terms.append(Scaled(outer * permutation_sign(perm), Product(chain)))
    return Sum(terms)


# --- extensional equality ----------------------------------------------------

@dataclass(frozen=True)
class Counterexample:
    basis: tuple
    lhs: SuperLaurentPoly
    rhs: SuperLaurentPoly

    def __bool__(self):
        return False

    def to_json(self):
        return {"basis": list(self.basis), "lhs": self.lhs.to_json(), "rhs": self.rhs.to_json()}


class Equal:
    def __bool__(self):
        return True

    def __repr__(self):
        return "Equal"


EQUAL = Equal()


def op_equal_on_window(A, B, w):
    _merge_ctx(A, B)
    for k, par in w.basis():
        a = A.apply_basis(k, par)
        b = B.apply_basis(k, par)
        if a != b:
            return Counterexample((k, par), a, b)
    return EQUAL


def window_norm(A, w):
    """Largest absolute coefficient of A over the window's basis images."""
    return max((A.apply_basis(k, par).max_abs() for k, par in w.basis()), default=ZERO)
