"""n-brackets: the Witt n-algebra from the l/S split, its central extension, and the T operators."""
import itertools
from fractions import Fraction
from math import comb, factorial

from .cases import Skip
from .errors import SingularError
from .identities import number_ratio
from .module import (Diagonal, Product, Scaled, Shift, Sum, ThetaMultiply, Window, WeightedShift,
                     Zero, eps_bracket, gen_T, gen_TT, permutation_sign, super_n_bracket)
from .rational import ONE, ZERO, Q
from .scalars import rpq_number_at, tau_power


def _R(preset, sp, a=1):
    return lambda x: rpq_number_at(x, preset, sp, a)


def _taus(preset, sp):
    A = lambda x: tau_power("tau1", x, preset, sp)
    B = lambda x: tau_power("tau2", x, preset, sp)
    return A, B


# --- the l/S split of L_m = [t d/dt + delta(m+1) - m] t^m -------------------------

NALG_GENERATOR_READINGS = ("ordered", "input")
NALG_WEIGHT_READINGS = ("permuted", "fixed")


def split_generators(m, delta, preset, sp, reading="ordered"):
    """(L_m, l_m, S_m) with L_m = l_m + S_m.

    ordered: t d/dt acts after t^m, so l_m z^k = tau1^{delta(m+1)} [k] z^{k+m}
    and S_m z^k = tau2^k [delta(m+1)] z^{k+m}; input: t d/dt sees the input
    degree, giving [k-m] and tau2^{k-m}.
    """
    d = Fraction(delta)
    R = _R(preset, sp)
    A, B = _taus(preset, sp)
    shift = 0 if reading == "ordered" else -m
    ctx = (preset, sp)
    e = Q(d * (m + 1))
    Ae, Re, off = A(e), R(e), e + shift
    big = WeightedShift(m, lambda k, par: R(k + off), ctx, "L+[%d]" % m)
    small = WeightedShift(m, lambda k, par: Ae * R(k + shift), ctx, "l[%d]" % m)
    S = WeightedShift(m, lambda k, par: B(k + shift) * Re, ctx, "S[%d]" % m)
    return big, small, S


def _beta_factor(mbar, n, R):
    """([-2 mbar]/(2[-mbar]))^beta, with the limit 1 at mbar = 0."""
    if n % 2:
        return Fraction(1)
    try:
        return number_ratio(2, -mbar, R) / 2
    except ZeroDivisionError:
        raise Skip("[-mbar] = 0 in the even-n prefactor") from None


def nalg_lhs(mlist, delta, preset, sp, gen_reading="ordered", weight_reading="permuted"):
    """[l ... l] + [S ... S] with the weights of the l- and S-brackets."""
    n = len(mlist)
    d = Fraction(delta)
    R = _R(preset, sp)
    A, B = _taus(preset, sp)
    mbar = sum(mlist)
    beta = _beta_factor(mbar, n, R)
    half = n // 2
    ls, Ss = [], []
    for m in mlist:
        _, l_op, s_op = split_generators(m, d, preset, sp, gen_reading)
        ls.append(l_op)
        Ss.append(s_op)
    tau12 = lambda e: A(e) * B(e)

    def pair_weight(perm):
        order = perm if weight_reading == "permuted" else range(n)
        e = sum((half - j) * mlist[i] for j, i in enumerate(order))
        return tau12(e)

    l_const = beta * A(d * (mbar - n))
    l_part = eps_bracket(ls, lambda perm: l_const * pair_weight(perm))
    s_diag = Diagonal(lambda k, par: B(d * (n * k - mbar)), (preset, sp), "prod tau2^{d(N-m)}")
    s_part = Product([s_diag, eps_bracket(Ss, lambda perm: beta * pair_weight(perm))])
    return Sum([l_part, s_part])


def nalg_rhs(mlist, delta, preset, sp, gen_reading="ordered"):
    """The closed form; the t d/dt inside the product is read at the output degree."""
    n = len(mlist)
    d = Fraction(delta)
    R = _R(preset, sp)
    A, B = _taus(preset, sp)
    mbar = sum(mlist)
    beta = _beta_factor(mbar, n, R)
    lead = (sp.q - sp.p) ** comb(n - 1, 2) / (A(1) * B(1)) ** ((n - 1) // 2 * mbar) * beta
    vdm = ONE
    for i, j in itertools.combinations(range(n), 2):
        vdm *= R(mlist[i]) - R(mlist[j])
    sgn = (-1) ** n

    def fn(k, par):
        return lead * vdm * (A(d * (mbar - 1)) + sgn * B(d * (k - mbar))) ** n
    big, _, _ = split_generators(mbar, d, preset, sp, gen_reading)
    return Product([Diagonal(fn, (preset, sp), "nalg-factor"), big])


def nalg_operators(mlist, delta, preset, sp, reading="ordered-permuted"):
    if len(mlist) < 3:
        raise Skip("the n-algebra needs n >= 3")
    gen_reading, weight_reading = reading.split("-")
    return (nalg_lhs(mlist, delta, preset, sp, gen_reading, weight_reading),
            nalg_rhs(mlist, delta, preset, sp, gen_reading))


NALG_READINGS = tuple("%s-%s" % (g, w) for g in NALG_GENERATOR_READINGS for w in NALG_WEIGHT_READINGS)
NALG_DESIGNATED = "ordered-permuted"


# --- central extension: f, C~, g, CS as formula evaluators -----------------------

def cnalg_f(mlist, delta, preset, sp, gen_reading="ordered"):
    """f(m_1..m_2n) as a diagonal operator (it contains t d/dt through the product)."""
    n2 = len(mlist)
    d = Fraction(delta)
    R = _R(preset, sp)
    A, B = _taus(preset, sp)
    mt = sum(mlist)
    beta = _beta_factor(mt, n2, R)
    lead = (sp.q - sp.p) ** comb(n2 - 1, 2) / (A(1) * B(1)) ** ((n2 - 1) // 2 * mt) * beta
    vdm = ONE
    for i, j in itertools.combinations(range(n2), 2):
        vdm *= R(mlist[i]) - R(mlist[j])
    return Diagonal(lambda k, par: lead * vdm * (A(d * (mt - 1)) + B(d * (k - mt))) ** n2,
                    (preset, sp), "f")


def cnalg_central(mlist, delta, preset, sp):
    """C~(m_1..m_2n) as a diagonal operator in N = t d/dt + delta/2.

    The exponent of (q/p)^{i N} is read with i the product index l.
    """
    n2 = len(mlist)
    if n2 % 2:
        raise ValueError("the central term needs an even number of arguments")
    n = n2 // 2
    d = Fraction(delta)
    R = _R(preset, sp)
    A, B = _taus(preset, sp)
    pref = preset.c / (6 * 2 ** n * factorial(n))
    # terms: (sign * coefficient, total exponent of (q/p)^N); only delta-supported perms survive
    terms = []
    for perm in itertools.permutations(range(n2)):
        if any(mlist[perm[2 * l]] + mlist[perm[2 * l + 1]] != 0 for l in range(n)):
            continue
        coef = Fraction(permutation_sign(perm))
        for l in range(n):
            mi = mlist[perm[2 * l]]
            m_fixed = mlist[2 * l]
            den = R(2 * m_fixed)
            if den == 0:
                raise SingularError("[2 m_%d] = 0" % (2 * l + 1))
            coef *= (R(mi - 1) / (A(1) * B(1)) ** m_fixed * R(m_fixed) / den
                     * R(mi) * R(mi + 1))
        if coef:
            terms.append(coef)
    total = sum(terms, Fraction(0))
    expo = Fraction(n * (n + 1), 2)

    def fn(k, par):
        if not total:
            return Fraction(0)
        N = k + d / 2
        return pref * total * (sp.qpow(expo * N) / sp.ppow(expo * N))
    return Diagonal(fn, (preset, sp), "C~")


def super_g_coefficient(mlist, preset, sp):
    """Scalar multiplying G_{m~} in the bracket with one odd entry (the last)."""
    n2 = len(mlist)
    n = n2 // 2
    R = _R(preset, sp)
    A, B = _taus(preset, sp)
    mt = sum(mlist)
    den = 2 * R(mt - 1)
    if den == 0:
        raise SingularError("[m~ - 1] = 0")
    out = ((sp.q - sp.p) ** comb(n2 - 1, 2) * (A(1) * B(1)) ** ((n - 1) * mt - 1)
           * R(-2 * mt - 1) / den)
    for i, j in itertools.combinations(range(n2 - 1), 2):
        out *= R(mlist[i]) - R(mlist[j])
    for i in range(n2 - 1):
        out *= R(mlist[i]) - R(mlist[-1] + 1)
    return out


def super_central(mlist, preset, sp):
    """CS(m_1..m_2n): sum over k with m_k + m_2n + 1 = 0 of the paired central factors."""
    n2 = len(mlist)
    n = n2 // 2
    R = _R(preset, sp)
    A, B = _taus(preset, sp)
    t12 = A(1) * B(1)

    def cubic(x):
        den = R(2 * x)
        if den == 0:
            raise SingularError("[2x] = 0")
        return R(x) / den * R(x + 1) * R(x) * R(x - 1)

    total = ZERO
    for k in range(n2 - 1):
        if mlist[k] + mlist[-1] + 1 != 0:
            continue
        head = ((-1) ** k * preset.c * t12 ** (-mlist[k]) / (6 * 2 ** (n - 1) * factorial(n - 1))
                * cubic(mlist[k]))
        rest = [mlist[j] for j in range(n2 - 1) if j != k]
        inner = ZERO
        for perm in itertools.permutations(range(len(rest))):
            vals = [rest[i] for i in perm]
            if any(vals[2 * s] + vals[2 * s + 1] != 0 for s in range(n - 1)):
                continue
            term = Fraction(permutation_sign(perm))
            for s in range(n - 1):
                x = vals[2 * s]
                term *= t12 ** (-x) * cubic(x)
            inner += term
        total += head * inner
    return total


def cnalg_bracket_operators(mlist, delta, preset, sp, gen_reading="ordered"):
    """Full comparison: l/S-construction 2n-bracket vs f L_{m~} + C~."""
    d = Fraction(delta)
    lhs = nalg_lhs(mlist, d, preset, sp, gen_reading, "permuted")
    big, _, _ = split_generators(sum(mlist), d, preset, sp, gen_reading)
    rhs = Sum([Product([cnalg_f(mlist, d, preset, sp, gen_reading), big]),
               cnalg_central(mlist, d, preset, sp)])
    return lhs, rhs


# --- T operators: products, commutators and n-brackets ----------------------------

T_GEN_READINGS = ("closed", "defining")
T_SCALAR_READINGS = ("graded", "scalar")
T_READINGS = tuple("%s-%s" % (g, s) for g in T_GEN_READINGS for s in T_SCALAR_READINGS)
T_DESIGNATED = "defining-graded"
T_FORMS = ("printed", "corrected")
T_COMMUTATOR_READINGS = tuple("%s-%s" % (r, f) for r in T_READINGS for f in T_FORMS)
T_COMMUTATOR_DESIGNATED = "defining-graded-corrected"
VACUUM = Window(0, 0, (0,))


def _t_reading(reading):
    gen, scalar = reading.split("-")[:2]
    return gen, scalar


def _t_form(reading):
    parts = reading.split("-")
    return parts[2] if len(parts) > 2 else "printed"


class _TKit:
    """Operator factories for one (preset, point, delta, reading)."""

    def __init__(self, delta, preset, sp, reading, odd=False):
        self.d = Fraction(delta)
        self.preset, self.sp = preset, sp
        self.gen, self.scalar = _t_reading(reading)
        self.odd = odd
        self.A, self.B = _taus(preset, sp)
        self.window = VACUUM if self.gen == "defining" else Window()

    def num(self, x, a):
        return rpq_number_at(x, self.preset, self.sp, a)

    def T(self, m, a):
        return gen_T(m, a, self.d, self.preset, self.sp, self.gen, theta_weight=1)

    def TT(self, m, a):
        return gen_TT(m, a, self.d, self.preset, self.sp, self.gen, theta_weight=1)

    def target(self, m, a):
        return self.TT(m, a) if self.odd else self.T(m, a)

    def scalar_term(self, value, degree):
        """A scalar added to operator terms: value * z^degree (theta-raised when odd) or value * 1."""
        if not value:
            return Zero()
        if self.scalar == "scalar":
            op = Shift(0)
            return Scaled(value, Product([ThetaMultiply(), op]) if self.odd else op)
        op = Shift(degree)
        return Scaled(value, Product([ThetaMultiply(), op]) if self.odd else op)

    def dA(self, a):
        den = self.A(a) - self.B(a)
        if den == 0:
            raise SingularError("tau1^a = tau2^a")
        return den


def t_product_operators(m, n, a, b, delta, preset, sp, reading=T_DESIGNATED, odd=False):
    """T^a_m T^b_n (or T^a_m TT^b_n when odd) vs the four-term expansion."""
    K = _TKit(delta, preset, sp, reading, odd)
    A, B, d, num = K.A, K.B, K.d, K.num
    e = 1 if odd else 0
    c1 = (A(a + b) - B(a + b)) * A(a * (n * (1 - d) + e)) / (K.dA(a) * K.dA(b) * A(b * d * m))
    c_b = B(a * (d * (m + 1) + n + e)) / (A(b * d * m) * K.dA(a))
    c_a = B(b * d * (n + 1)) / (A(a * (n * (d - 1) - e)) * K.dA(b))
    f = B((a + b) * d * (m + n + 1)) * num(-d * m, b) * num(n * (1 - d) + e, a)
    lhs = Product([K.T(m, a), K.target(n, b)])
    rhs = Sum([Scaled(c1, K.target(m + n, a + b)), K.scalar_term(f, m + n),
               Scaled(-c_b, K.target(m + n, b)), Scaled(-c_a, K.target(m + n, a))])
    return lhs, rhs, K.window


def _f_pair(m, n, a, b, K, en, em):
    B, d, num = K.B, K.d, K.num
    return B((a + b) * d * (m + n + 1)) * (num(-d * m, b) * num(n * (1 - d) + en, a)
                                           - num(-d * n, a) * num(m * (1 - d) + em, b))


def t_commutator_operators(m, n, a, b, delta, preset, sp, reading=T_COMMUTATOR_DESIGNATED,
                           odd=False):
    """[T^a_m, T^b_n] (or [T^a_m, TT^b_n]) vs its closed form.

    The corrected form adds the T^b term where the displayed form subtracts
    it, and in the odd case shifts only the odd entry's degree by one; both
    follow from subtracting the two product expansions.
    """
    K = _TKit(delta, preset, sp, reading, odd)
    A, B, d = K.A, K.B, K.d
    corrected = _t_form(reading) == "corrected"
    sb = 1 if corrected else -1
    en = 1 if odd else 0
    em = 0 if corrected else en
    k1 = ((A(a + b) - B(a + b)) / (K.dA(a) * K.dA(b))
          * (A(a * (n * (1 - d) + en)) / A(b * d * m) - A(b * (m * (1 - d) + em)) / A(a * d * n)))
    k_a = B(b * d * (n + 1)) / A(a * d * n) * (A(a * (n + en)) - B(b * (m + em))) / K.dA(b)
    k_b = B(a * d * (m + 1)) / A(b * d * m) * (A(b * (m + em)) - B(a * (n + en))) / K.dA(a)
    h = _f_pair(m, n, a, b, K, en, em)
    Tm, Tn = K.T(m, a), K.target(n, b)
    lhs = Sum([Product([Tm, Tn]), Scaled(-1, Product([Tn, Tm]))])
    rhs = Sum([Scaled(k1, K.target(m + n, a + b)), Scaled(-k_a, K.target(m + n, a)),
               K.scalar_term(h, m + n), Scaled(sb * k_b, K.target(m + n, b))])
    return lhs, rhs, K.window


def t_commutator_equal_operators(m, n, a, delta, preset, sp, reading=T_COMMUTATOR_DESIGNATED):
    """The a = b block.  Displayed form divides the middle term by tau1 - tau2; corrected by tau1^a - tau2^a."""
    K = _TKit(delta, preset, sp, reading)
    A, B, d, num = K.A, K.B, K.d, K.num
    k1 = A(-a * d * (n + m)) * (A(a * n) - A(a * m)) / K.dA(a) * num(2, a)
    t1 = B(a * d * (n + 1)) / A(a * d * n) * (A(a * n) - B(a * m))
    t2 = B(a * d * (m + 1)) / A(a * d * m) * (A(a * m) - B(a * n))
    mid = (t1 - t2) / (K.dA(a) if _t_form(reading) == "corrected" else K.dA(1))
    target2 = K.target(m + n, 2 * a)
    h = _f_pair(m, n, a, a, K, 0, 0)
    Tm, Tn = K.T(m, a), K.target(n, a)
    lhs = Sum([Product([Tm, Tn]), Scaled(-1, Product([Tn, Tm]))])
    rhs = Sum([Scaled(k1, target2), Scaled(-mid, K.target(m + n, a)), K.scalar_term(h, m + n)])
    return lhs, rhs, K.window


def t_commutator_unit_operators(m, n, delta, preset, sp, reading=T_COMMUTATOR_DESIGNATED):
    """The a = b = 1 block; the displayed form adds the two middle pieces, the corrected form subtracts."""
    K = _TKit(delta, preset, sp, reading)
    A, B, d, num = K.A, K.B, K.d, K.num
    k1 = A(-d * (n + m)) * (A(n) - A(m)) / K.dA(1) * num(2, 1)
    sgn = -1 if _t_form(reading) == "corrected" else 1
    mid = (B(d * (n + 1)) * (A(n) - B(m)) / (A(d * n) * K.dA(1))
           + sgn * B(d * (m + 1)) * (A(m) - B(n)) / (A(d * m) * K.dA(1)))
    h = _f_pair(m, n, 1, 1, K, 0, 0)
    Tm, Tn = K.T(m, 1), K.target(n, 1)
    lhs = Sum([Product([Tm, Tn]), Scaled(-1, Product([Tn, Tm]))])
    rhs = Sum([Scaled(k1, K.target(m + n, 2)), K.scalar_term(h, m + n),
               Scaled(-mid, K.target(m + n, 1))])
    return lhs, rhs, K.window


def t_nbracket_operators(mlist, a, delta, preset, sp, reading=T_DESIGNATED, odd=False):
    """eps-bracket (or super n-bracket with the last entry odd) vs the V, D, N, h closed form."""
    n = len(mlist)
    if n < 2:
        raise Skip("an n-bracket needs n >= 2")
    K = _TKit(delta, preset, sp, reading, odd)
    A, B, d, num = K.A, K.B, K.d, K.num
    e = 1 if odd else 0
    mbar = sum(mlist)
    da = K.dA(a)
    pairs = list(itertools.combinations(range(n), 2))
    cn2 = comb(n, 2)
    vdm = ONE
    tdiff = ONE
    Dprod = ONE
    Nprod = ONE
    hprod = ONE
    for j, k in pairs:
        mj, mk = mlist[j] + e, mlist[k] + e
        vdm *= num(mj, a) - num(mk, a)
        tdiff *= B(a * mj) - B(a * mk)
        Dprod *= (B(a * d * (mlist[k] + 1)) / A(a * d * mlist[k])
                  * (num(mk, a) - num(mj, a) + B(a * mk) - A(a * mj)))
        Nprod *= (B(a * d * (mlist[j] + 1)) / A(a * d * mlist[j])
                  * (num(mj, a) - num(mk, a) + B(a * mj) - A(a * mk)))
        hprod *= (num(-d * mlist[j], a) * num(mlist[k] * (1 - d) + e, a)
                  - num(-d * mlist[k], a) * num(mlist[j] * (1 - d) + e, a))
    V = A(a * (n - 1) * (1 - d) * mbar) * (da ** cn2 * vdm + tdiff)
    D = da ** cn2 * Dprod
    N = (-1) ** (n + 1) * da ** cn2 * Nprod
    h = B(a * n * d * (mbar + 1)) * hprod
    lead = Q((-1) ** (n + 1)) / da ** (n - 1)
    if odd:
        evens = [K.T(m, a) for m in mlist[:-1]]
        lhs = super_n_bracket(evens, K.TT(mlist[-1], a))
    else:
        lhs = eps_bracket([K.T(m, a) for m in mlist])
    rhs = Sum([Scaled(lead * V * num(n, a), K.target(mbar, n * a)),
               Scaled(-lead * num(n - 1, a) * (D + N), K.target(mbar, (n - 1) * a)),
               K.scalar_term(h, mbar)])
    return lhs, rhs, K.window
