"""Deformed super Witt / Virasoro identities, each checked as raw composition vs closed form.

Every family builder takes a reading name.  Readings differ in how an
ambiguous symbol is interpreted (which p,q-like pair the coefficients use,
where z d/dz acts, bracket order); the designated reading of each family is
the one the suite asserts on, the others are run and recorded.
"""
from fractions import Fraction

from .cases import Skip
from .errors import DomainError, SingularError
from .module import (Diagonal, Product, Scale, Scaled, Sum, Zero, deformed_bracket, gen_G,
                     gen_L)
from .scalars import f_delta, plain_pq_number, rpq_number_at, tau_number, tau_power


class CoefficientScheme:
    """The pair (P, Q) and number [x] used by the structure constants.

    ``literal`` uses p, q and the (p,q)-number (p^x - q^x)/(p - q).
    ``tau`` replaces them by the preset's pair (tau1, tau2), for which
    [x]_R is proportional to (tau1^x - tau2^x)/(tau1 - tau2).
    """

    def __init__(self, kind, preset, sp):
        if kind not in ("literal", "tau"):
            raise DomainError("unknown coefficient scheme %r" % kind)
        self.kind, self.preset, self.sp = kind, preset, sp

    def P(self, x):
        if self.kind == "literal":
            return self.sp.ppow(x)
        return tau_power("tau1", x, self.preset, self.sp)

    def Q(self, x):
        if self.kind == "literal":
            return self.sp.qpow(x)
        return tau_power("tau2", x, self.preset, self.sp)

    def PQ(self, x):
        return self.P(x) * self.Q(x)

    def num(self, x):
        if self.kind == "literal":
            return plain_pq_number(x, self.sp)
        return tau_number(x, self.preset, self.sp)

    def prefactor(self):
        """1/(p - q), or [1]_R/(tau1 - tau2): [N]_R = [1]_R (tau1^N - tau2^N)/(tau1 - tau2)."""
        den = self.P(1) - self.Q(1)
        if den == 0:
            raise Skip("P == Q at this sample point")
        if self.kind == "literal":
            return 1 / den
        return rpq_number_at(1, self.preset, self.sp) / den


def _nonzero(x, what):
    if x == 0:
        raise Skip("%s vanishes" % what)
    return x


def _fratio(n, m, shift, delta, preset, sp):
    """f_{n+m+shift} / (f_n f_{m+shift})."""
    return (f_delta(n + m + shift, delta, preset, sp)
            / _nonzero(f_delta(n, delta, preset, sp) * f_delta(m + shift, delta, preset, sp),
                       "f_n f_m"))


def number_ratio(c, j, num):
    """[c*j]/[j], continued by its limit c at j = 0."""
    if j == 0:
        return Fraction(c)
    return num(c * j) / _nonzero(num(j), "[%s]" % j)


def structure_XY(n, m, delta, preset, sp, scheme, odd=False):
    """(X, Y) for the L-L relation, or the printed (X~, Y~) for the L-G relation when ``odd``."""
    s = CoefficientScheme(scheme, preset, sp)
    r = lambda c, j: number_ratio(c, j, s.num)
    d = Fraction(delta)
    X = s.PQ(n) * r(d - 1, n) * r(d, m) * _fratio(n, m, 0, d, preset, sp)
    if not odd:
        Y = s.PQ(m) * r(d - 1, m) * r(d, n) * _fratio(n, m, 0, d, preset, sp)
    else:
        Y = s.PQ(m + 1) * r(d - 1, m + 1) * r(d, n) * _fratio(n, m, 1, d, preset, sp)
    return X, Y


def _output_degree_diag(fn, preset, sp, label):
    """Diagonal in the output degree k (applied on the left)."""
    return Diagonal(fn, (preset, sp), label)


def _bracket_factor(X, Y, n, m, delta, s):
    """z^k -> (P^N(X P^-n - Y P^-m) - Q^N(X Q^-n - Y Q^-m)) / (P - Q), N = k + delta."""
    d = Fraction(delta)
    pre = s.prefactor()

    def fn(k, par):
        N = k + d
        return pre * (s.P(N) * (X * s.P(-n) - Y * s.P(-m)) - s.Q(N) * (X * s.Q(-n) - Y * s.Q(-m)))
    return fn


# --- p1: the basic deformed relations ------------------------------------------

def _p1_readings():
    out = {}
    for gen in ("closed", "ordered"):
        for scheme in ("literal", "tau"):
            for sign in ("printed", "negated"):
                for yrule in ("printed", "ratio"):
                    name = "%s-%s-%s-%s" % (gen, scheme, sign, yrule)
                    out[name] = (gen, scheme, "xy", sign, yrule)
    out["closed-literal-printed-printed-yx"] = ("closed", "literal", "yx", "printed", "printed")
    return out


# name: (generator reading, coefficient scheme, bracket order, right-side sign, odd-Y rule)
P1_READINGS = _p1_readings()
P1_DESIGNATED = "ordered-tau-negated-printed"
P1_ODD_DESIGNATED = "ordered-tau-negated-ratio"


def p1_operators(n, m, delta, preset, sp, reading=P1_DESIGNATED, odd=False):
    """(lhs, rhs) for the X,Y-deformed L-L relation (or L-G when ``odd``)."""
    gen_reading, scheme, order, sign, yrule = P1_READINGS[reading]
    d = Fraction(delta)
    if d in (0, 1):
        raise Skip("delta must differ from 0 and 1")
    for idx in (n, m, n + m) if not odd else (n, m, n + m, m + 1, n + m + 1):
        if d * (idx + 1) == 0:
            raise Skip("singular f: delta*(%d+1) = 0" % idx)
    X, Y = structure_XY(n, m, d, preset, sp, scheme, odd=odd and yrule == "printed")
    s = CoefficientScheme(scheme, preset, sp)
    Ln = gen_L(n, d, preset, sp, gen_reading)
    if odd:
        Bm = gen_G(m, d, preset, sp, gen_reading)
        target = gen_G(n + m, d, preset, sp, gen_reading)
    else:
        Bm = gen_L(m, d, preset, sp, gen_reading)
        target = gen_L(n + m, d, preset, sp, gen_reading)
    x, y = (X, Y) if order == "xy" else (Y, X)
    lhs = deformed_bracket(Ln, Bm, x, y)
    fn = _bracket_factor(X, Y, n, m, d, s)
    rhs = Product([_output_degree_diag(fn, preset, sp, "p1-factor"), target])
    if sign == "negated":
        rhs = Scaled(-1, rhs)
    return lhs, rhs


# --- Witt form: x, y chosen so the right side is [m-n] L_{n+m} --------------------

WITT_READINGS = ("printed", "corrected", "printed-tau", "corrected-tau")
WITT_DESIGNATED = "corrected-tau"


def _chi_inverse(n, m, ratio, delta, s):
    """z^k -> P^N(P^-n - ratio P^-m) - Q^N(Q^-n - ratio Q^-m), N = k + delta."""
    d = Fraction(delta)

    def fn(k, par):
        N = k + d
        return s.P(N) * (s.P(-n) - ratio * s.P(-m)) - s.Q(N) * (s.Q(-n) - ratio * s.Q(-m))
    return fn


def _printed_chi_inverse(n, m, delta, s, odd):
    """The displayed chi_mn (or Lambda_mn) denominators with their explicit p,q factors."""
    d = Fraction(delta)
    num = s.num
    if not odd:
        r = (num(m * (d - 1)) * num(d * n)
             / _nonzero(num(n * (d - 1)) * num(d * m), "chi ratio denominator"))
        fp = s.Q(m - n) / s.P(n)
        fq = s.P(m - n) / s.Q(n)
    else:
        r = (num((m + 1) * (d - 1)) * num(d * n) * num(m)
             / _nonzero(num(m + 1) * num(n * (d - 1)) * num(d * m), "Lambda ratio denominator"))
        fp = s.P(1) * s.Q(m + 1) / s.PQ(n)
        fq = s.Q(1) * s.P(m + 1) / s.PQ(n)

    def fn(k, par):
        N = k + d
        return s.P(N) * (s.P(-n) - r * fp) - s.Q(N) * (s.Q(-n) - r * fq)
    return fn


def _inverse_diag(fn, preset, sp, label):
    def inv(k, par):
        v = fn(k, par)
        if v == 0:
            raise SingularError("%s denominator vanishes at k=%d" % (label, k))
        return 1 / v
    return Diagonal(inv, (preset, sp), label)


def _times(c, diag, preset, sp, label):
    return Diagonal(lambda k, par: c * diag.fn(k, par), (preset, sp), label)


def _witt_target(n, m, delta, preset, sp, gen_reading, odd):
    R = lambda x: rpq_number_at(x, preset, sp)
    if odd:
        return gen_G(n + m, delta, preset, sp, gen_reading), R(m + 1) - R(n)
    return gen_L(n + m, delta, preset, sp, gen_reading), R(m - n)


def witt_weights(n, m, delta, preset, sp, odd=False, scheme="tau"):
    """Diagonal weights (x, y) with x L_n B_m - y B_m L_n = c B_{n+m}.

    Derived from the validated p1 relation: x = -c chi / prefactor and
    y = x * Y/X, where chi^-1 is the bracket factor with X normalised to 1.
    The same Y/X ratio serves both parities.
    """
    d = Fraction(delta)
    if n == m:
        if not odd:
            # [m-n] = 0: the plain commutator already vanishes
            return Scale(1), Scale(1)
        raise Skip("chi singular: Y/X = 1 makes its inverse vanish identically")
    s = CoefficientScheme(scheme, preset, sp)
    _, coef = _witt_target(n, m, d, preset, sp, "ordered", odd)
    X, Y = structure_XY(n, m, d, preset, sp, scheme, odd=False)
    ratio = Y / _nonzero(X, "X")
    chi = _inverse_diag(_chi_inverse(n, m, ratio, d, s), preset, sp, "chi_mn")
    lead = -coef / s.prefactor()
    return (_times(lead, chi, preset, sp, "x"), _times(lead * ratio, chi, preset, sp, "y"))


def witt_operators(n, m, delta, preset, sp, reading=WITT_DESIGNATED, odd=False):
    d = Fraction(delta)
    if d in (0, 1):
        raise Skip("delta must differ from 0 and 1")
    for idx in (n, m, n + m) + ((m + 1, n + m + 1) if odd else ()):
        if d * (idx + 1) == 0:
            raise Skip("singular f: delta*(%d+1) = 0" % idx)
    scheme = "tau" if reading.endswith("-tau") else "literal"
    form = reading.split("-")[0]
    gen_reading = "closed" if form == "printed" else "ordered"
    s = CoefficientScheme(scheme, preset, sp)
    R = lambda x: rpq_number_at(x, preset, sp)
    Ln = gen_L(n, d, preset, sp, gen_reading)
    Bm = (gen_G if odd else gen_L)(m, d, preset, sp, gen_reading)
    target, coef = _witt_target(n, m, d, preset, sp, gen_reading, odd)
    if n == m and not odd:
        # x = y and the bracket is antisymmetric; [m-n] = 0 on the right
        return deformed_bracket(Ln, Bm, 1, 1), Zero()
    if form == "printed":
        lead = (coef if odd else R(n - m)) / s.prefactor()
        chi_mn = _inverse_diag(_printed_chi_inverse(n, m, d, s, odd), preset, sp, "chi_mn")
        chi_nm = _inverse_diag(_printed_chi_inverse(m, n, d, s, odd), preset, sp, "chi_nm")
        x = _times(lead, chi_nm, preset, sp, "x")
        y = _times(lead, chi_mn, preset, sp, "y")
    else:
        x, y = witt_weights(n, m, d, preset, sp, odd, scheme)
    return deformed_bracket(Ln, Bm, x, y), Scaled(coef, target)


# --- Theta/lambda parametrisation -----------------------------------------------

THETA_READINGS = ("printed", "corrected", "corrected-negated")
THETA_DESIGNATED = "corrected-negated"


def _theta_number(x, sp):
    """[x]_Theta with Theta = sqrt(p/q)."""
    th = lambda e: sp.ppow(Fraction(e, 2)) / sp.qpow(Fraction(e, 2))
    den = th(1) - th(-1)
    return (th(x) - th(-x)) / den


def theta_operators(n, m, delta, preset, sp, reading=THETA_DESIGNATED, odd=False):
    d = Fraction(delta)
    if d in (0, 1):
        raise Skip("delta must differ from 0 and 1")
    for idx in (n, m, n + m) + ((m + 1, n + m + 1) if odd else ()):
        if d * (idx + 1) == 0:
            raise Skip("singular f: delta*(%d+1) = 0" % idx)
    th = lambda e: sp.ppow(Fraction(e, 2)) / sp.qpow(Fraction(e, 2))
    lam = lambda e: 1 / (sp.ppow(Fraction(e, 2)) * sp.qpow(Fraction(e, 2)))
    num = lambda x: _theta_number(x, sp)
    f = lambda j: f_delta(j, d, preset, sp)
    X = (num(n * (d - 1)) * num(d * m) / _nonzero(num(n) * num(m), "[n][m]")
         * f(n + m) / _nonzero(f(n) * f(m), "f"))
    if odd and reading == "printed":
        Y = (num((m + 1) * (d - 1)) * num(d * n) / _nonzero(num(n) * num(m + 1), "[n][m+1]")
             * f(n + m + 1) / _nonzero(f(n) * f(m + 1), "f"))
    else:
        Y = (num(m * (d - 1)) * num(d * n) / _nonzero(num(n) * num(m), "[n][m]")
             * f(n + m) / _nonzero(f(n) * f(m), "f"))
    K = 1 / (th(1) - th(-1))
    gen = gen_G if odd else gen_L
    dress = Diagonal(lambda k, par: lam(k + d - 1), (preset, sp), "lambda^(N-1)")
    Ln = Product([dress, gen_L(n, d, preset, sp, "ordered")])
    Bm = Product([dress, gen(m, d, preset, sp, "ordered")])
    target = Product([dress, gen(n + m, d, preset, sp, "ordered")])
    if reading == "printed":
        factor = lambda k, par: Fraction(0)
    else:
        def factor(k, par):
            N = k + d
            return K * (th(N) * (X * th(-n) - Y * th(-m)) - th(-N) * (X * th(n) - Y * th(m)))
    lhs = deformed_bracket(Ln, Bm, X, Y)
    rhs = Product([Diagonal(factor, (preset, sp), "theta-factor"), target])
    if reading == "corrected-negated":
        rhs = Scaled(-1, rhs)
    return lhs, rhs


# --- Delta = 1 ---------------------------------------------------------------------

DELTA1_READINGS = ("printed", "sign-corrected", "corrected-tau")
DELTA1_DESIGNATED = "corrected-tau"
DELTA1_FORMS = ("dressed", "undressed", "commutator")


def _lambda_hat(n, m, preset, sp, odd, scheme):
    """Lambda^_nm (or Lambda~_nm when ``odd``).

    literal: top/[m-n]_{p,q} * f_{n+m}/(f_n f_m) with the Delta=1 f;
    tau: the same with p, q -> tau1, tau2, where every f equals [1]_R and
    [x]_{tau} = [x]_R/[1]_R, so Lambda = top/[m-n]_R.
    """
    R = lambda x: rpq_number_at(x, preset, sp)
    top = (R(m + 1) - R(n)) if odd else R(n - m)
    if scheme == "tau":
        return top / _nonzero(R(m - n), "[m-n]_R")
    for idx in (n, m, n + m):
        if idx + 1 == 0:
            raise Skip("singular f: 1*(%d+1) = 0" % idx)
    f = lambda j: f_delta(j, 1, preset, sp)
    return (top / _nonzero(plain_pq_number(m - n, sp), "[m-n]_{p,q}")
            * f(n + m) / _nonzero(f(n) * f(m), "f"))


def delta1_operators(n, m, preset, sp, reading=DELTA1_DESIGNATED, form="undressed", odd=False):
    """Delta = 1 relations for L1_n = -[z d/dz + 1] z^n and G1_n = theta L1_n.

    dressed:    [L1_n, B_m]_{u^, v^} = c Q^(N1 - m) B_{n+m}
    undressed:  [L_n, B_m]_{u, v} = c B_{n+m}, with L = Q^(-N1) L1
    commutator: [L_n, B_m] = c' P^(N1-m) Q^(n-N1) B_{n+m}
    N1 = z d/dz + 1 on the output.  The printed reading uses p, q, the weight
    v built from Lambda_mn, c = [n-m] (L-L) or [m+1]-[n] (L-G) and
    c' = c Lambda_nm.  The corrected readings use Lambda_nm in both weights,
    negate c, and take c' = -[m-n]; corrected-tau also maps p, q to tau1, tau2.
    """
    if n == m:
        raise Skip("[m-n] = 0 makes Lambda singular")
    scheme = "tau" if reading == "corrected-tau" else "literal"
    corrected = reading != "printed"
    s = CoefficientScheme(scheme, preset, sp)
    R = lambda x: rpq_number_at(x, preset, sp)
    lam_nm = _lambda_hat(n, m, preset, sp, odd, scheme)
    lam_v = lam_nm if (corrected or odd) else _lambda_hat(m, n, preset, sp, odd, scheme)
    c = (R(m + 1) - R(n)) if odd else R(n - m)
    if corrected:
        c = -c
    gen = gen_G if odd else gen_L
    cal_L = lambda j: gen_L(j, 1, preset, sp, "closed")
    cal_B = lambda j: gen(j, 1, preset, sp, "closed")
    P, Q = s.P, s.Q
    ctx = (preset, sp)
    if form == "dressed":
        lhs = deformed_bracket(cal_L(n), cal_B(m), lam_nm, P(m - n) * lam_nm)
        dress = Diagonal(lambda k, par: Q(k + 1 - m), ctx, "Q^(N1-m)")
        return lhs, Product([dress, Scaled(c, cal_B(n + m))])
    strip = Diagonal(lambda k, par: Q(-(k + 1)), ctx, "Q^(-N1)")
    Ln = Product([strip, cal_L(n)])
    Bm = Product([strip, cal_B(m)])
    target = Product([strip, cal_B(n + m)])
    if form == "undressed":
        u, v = Q(m - n) * lam_nm, P(m - n) * lam_v
        return deformed_bracket(Ln, Bm, u, v), Scaled(c, target)
    if form == "commutator":
        lead = -R(m - n) if corrected else c * lam_nm
        dress = Diagonal(lambda k, par: P(k + 1 - m) * Q(n - k - 1), ctx, "P^(N1-m) Q^(n-N1)")
        return deformed_bracket(Ln, Bm, 1, 1), Product([dress, Scaled(lead, target)])
    raise DomainError("unknown Delta=1 form %r" % form)


# the small subalgebra: (n, m, form) instances of the general relations
SU11_CASES = ((0, 1, "undressed"), (-1, 0, "undressed"), (-1, 1, "commutator"))


# --- super Jacobi identity ----------------------------------------------------------

JACOBI_READINGS = ("witt-weights", "plain")
JACOBI_DESIGNATED = "witt-weights"


def _rho_weight(idx, parity, preset, sp):
    """[2j]/[j] with j = idx (+1 for G); its limit 2 at j = 0."""
    return number_ratio(2, idx + parity, lambda x: rpq_number_at(x, preset, sp))


def _gen(idx, parity, delta, preset, sp, reading):
    return (gen_G if parity else gen_L)(idx, delta, preset, sp, reading)


def _super_bracket(A, ia, pa, B, ib, pb, delta, preset, sp, weighted):
    """Graded bracket of homogeneous operators A (index ia, parity pa) and B."""
    if pa and pb:
        return Sum([Product([A, B]), Product([B, A])])
    if not weighted:
        return deformed_bracket(A, B, 1, 1)
    if not pa and not pb:
        x, y = witt_weights(ia, ib, delta, preset, sp)
        return deformed_bracket(A, B, x, y)
    if not pa and pb:
        x, y = witt_weights(ia, ib, delta, preset, sp, odd=True)
        return deformed_bracket(A, B, x, y)
    x, y = witt_weights(ib, ia, delta, preset, sp, odd=True)
    return Scaled(-1, deformed_bracket(B, A, x, y))


def jacobi_operators(triple, parities, delta, preset, sp, reading=JACOBI_DESIGNATED):
    """Cyclic sum of (-1)^{|B_i||B_l|} [rho(B_i), [B_j, B_l]]; returns (sum, 0)."""
    d = Fraction(delta)
    if d in (0, 1):
        raise Skip("delta must differ from 0 and 1")
    weighted = reading == "witt-weights"
    gen_reading = "ordered" if weighted else "closed"
    ops = [_gen(i, par, d, preset, sp, gen_reading) for i, par in zip(triple, parities)]
    terms = []
    for shift in range(3):
        i, j, l = shift, (shift + 1) % 3, (shift + 2) % 3
        sign = (-1) ** (parities[i] * parities[l])
        rho_i = Scaled(_rho_weight(triple[i], parities[i], preset, sp), ops[i])
        inner = _super_bracket(ops[j], triple[j], parities[j], ops[l], triple[l], parities[l],
                               d, preset, sp, weighted)
        outer = _super_bracket(rho_i, triple[i], parities[i], inner, triple[j] + triple[l],
                               (parities[j] + parities[l]) % 2, d, preset, sp, weighted)
        terms.append(Scaled(sign, outer))
    return Sum(terms), Zero()


# --- central charge -------------------------------------------------------------------

def central_charge_scalar(n, preset, sp):
    """C * [n]/[2n] * [n-1][n][n+1]; zero for n in {-1, 0, 1}."""
    R = lambda x: rpq_number_at(x, preset, sp)
    tail = R(n - 1) * R(n) * R(n + 1)
    if tail == 0:
        return Fraction(0)
    den = R(2 * n)
    if den == 0:
        raise SingularError("[2n] = 0 with a nonzero cubic factor")
    return preset.C * R(n) / den * tail


def central_charge(n, delta, preset, sp):
    """Diagonal operator C [n]/[2n] (pq)^(N/2 + n) [n-1][n][n+1], N = k + delta."""
    c = central_charge_scalar(n, preset, sp)
    if c == 0:
        return Zero()
    d = Fraction(delta)
    return Diagonal(lambda k, par: c * sp.ppow((k + d) / 2 + n) * sp.qpow((k + d) / 2 + n),
                    (preset, sp), "C_%d" % n)
