"""Pochhammer and theta machinery, Newton-identity determinants and the matrix-model operator.

Only the q-reduction (p = 1, factors 1 - q^k z) turns the operator-valued G(P,Q)
into a scalar per factor, so products and theta functions are implemented for it
alone; deformation presets raise UnsupportedPresetError.
"""
import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

from .cases import Skip, run_scalar_case
from .errors import DomainError, UnsupportedPresetError
from .rational import ONE, Q, ZERO
from .scalars import DeformationPreset
from .series import SeriesDifferentialOperator, SeriesRing, bell_polynomials


@dataclass(frozen=True)
class QReduction:
    """The q-reduction R(x,1) = (x-1)/x: p = 1 and G reduces to 1 on every factor."""
    q: object
    name: str = "q"

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise DomainError("q-reduction needs 0 < q < 1")


def _qvalue(preset):
    if isinstance(preset, QReduction):
        return preset.q
    if isinstance(preset, DeformationPreset):
        raise UnsupportedPresetError(
            "G(P,Q) does not reduce to a scalar factor for preset %r" % preset.name)
    raise UnsupportedPresetError("not a preset: %r" % (preset,))


def pochhammer(z, n, preset, sp=None):
    """(z; q)_n = prod_{k<n} (1 - q^k z) for the q-reduction."""
    if n < 0:
        raise DomainError("Pochhammer length must be >= 0")
    q = _qvalue(preset)
    out = 1
    for k in range(n):
        out *= 1 - q ** k * z
    return out


# --- theta ---------------------------------------------------------------------

def theta(z, preset, K=50, backend="float", sp=None):
    """Truncated theta: prod_{k<K} (1 - q^k z)(1 - q^(k+1)/z).

    backend "float" returns a number; backend "formal" returns the factor list
    [(b, e)] standing for 1 - q^b z^e, where z is the formal variable and the
    argument is given as (shift b0, sign s) meaning q^b0 z^s.
    """
    q = _qvalue(preset)
    if backend == "float":
        k = np.arange(K, dtype=float)
        qf = float(q)
        zf = complex(z) if isinstance(z, complex) else float(z)
        if zf == 0:
            raise DomainError("theta needs z != 0")
        return float(np.prod(1 - qf ** k * zf) * np.prod(1 - qf ** (k + 1) / zf))
    if backend == "formal":
        b0, s = z
        return ([(k + b0, s) for k in range(K)]
                + [(k + 1 - b0, -s) for k in range(K)])
    raise DomainError("unknown theta backend %r" % backend)


def theta_boundary_size(z, q, K):
    """Largest truncated-away factor deviation |q^K z| + |q^(K+1)/z| for an argument z."""
    return abs(q ** K * z) + abs(q ** (K + 1) / z)


THETA_TOL = 1e-10


def theta_shift_check(preset, K, zsamples, backend="float", tol=THETA_TOL):
    """None when both shift properties hold at every z, else a witness dict.

    Property one: theta(qz) = theta(1/(pz)); property two: theta(z/q) = (p/q) z^2 theta(1/(pz)),
    with p = 1 for the q-reduction.
    """
    q = _qvalue(preset)
    if backend == "formal":
        return _formal_shift_check(q, K)
    qf = float(q)
    for z in zsamples:
        for arg in (qf * z, 1 / z, z / qf):
            if theta_boundary_size(arg, qf, K) > tol * 1e-2:
                raise Skip("boundary factor at z=%r is not negligible for K=%d" % (z, K))
        base = theta(1 / z, preset, K)
        one = theta(qf * z, preset, K)
        two = theta(z / qf, preset, K)
        rhs_two = z * z / qf * base
        if abs(one - base) > tol * max(1.0, abs(base)):
            return {"property": "q-shift", "z": z, "lhs": one, "rhs": base}
        if abs(two - rhs_two) > tol * max(1.0, abs(rhs_two)):
            return {"property": "inverse-shift", "z": z, "lhs": two, "rhs": rhs_two}
    return None


def _laurent_mul(a, b):
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _factor_poly(b, e, q):
    return {0: Fraction(1), e: -Fraction(q) ** b}


def formal_shift_analysis(q, K):
    """Factor multisets of both sides after the index shift, boundary factors set aside.

    Interior leftovers must agree as Laurent polynomials in z once the prefactor
    is included; checked exactly at the rational q.  Returns (witness or None, report).
    """
    report = {}
    cases = {"q-shift": ((1, 1), (0, -1), Fraction(1), 0),
             "inverse-shift": ((-1, 1), (0, -1), 1 / Fraction(q), 2)}
    for name, (left, right, pref, pz) in cases.items():
        lo = theta(left, QReduction(q), K, "formal")
        ro = theta(right, QReduction(q), K, "formal")
        for f in list(lo):
            if f in ro:
                ro.remove(f)
                lo.remove(f)
        # q-powers in the last two slots of either product are truncation effects
        edge = lambda f: f[0] >= K - 1
        lb, rb = [f for f in lo if edge(f)], [f for f in ro if edge(f)]
        li, ri = [f for f in lo if not edge(f)], [f for f in ro if not edge(f)]
        report[name] = {"boundary_lhs": lb, "boundary_rhs": rb, "interior_lhs": li,
                        "interior_rhs": ri}
        if len(lb) > 4 or len(rb) > 4:
            return {"property": name, "reason": "more than two boundary factors per product",
                    **report[name]}, report
        lp, rp = {0: Fraction(1)}, {pz: pref}
        for b, e in li:
            lp = _laurent_mul(lp, _factor_poly(b, e, q))
        for b, e in ri:
            rp = _laurent_mul(rp, _factor_poly(b, e, q))
        if lp != rp:
            return {"property": name, **report[name]}, report
    return None, report


def _formal_shift_check(q, K):
    return formal_shift_analysis(Fraction(q), K)[0]


# --- Newton identities and the D_N operator -------------------------------------

def _newton_matrix_det(N, ring, entry):
    """(1/N!) det of the banded matrix: entry(i - j + 1) on and below the diagonal,
    i + 1 on the superdiagonal (0-based rows i), zero elsewhere."""
    def cell(i, j):
        if j <= i:
            return entry(i - j + 1)
        if j == i + 1:
            return ring.const(i + 1)
        return None
    total = ring.zero()
    for perm in itertools.permutations(range(N)):
        cells = [cell(i, perm[i]) for i in range(N)]
        if any(c is None for c in cells):
            continue
        inv = sum(1 for i in range(N) for j in range(i + 1, N) if perm[i] > perm[j])
        prod = ring.const(-1 if inv % 2 else 1)
        for c in cells:
            prod = prod * c
        total = total + prod
    return total * (Q(1) / factorial(N))


def newton_product_determinant(N):
    """prod_i z_i as a polynomial in the power sums nu_1..nu_N (variable j is nu_j)."""
    if not 1 <= N <= 4:
        raise DomainError("newton_product_determinant supports 1 <= N <= 4")
    ring = SeriesRing(N, N)
    return _newton_matrix_det(N, ring, ring.var)


def power_sum_expansion(poly, N):
    """Substitute nu_k = z_1^k + ... + z_N^k; returns {z exponent tuple: coefficient}."""
    out = {}
    for exps, c in poly.terms.items():
        term = {(0,) * N: Q(c)}
        for k, e in enumerate(exps, 1):
            nu = {tuple(k if i == j else 0 for i in range(N)): ONE for j in range(N)}
            for _ in range(e):
                term = _zmul(term, nu)
        for z, v in term.items():
            out[z] = out.get(z, ZERO) + v
    return {z: v for z, v in out.items() if v}


def _zmul(a, b):
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, ZERO) + c1 * c2
    return {e: c for e, c in out.items() if c}


def newton_check(N):
    got = power_sum_expansion(newton_product_determinant(N), N)
    want = {(1,) * N: ONE}
    return None if got == want else {"N": N, "expansion": {str(k): str(v) for k, v in got.items()}}


def dN_operator(N):
    """(1/N!) det with nu_k replaced by (2k)! d/dt_{2k}, expanded (the derivatives commute)."""
    if not 1 <= N <= 3:
        raise DomainError("dN_operator supports 1 <= N <= 3")
    poly = _newton_matrix_det(N, SeriesRing(N, N), SeriesRing(N, N).var)
    op = SeriesDifferentialOperator(t0_weight=N)
    for exps, c in sorted(poly.terms.items()):
        derivs, coef = [], Q(c)
        for k, e in enumerate(exps, 1):
            derivs += [2 * k] * e
            coef *= factorial(2 * k) ** e
        op.add(coef, derivs)
    return op


class MultiSeries:
    """Truncated series in t_1..t_K whose coefficients are polynomials in z_1..z_N."""

    def __init__(self, ring, N, terms):
        self.ring, self.N = ring, N
        self.terms = {e: z for e, z in terms.items() if z and ring.keep(e)}

    @classmethod
    def exponential(cls, ring, N):
        """exp(sum_k t_k nu_k/k!) truncated by ``ring``."""
        K = ring.nvars
        nu = [{tuple(k if i == j else 0 for i in range(N)): ONE for j in range(N)}
              for k in range(1, K + 1)]
        powers = {}

        def nu_pow(k, e):
            if (k, e) not in powers:
                acc = {(0,) * N: ONE}
                for _ in range(e):
                    acc = _zmul(acc, nu[k - 1])
                powers[(k, e)] = acc
            return powers[(k, e)]

        terms = {}
        for total in range(ring.degree + 1):
            for exps in _compositions(total, K):
                z = {(0,) * N: ONE}
                scale = ONE
                for k, e in enumerate(exps, 1):
                    if e:
                        z = _zmul(z, nu_pow(k, e))
                        scale /= factorial(k) ** e * factorial(e)
                terms[exps] = {k: v * scale for k, v in z.items()}
        return cls(ring, N, terms)

    def derivative(self, j):
        i = j - 1
        out = {}
        for e, z in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = {k: v * e[i] for k, v in z.items()}
        return MultiSeries(self.ring, self.N, out)

    def times_monomial(self, zexp):
        return MultiSeries(self.ring, self.N, {
            e: {tuple(a + b for a, b in zip(k, zexp)): v for k, v in z.items()}
            for e, z in self.terms.items()})

    def apply(self, op):
        out = {}
        for coef, derivs, factor in op.listing():
            if factor is not None:
                raise DomainError("MultiSeries.apply takes constant-coefficient operators")
            s = self
            for j in derivs:
                s = s.derivative(j)
            for e, z in s.terms.items():
                acc = out.setdefault(e, {})
                for k, v in z.items():
                    acc[k] = acc.get(k, ZERO) + v * coef
        return MultiSeries(self.ring, self.N, {e: {k: v for k, v in z.items() if v}
                                               for e, z in out.items()})

    def truncate(self, degree):
        return {e: z for e, z in self.terms.items() if sum(e) <= degree and z}


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def dN_check(N, depth):
    """D_N exp(...) against prod z_j^2 exp(...) up to t-degree ``depth``; None or a witness."""
    op = dN_operator(N)
    ring = SeriesRing(2 * N, depth + N)
    E = MultiSeries.exponential(ring, N)
    lhs = E.apply(op).truncate(depth)
    rhs = E.times_monomial((2,) * N).truncate(depth)
    for e in sorted(set(lhs) | set(rhs), key=lambda e: (sum(e), e)):
        if lhs.get(e, {}) != rhs.get(e, {}):
            return {"N": N, "monomial": list(e), "lhs": {str(k): str(v) for k, v in lhs.get(e, {}).items()},
                    "rhs": {str(k): str(v) for k, v in rhs.get(e, {}).items()}}
    return None


# --- the matrix-model conformal operator --------------------------------------------

def matrix_model_operator(n, delta, N, K, preset, sp, kpq=1, ring=None):
    """(K(p,q)/(p-q)) [ (q/p)^(D(n+1)-N) sum_{l<K} (l+n-2N)!/l! B_l(t~) D_N d_{l+n-2N}
    - p^(D(n+1)) n! d_n ].

    K counts Bell terms, so K = 0 leaves only the tail; terms with l+n-2N < 0
    are dropped.  t~_k = (tau1^k - tau2^k) t_k.
    """
    from .scalars import tau_power
    if not 1 <= N <= 3:
        raise DomainError("matrix_model_operator supports 1 <= N <= 3")
    if n < 0:
        raise DomainError("n must be >= 0")
    e = Q(delta) * (n + 1)
    pre = Q(kpq) / (sp.ppow(1) - sp.qpow(1))
    ring = ring or SeriesRing(max(K, 1), max(K, 1))
    tilde = ring.times(lambda k: tau_power("tau1", k, preset, sp) - tau_power("tau2", k, preset, sp))
    B = bell_polynomials(max(K - 1, 0), tilde)
    DN = dN_operator(N)
    head = pre * sp.qpow(e - N) / sp.ppow(e - N)
    op = SeriesDifferentialOperator(t0_weight=N)
    for l in range(K):
        idx = l + n - 2 * N
        if idx < 0 or B[l].is_zero():
            continue
        w = head * Q(factorial(idx)) / factorial(l)
        for c, derivs, _ in DN.listing():
            op.add(w * c, tuple(derivs) + (idx,), None if l == 0 else B[l])
    op.add(-pre * sp.ppow(e) * factorial(n), (n,))
    return op


# --- the derivative of f(z_l) times the theta pair product --------------------------

def _pair_product(zs, preset, K):
    out = 1.0
    for i, j in itertools.combinations(range(len(zs)), 2):
        out *= theta(zs[i] / zs[j], preset, K) * theta(zs[j] / zs[i], preset, K)
    return out


def useful_id_check(n, delta, N, q=0.4, K=60, zs=None, kpq=1, tol=1e-8):
    """Both sides of the derivative identity for f(z) = z^(D(n+1)) times the theta pairs.

    Left: sum_l K(p,q) (F(q z_l) - F(p z_l))/((p - q) z_l), F the full integrand with z_l scaled.
    Right: sum_l K(p,q)/((p-q) z_l) (f(q z_l)/f(p z_l) prod_{j!=l} (p/q) z_j^2/z_l^2 - 1) f(p z_l) g(z).
    p = 1 (q-reduction).  N = 1 is checked in exact rationals, N = 2 in floats.
    """
    e = Q(delta) * (n + 1)
    if N == 1:
        return _useful_id_exact(e, q, zs, kpq)
    if N != 2:
        raise DomainError("useful-identity check supports N in {1, 2}")
    preset = QReduction(float(q))
    qf, ef = float(q), float(e)
    zs = [float(z) for z in (zs or (0.9, 1.1))]
    ratio = max(max(a / b for a in zs for b in zs), 1.0) / qf
    if theta_boundary_size(ratio, qf, K) > tol * 1e-2:
        raise Skip("z ratio %g is outside the convergence margin for K=%d" % (ratio, K))
    f = lambda z: z ** ef
    g = _pair_product(zs, preset, K)
    lhs = rhs = 0.0
    for l, zl in enumerate(zs):
        up = list(zs)
        up[l] = qf * zl
        lhs += kpq * (f(qf * zl) * _pair_product(up, preset, K) - f(zl) * g) / ((1 - qf) * zl)
        prod = 1.0
        for j, zj in enumerate(zs):
            if j != l:
                prod *= (1 / qf) * zj * zj / (zl * zl)
        rhs += kpq / ((1 - qf) * zl) * (f(qf * zl) / f(zl) * prod - 1) * f(zl) * g
    if abs(lhs - rhs) > tol * max(abs(lhs), abs(rhs), 1e-300):
        return {"lhs": lhs, "rhs": rhs, "z": zs, "q": qf, "K": K}
    return None


def _useful_id_exact(e, q, zs, kpq):
    """N = 1: no theta pairs; exact with q and z taken as perfect powers of rationals."""
    den = e.denominator
    qr = Fraction(q).limit_denominator(100) if not isinstance(q, Fraction) else q
    zr = Fraction(zs[0]) if zs else Fraction(7, 5)
    # roots r, w with q = r^den and z = w^den keep every power rational
    q_, z_ = qr ** den, zr ** den
    num = int(e * den)
    fq = (qr * zr) ** num          # f(q z)
    fp = zr ** num                 # f(p z), p = 1
    lhs = Q(kpq) * (Q(fq) - Q(fp)) / ((1 - Q(q_)) * Q(z_))
    rhs = Q(kpq) / ((1 - Q(q_)) * Q(z_)) * (Q(fq) / Q(fp) - 1) * Q(fp)
    if lhs != rhs:
        return {"lhs": str(lhs), "rhs": str(rhs)}
    return None


# --- suite hooks --------------------------------------------------------------

THETA_Q = (Fraction(2, 5), Fraction(1, 2))
THETA_K = 50
THETA_FORMAL_K = 10
USEFUL_K = 60
USEFUL_Q = Fraction(2, 5)


def theta_zsamples(seed=0, count=5):
    rng = random.Random("rpq-theta-%d" % seed)
    return [round(rng.uniform(0.55, 1.8), 6) for _ in range(count)]


def suite_cases(cfg, pts, w):
    """Matrix-model ingredient cases; these are independent of the sample point."""
    for N in range(1, 5):
        yield run_scalar_case("matrix.newton", {"N": N}, "determinant",
                              lambda sp, N=N: newton_check(N), pts)
    for N in range(1, 4):
        yield run_scalar_case("matrix.dN", {"N": N, "depth": 4}, "determinant",
                              lambda sp, N=N: dN_check(N, 4), pts)
    zs = theta_zsamples(cfg.seed)
    for q in THETA_Q:
        yield run_scalar_case("matrix.theta", {"q": q, "K": THETA_K, "backend": "float"}, "float",
                              lambda sp, q=q: theta_shift_check(QReduction(q), THETA_K, zs), pts)
        yield run_scalar_case("matrix.theta", {"q": q, "K": THETA_FORMAL_K, "backend": "formal"},
                              "formal",
                              lambda sp, q=q: theta_shift_check(QReduction(q), THETA_FORMAL_K, (),
                                                                "formal"), pts)
    for delta in cfg.deltas:
        for n in range(0, 4):
            for N in (1, 2):
                P = {"n": n, "delta": delta, "N": N, "q": USEFUL_Q, "K": USEFUL_K}
                yield run_scalar_case(
                    "matrix.useful-id", P, "exact" if N == 1 else "float",
                    lambda sp, n=n, delta=delta, N=N: useful_id_check(n, delta, N, USEFUL_Q,
                                                                      USEFUL_K), pts)
