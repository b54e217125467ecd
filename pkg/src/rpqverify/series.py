"""Truncated formal series in the times t_1..t_K, Bell polynomials and the toy-model constraints.

A toy-model integrand x^gamma exp(sum t_s x^s/s!) is handled as a moment series
sum_J c_J(t) M_J, where the formal symbol M_J stands for the integral of x^(J+gamma).
Nothing is integrated: identities are compared moment by moment, monomial by monomial.
"""
from functools import lru_cache
from math import comb, factorial

from .cases import Skip, run_scalar_case
from .errors import DomainError
from .rational import ONE, Q, ZERO
from .scalars import rpq_number_at, tau_power


class SeriesRing:
    """Truncation rules shared by a family of series.

    Monomials above total degree ``degree`` are dropped.  With ``low`` set,
    monomials carrying more than one power of the variables t_{low+1}..t_K are
    dropped too; such terms can never return to the low variables after a single
    derivative, so the dropped set is an ideal and products stay exact on what is kept.
    """

    def __init__(self, nvars, degree, low=None):
        if nvars < 0 or degree < 0:
            raise DomainError("series ring needs nvars >= 0 and degree >= 0")
        self.nvars = int(nvars)
        self.degree = int(degree)
        self.low = None if low is None or low >= nvars else int(low)

    def keep(self, exps):
        if sum(exps) > self.degree:
            return False
        return self.low is None or sum(exps[self.low:]) <= 1

    def zero(self):
        return TruncatedSeries(self, {})

    def const(self, c):
        return TruncatedSeries(self, {(0,) * self.nvars: Q(c)})

    def var(self, j):
        if not 1 <= j <= self.nvars:
            raise DomainError("t_%d is outside t_1..t_%d" % (j, self.nvars))
        e = [0] * self.nvars
        e[j - 1] = 1
        return TruncatedSeries(self, {tuple(e): ONE})

    def times(self, weights=None):
        """[w_1 t_1, ..., w_K t_K]; weights is a callable s -> scalar."""
        out = [self.var(j) for j in range(1, self.nvars + 1)]
        if weights is not None:
            out = [t * weights(j) for j, t in enumerate(out, 1)]
        return out

    def _key(self):
        return (self.nvars, self.degree, self.low)

    def __eq__(self, other):
        return isinstance(other, SeriesRing) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return "SeriesRing(nvars=%d, degree=%d, low=%s)" % self._key()


class TruncatedSeries:
    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = {e: c for e, c in terms.items() if c != 0 and ring.keep(e)}

    def _check(self, other):
        if other.ring != self.ring:
            raise DomainError("series from different rings: %r vs %r" % (self.ring, other.ring))

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self + self.ring.const(other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, ZERO) + c
        return TruncatedSeries(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            c = Q(other)
            if c == 0:
                return self.ring.zero()
            return TruncatedSeries(self.ring, {e: v * c for e, v in self.terms.items()})
        self._check(other)
        keep = self.ring.keep
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                if keep(e):
                    out[e] = out.get(e, ZERO) + c1 * c2
        return TruncatedSeries(self.ring, out)

    __rmul__ = __mul__

    def derivative(self, j):
        """d/dt_j for 1 <= j <= K."""
        if not 1 <= j <= self.ring.nvars:
            raise DomainError("d/dt_%d is outside t_1..t_%d" % (j, self.ring.nvars))
        i = j - 1
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return TruncatedSeries(self.ring, out)

    def project(self, ring):
        """Reinterpret in ``ring``: drop variables beyond its range and apply its truncation."""
        n = ring.nvars
        out = {}
        for e, c in self.terms.items():
            if any(e[n:]):
                continue
            f = e[:n] + (0,) * (n - len(e))
            out[f] = out.get(f, ZERO) + c
        return TruncatedSeries(ring, out)

    def coeff(self, exps):
        exps = tuple(exps) + (0,) * (self.ring.nvars - len(exps))
        return self.terms.get(exps, ZERO)

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self == self.ring.const(other)
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join("%s*%s" % (c, monomial_label(e)) for e, c in sorted(self.terms.items()))


def monomial_label(exps):
    parts = ["t%d^%d" % (i, k) if k > 1 else "t%d" % i for i, k in enumerate(exps, 1) if k]
    return "*".join(parts) or "1"


def bell_polynomials(K, times):
    """Complete Bell polynomials B_0..B_K in the given times (t_s = times[s-1], zero beyond).

    Uses B_{n+1} = sum_k C(n,k) B_{n-k} t_{k+1}.
    """
    if K < 0:
        raise DomainError("K must be >= 0")
    if not times:
        raise DomainError("need at least one time variable to fix the ring")
    ring = times[0].ring
    B = [ring.const(1)]
    for n in range(K):
        acc = ring.zero()
        for k in range(min(n + 1, len(times))):
            acc = acc + B[n - k] * times[k] * comb(n, k)
        B.append(acc)
    return B


def bell_by_exponential(K, times):
    """B_0..B_K read off exp(sum_s t_s x^s/s!) expanded as a polynomial in x (oracle route)."""
    ring = times[0].ring
    # S(x) as a coefficient list in x
    S = [ring.zero()] + [(times[s - 1] if s <= len(times) else ring.zero()) * (Q(1) / factorial(s))
                         for s in range(1, K + 1)]
    total = [ring.const(1)] + [ring.zero()] * K
    power = [ring.const(1)] + [ring.zero()] * K
    for j in range(1, K + 1):
        nxt = [ring.zero()] * (K + 1)
        for i, a in enumerate(power):
            if a.is_zero():
                continue
            for s in range(1, K + 1 - i):
                if not S[s].is_zero():
                    nxt[i + s] = nxt[i + s] + a * S[s]
        power = nxt
        for i in range(K + 1):
            total[i] = total[i] + power[i] * (Q(1) / factorial(j))
    return [total[n] * factorial(n) for n in range(K + 1)]


# --- differential operators in the times -------------------------------------

class SeriesDifferentialOperator:
    """Sum of terms coef * factor * d/dt_{j1} ... d/dt_{jr}.

    ``factor`` is a series (or None for 1) multiplied after differentiating;
    ``weight`` is an optional function of the moment index applied when the
    operator acts on a moment series.  Index 0 stands for d/dt_0: the times
    t_0 only enter through the overall factor exp(t0_weight * t_0), evaluated at
    t_0 = 0, so d/dt_0 multiplies by ``t0_weight``.
    """

    def __init__(self, terms=(), t0_weight=1):
        self.terms = [tuple(t) for t in terms]
        self.t0_weight = Q(t0_weight)

    def add(self, coef, derivs, factor=None, weight=None):
        derivs = tuple(int(j) for j in derivs)
        if any(j < 0 for j in derivs):
            raise DomainError("negative time index in %s" % (derivs,))
        self.terms.append((Q(coef), derivs, factor, weight))
        return self

    def __add__(self, other):
        return SeriesDifferentialOperator(self.terms + other.terms, self.t0_weight)

    def max_index(self):
        return max((max(d) for _, d, _, _ in self.terms if d), default=0)

    def _differentiate(self, s, derivs):
        c = ONE
        for j in derivs:
            if j == 0:
                c *= self.t0_weight
            else:
                s = s.derivative(j)
        return s * c if c != 1 else s

    def apply(self, series, out_ring=None):
        out_ring = out_ring or series.ring
        acc = out_ring.zero()
        for coef, derivs, factor, weight in self.terms:
            if weight is not None:
                raise DomainError("moment-weighted terms act on moment series only")
            d = self._differentiate(series, derivs).project(out_ring)
            if factor is not None:
                d = d * factor
            acc = acc + d * coef
        return acc

    def apply_moments(self, moments, out_ring):
        """Act on {J: series}; weights see the moment index J."""
        out = {}
        cache = {}
        for coef, derivs, factor, weight in self.terms:
            for J, s in moments.items():
                key = (J, derivs)
                if key not in cache:
                    cache[key] = self._differentiate(s, derivs).project(out_ring)
                d = cache[key]
                if d.is_zero():
                    continue
                c = coef * (weight(J) if weight is not None else ONE)
                if c == 0:
                    continue
                if factor is not None:
                    d = d * factor
                out[J] = out[J] + d * c if J in out else d * c
        return {J: s for J, s in out.items() if not s.is_zero()}

    def listing(self):
        """(coefficient, derivative indices, factor) rows, in construction order."""
        return [(c, d, f) for c, d, f, _ in self.terms]


# --- toy model ---------------------------------------------------------------

TOY_FORMS = ("lemma", "variant", "corrected")
TOY_ROUTES = ("display", "exact")
TOY_READINGS = ("lemma-display", "lemma-exact", "variant-display", "variant-exact",
                "corrected-exact")
TOY_DESIGNATED = "lemma-display"
TOY_PRINTED = ("lemma-exact", "corrected-exact")
BELL_READINGS = ("corrected", "printed")
BELL_DESIGNATED = "corrected"


def _head_degree(m, delta, gamma):
    return Q(delta) * (m + 1) + Q(gamma)


def h_weight(m, a, delta, gamma, preset, sp):
    """h(p^a, q^a) as a function of the moment index J.

    The P, Q symbols in h act on the monomial being differentiated; for the
    moment x^(J+gamma) that monomial has degree d = J - m + Delta(m+1) + gamma,
    where the derivative yields [d]_a (p^a - q^a)/(p^(ad) - q^(ad)).
    """
    alpha = _head_degree(m, delta, gamma)
    pa = sp.ppow(a) - sp.qpow(a)

    @lru_cache(maxsize=None)
    def h(J):
        d = alpha + J - m
        den = sp.ppow(a * d) - sp.qpow(a * d)
        return rpq_number_at(d, preset, sp, a) * pa / den
    return h


def _tau(which, e, preset, sp, a):
    return tau_power(which, e, preset, sp, a)


def _tilde_times(ring, preset, sp, a):
    """t^a_k = (tau1^(ak) - tau2^(ak)) t_k."""
    return ring.times(lambda k: _tau("tau1", k, preset, sp, a) - _tau("tau2", k, preset, sp, a))


def _bell_cap(ring):
    """Largest Bell index with a monomial that survives the ring truncation."""
    low = ring.low if ring.low is not None else ring.nvars
    return low * ring.degree + (ring.nvars - low)


def _variant_index(m, delta, k):
    idx = m + 1 + Q(delta) * (k - 1)
    if idx.denominator != 1:
        raise DomainError("variant index m+1+Delta(k-1) = %s is not an integer" % idx)
    return int(idx)


def toy_constraint_operator(m, a, delta, gamma, preset, sp, K, ring=None, form="lemma"):
    """The toy-model constraint operator, Bell sum truncated at k <= K.

    form "lemma": [D(m+1)+g]_a m! tau1^(am) d_m
                  + h tau2^(a(D(m+1)+g))/(tau1^a - tau2^a) sum_k (k+m)!/k! B_k(t^a) d_{k+m}
    form "variant": head [x d_x + D(m+1) - m]_a read on the moment, Bell index m+1+D(k-1).
    form "corrected": the operator reproducing the exact insertion,
                  sum_k (m+k)!/k! ([D(m+1)+g]_a B_k(t') + c (B_k(t') - B_k(t''))) d_{m+k}
                  with t'_s = (tau1^(as) - 1) t_s, t''_s = (tau2^(as) - 1) t_s and
                  c = tau2^(a(D(m+1)+g)) [1]_a/(tau1^a - tau2^a).
    Bell factors live in ``ring`` (default: K variables, degree K).
    """
    if m < 0:
        raise DomainError("toy constraints are indexed by m >= 0")
    if form not in TOY_FORMS:
        raise DomainError("unknown operator form %r" % form)
    ring = ring or SeriesRing(K, K)
    alpha = _head_degree(m, delta, gamma)
    t1a, t2a = _tau("tau1", 1, preset, sp, a), _tau("tau2", 1, preset, sp, a)
    op = SeriesDifferentialOperator()
    if form == "corrected":
        c = _tau("tau2", alpha, preset, sp, a) * rpq_number_at(1, preset, sp, a) / (t1a - t2a)
        B1 = bell_polynomials(K, ring.times(lambda s: _tau("tau1", s, preset, sp, a) - 1))
        B2 = bell_polynomials(K, ring.times(lambda s: _tau("tau2", s, preset, sp, a) - 1))
        head = rpq_number_at(alpha, preset, sp, a)
        op.add(head * factorial(m), (m,))
        for k in range(1, K + 1):
            f = B1[k] * head + (B1[k] - B2[k]) * c
            if not f.is_zero():
                op.add(Q(factorial(m + k)) / factorial(k), (m + k,), f)
        return op
    lead = factorial(m) * _tau("tau1", m, preset, sp, a)
    if form == "lemma":
        op.add(rpq_number_at(alpha, preset, sp, a) * lead, (m,))
    else:
        shift = Q(gamma) + Q(delta) * (m + 1) - m
        op.add(lead, (m,), weight=lambda J: rpq_number_at(J + shift, preset, sp, a))
    pref = _tau("tau2", alpha, preset, sp, a) / (t1a - t2a)
    h = h_weight(m, a, delta, gamma, preset, sp)
    Bt = bell_polynomials(K, _tilde_times(ring, preset, sp, a))
    for k in range(1, K + 1):
        if Bt[k].is_zero():
            continue
        idx = m + k if form == "lemma" else _variant_index(m, delta, k)
        op.add(pref * Q(factorial(idx)) / factorial(k), (idx,), Bt[k], weight=h)
    return op


@lru_cache(maxsize=8)
def toy_moment_series(nvars, degree, low):
    """The integrand x^gamma exp(sum t_s x^s/s!) as {n: B_n(t)/n!} (moment M_n)."""
    ring = SeriesRing(nvars, degree, low)
    B = bell_polynomials(_bell_cap(ring), ring.times())
    return {n: b * (Q(1) / factorial(n)) for n, b in enumerate(B) if not b.is_zero()}


def integrand_insertion(m, a, delta, gamma, preset, sp, ring, route="display"):
    """Moment series of x^((m+1)(1-D)) D_a (x^(D(m+1)+g) exp(sum t_s x^s/s!)).

    route "display": the Leibniz expansion as displayed,
        [D(m+1)+g]_a tau1^(am) x^(m+g) E + h tau2^(a(D(m+1)+g))/(tau1^a - tau2^a)
        sum_{k>=1} B_k(t^a)/k! x^(m+g+k) E.
    route "exact": the derivative applied monomial by monomial,
        sum_n B_n(t)/n! [n + D(m+1) + g]_a x^(n+m+g).
    """
    if route not in TOY_ROUTES:
        raise DomainError("unknown insertion route %r" % route)
    alpha = _head_degree(m, delta, gamma)
    cap = _bell_cap(ring)
    Z = bell_polynomials(cap, ring.times())
    Z = [b * (Q(1) / factorial(n)) for n, b in enumerate(Z)]
    out = {}

    def put(J, s):
        if not s.is_zero():
            out[J] = out[J] + s if J in out else s

    if route == "exact":
        for n, z in enumerate(Z):
            put(n + m, z * rpq_number_at(n + alpha, preset, sp, a))
        return out
    head = rpq_number_at(alpha, preset, sp, a) * _tau("tau1", m, preset, sp, a)
    for n, z in enumerate(Z):
        put(n + m, z * head)
    t1a, t2a = _tau("tau1", 1, preset, sp, a), _tau("tau2", 1, preset, sp, a)
    pref = _tau("tau2", alpha, preset, sp, a) / (t1a - t2a)
    h = h_weight(m, a, delta, gamma, preset, sp)
    Bt = bell_polynomials(cap, _tilde_times(ring, preset, sp, a))
    for k in range(1, cap + 1):
        if Bt[k].is_zero():
            continue
        bk = Bt[k] * (pref / factorial(k))
        for n, z in enumerate(Z):
            J = n + m + k
            put(J, bk * z * h(J))
    return out


def _parse_toy_reading(reading):
    try:
        form, route = reading.split("-")
    except ValueError:
        raise DomainError("unknown toy reading %r" % reading) from None
    if form not in TOY_FORMS or route not in TOY_ROUTES:
        raise DomainError("unknown toy reading %r" % reading)
    return form, route


def toy_rings(m, delta, depth, s_max=2):
    """(times ring for the integrand, ring of compared monomials, K).

    Compared monomials use t_1..t_{s_max} up to total degree ``depth``; the
    integrand needs every t_j that a derivative can remove, so K covers the
    largest index any operator form reaches.
    """
    kmax = s_max * depth
    K = m + 1 + int(max(Q(delta), 1) * kmax)
    return SeriesRing(K, depth + 1, low=s_max), SeriesRing(s_max, depth), K


def toy_correspondence_check(m, a, delta, gamma, preset, sp, depth=4, reading=TOY_DESIGNATED,
                             s_max=2):
    """None when operator-on-Z equals the insertion on every compared monomial, else a witness."""
    form, route = _parse_toy_reading(reading)
    zring, cring, K = toy_rings(m, delta, depth, s_max)
    try:
        op = toy_constraint_operator(m, a, delta, gamma, preset, sp, s_max * depth, ring=cring,
                                     form=form)
    except DomainError as exc:
        if form == "variant":
            raise Skip(str(exc)) from None
        raise
    if op.max_index() > K:
        raise DomainError("operator reaches t_%d beyond K=%d" % (op.max_index(), K))
    Z = toy_moment_series(zring.nvars, zring.degree, zring.low)
    lhs = op.apply_moments(Z, cring)
    rhs = integrand_insertion(m, a, delta, gamma, preset, sp, cring, route)
    return moment_difference(lhs, rhs)


def moment_difference(lhs, rhs):
    """First (moment, monomial) where two moment series differ, as a witness dict."""
    for J in sorted(set(lhs) | set(rhs), key=lambda j: (Q(j), str(j))):
        a = lhs.get(J)
        b = rhs.get(J)
        ring = (a or b).ring
        a = a or ring.zero()
        b = b or ring.zero()
        if a == b:
            continue
        exps = sorted(set(a.terms) | set(b.terms), key=lambda e: (sum(e), e))
        for e in exps:
            if a.coeff(e) != b.coeff(e):
                return {"moment": J, "monomial": monomial_label(e),
                        "lhs": str(a.coeff(e)), "rhs": str(b.coeff(e))}
    return None


def verify_toy_correspondence(m, a, delta, gamma, preset, points, depth=4,
                              reading=TOY_DESIGNATED, s_max=2):
    points = points if isinstance(points, (list, tuple)) else [points]
    P = {"preset": preset.name, "delta": Q(delta), "gamma": Q(gamma), "m": m, "a": a,
         "depth": depth}
    return run_scalar_case(
        "toy", P, reading,
        lambda sp: toy_correspondence_check(m, a, delta, gamma, preset, sp, depth, reading, s_max),
        points, designated=reading == TOY_DESIGNATED)


# --- Bell split ---------------------------------------------------------------

def bell_split_check(l, preset, sp, reading=BELL_DESIGNATED):
    """B_l(t~) against sum_nu tau1^(l-nu) tau2^nu C(l,nu) B_.(t) B_.(-t).

    "corrected" pairs B_{l-nu}(t) B_nu(-t); "printed" pairs B_nu(t) B_{l-nu}(-t).
    """
    if reading not in BELL_READINGS:
        raise DomainError("unknown Bell reading %r" % reading)
    if l < 0:
        raise DomainError("l must be >= 0")
    ring = SeriesRing(max(l, 1), max(l, 1))
    tilde = bell_polynomials(l, _tilde_times(ring, preset, sp, 1))[l]
    plus = bell_polynomials(l, ring.times())
    minus = bell_polynomials(l, ring.times(lambda s: -1))
    rhs = ring.zero()
    for nu in range(l + 1):
        w = _tau("tau1", l - nu, preset, sp, 1) * _tau("tau2", nu, preset, sp, 1) * comb(l, nu)
        pair = plus[l - nu] * minus[nu] if reading == "corrected" else plus[nu] * minus[l - nu]
        rhs = rhs + pair * w
    return moment_difference({0: tilde}, {0: rhs})


def verify_bell_split(l, preset, points, reading=BELL_DESIGNATED):
    points = points if isinstance(points, (list, tuple)) else [points]
    return run_scalar_case("bell.split", {"preset": preset.name, "l": l}, reading,
                           lambda sp: bell_split_check(l, preset, sp, reading), points,
                           designated=reading == BELL_DESIGNATED)


def bell_expansion_check(K):
    """Recurrence against the exponential expansion for B_0..B_K; None or a witness."""
    ring = SeriesRing(max(K, 1), max(K, 1))
    rec = bell_polynomials(K, ring.times())
    oracle = bell_by_exponential(K, ring.times())
    for n, (x, y) in enumerate(zip(rec, oracle)):
        wit = moment_difference({n: x}, {n: y})
        if wit:
            return wit
    return None


# --- suite hooks --------------------------------------------------------------

TOY_M = range(0, 4)
TOY_GAMMAS = (Q(0), Q("1/2"))
TOY_DEPTH = 4
BELL_MAX = 8


def _mode(cfg, designated, printed, all_readings):
    if cfg.readings == "designated":
        return [designated]
    pool = printed if cfg.readings == "dual" else all_readings
    return [designated] + [r for r in pool if r != designated]


def suite_cases(kind):
    """Case generator (cfg, points, window) for the "toy" or "bell" suite."""
    if kind == "bell":
        def gen(cfg, pts, w):
            yield run_scalar_case("bell.expansion", {"K": BELL_MAX}, "recurrence",
                                  lambda sp: bell_expansion_check(BELL_MAX), pts)
            for preset in cfg.preset_objs:
                for l in range(BELL_MAX + 1):
                    for r in _mode(cfg, BELL_DESIGNATED, ("printed",), BELL_READINGS):
                        yield verify_bell_split(l, preset, pts, r)
        return gen
    if kind == "toy":
        def gen(cfg, pts, w):
            for preset in cfg.preset_objs:
                for delta in cfg.deltas:
                    for m in TOY_M:
                        for a in (1, 2):
                            for gamma in TOY_GAMMAS:
                                for r in _mode(cfg, TOY_DESIGNATED, TOY_PRINTED, TOY_READINGS):
                                    yield verify_toy_correspondence(m, a, delta, gamma, preset,
                                                                    pts, TOY_DEPTH, r)
        return gen
    raise DomainError("unknown series suite %r" % kind)


__all__ = ["SeriesRing", "TruncatedSeries", "SeriesDifferentialOperator", "bell_polynomials",
           "bell_by_exponential", "bell_split_check", "verify_bell_split", "bell_expansion_check",
           "toy_constraint_operator", "integrand_insertion", "toy_correspondence_check",
           "verify_toy_correspondence", "moment_difference", "h_weight", "suite_cases",
           "TOY_READINGS", "TOY_DESIGNATED", "BELL_READINGS", "BELL_DESIGNATED"]
