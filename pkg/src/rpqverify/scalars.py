"""Exact scalar arithmetic: sample points, presets and deformed numbers.

A sample point fixes rational roots u = p^(1/rho), v = q^(1/rho) so that every
power p^x with rho*x integral is an exact rational.  All coefficient
functions take ``a`` (default 1) to evaluate the deformation at (p^a, q^a).
"""
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .errors import ConfigError, DomainError, FractionalPowerError, PoleError, SingularError
from .expr import Expression, Mono
from .rational import _MPQ, ONE, Q


def as_fraction(x):
    """Parse ints, Fractions and strings like '3/2' into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ConfigError("boolean is not a rational number")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise ConfigError("not a rational number: %r" % x) from None
    raise ConfigError("not a rational number: %r" % (x,))


def lcm(*values):
    out = 1
    for v in values:
        v = int(v)
        if v:
            out = out * v // gcd(out, v)
    return out


@dataclass(frozen=True)
class SamplePoint:
    rho: int
    u: Fraction
    v: Fraction

    def __post_init__(self):
        object.__setattr__(self, "u", Fraction(self.u))
        object.__setattr__(self, "v", Fraction(self.v))
        if int(self.rho) != self.rho or self.rho < 1:
            raise DomainError("rho must be a positive integer")
        if not (0 < self.v < self.u < 1):
            raise DomainError("sample point needs 0 < v < u < 1")
        object.__setattr__(self, "_uq", Q(self.u))
        object.__setattr__(self, "_vq", Q(self.v))
        # cache lookups compare points constantly; an int tuple keeps that cheap
        key = (int(self.rho), self.u.numerator, self.u.denominator, self.v.numerator,
               self.v.denominator)
        object.__setattr__(self, "_k", key)
        object.__setattr__(self, "_hash", hash(key))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, SamplePoint):
            return NotImplemented
        return self._k == other._k

    @property
    def p(self):
        return self.u ** self.rho

    @property
    def q(self):
        return self.v ** self.rho

    def _exp(self, x):
        if type(x) is int:
            return x * self.rho
        e = Fraction(x) * self.rho
        if e.denominator != 1:
            raise FractionalPowerError(
                "exponent %s needs rho divisible by %d" % (x, Fraction(x).denominator))
        return int(e)

    def ppow(self, x):
        return self._uq ** self._exp(x)

    def qpow(self, x):
        return self._vq ** self._exp(x)

    def mono_p(self, x=1):
        return Mono(1, Fraction(x) * self.rho, 0)

    def mono_q(self, x=1):
        return Mono(1, 0, Fraction(x) * self.rho)

    def value(self, mono):
        return mono.value(self._uq, self._vq)

    def label(self):
        return "u=%s,v=%s,rho=%d" % (self.u, self.v, self.rho)


def make_sample_point(seed, rho):
    """Deterministic pseudo-random point with small denominators."""
    if int(rho) != rho or rho < 1:
        raise DomainError("rho must be a positive integer")
    rng = random.Random("rpq-sample-%d" % seed)
    while True:
        den_u = rng.randint(3, 11)
        den_v = rng.randint(3, 11)
        u = Fraction(rng.randint(1, den_u - 1), den_u)
        v = Fraction(rng.randint(1, den_v - 1), den_v)
        if 0 < v < u < 1:
            return SamplePoint(int(rho), u, v)


@dataclass(frozen=True)
class DeformationPreset:
    name: str
    R: str
    tau1: str
    tau2: str
    extras: tuple = ()
    C: Fraction = Fraction(1)
    c: Fraction = Fraction(1)
    aliases: tuple = field(default=(), compare=False)

    def __post_init__(self):
        extras = tuple(sorted((str(k), as_fraction(v)) for k, v in dict(self.extras).items()))
        object.__setattr__(self, "extras", extras)
        object.__setattr__(self, "C", as_fraction(self.C))
        object.__setattr__(self, "c", as_fraction(self.c))
        names = {"s", "t", "p", "q"} | {k for k, _ in extras}
        object.__setattr__(self, "_R", Expression(self.R, names))
        object.__setattr__(self, "_tau1", Expression(self.tau1, names - {"s", "t"}))
        object.__setattr__(self, "_tau2", Expression(self.tau2, names - {"s", "t"}))
        object.__setattr__(self, "_hash", hash((self.name, self.R, self.tau1, self.tau2,
                                                self.extras, self.C, self.c)))

    def __hash__(self):
        return self._hash

    def extra(self, key):
        return dict(self.extras)[key]

    def env(self, sp, a=1, x=None):
        a = Fraction(a)
        env = {k: Mono(v) for k, v in self.extras}
        env["p"] = sp.mono_p(a)
        env["q"] = sp.mono_q(a)
        if x is not None:
            env["s"] = sp.mono_p(a * x)
            env["t"] = sp.mono_q(a * x)
        return env

    def exponent_denominators(self):
        """Denominators of rational constants used as exponents by the extras."""
        return [v.denominator for _, v in self.extras]

    def to_json(self):
        return {"name": self.name, "R": self.R, "tau1": self.tau1, "tau2": self.tau2,
                "extras": {k: str(v) for k, v in self.extras}}


BUILTIN_PRESETS = (
    DeformationPreset("biedenharn-macfarlane", "(t - t^(-1))/(q - q^(-1))", "q", "q^(-1)",
                      aliases=("bm",)),
    DeformationPreset("jagannathan-srinivasa", "(s - t)/(p - q)", "p", "q", aliases=("js",)),
    DeformationPreset("chakrabarti-jagannathan", "(p^(-1) - q)^(-1) * s^(-1) * (1 - s*t)",
                      "p^(-1)", "q", aliases=("cj",)),
    DeformationPreset("q-quesne", "(s*t - 1)/((q - p^(-1))*t)", "p", "q^(-1)",
                      aliases=("qq", "quesne")),
    DeformationPreset("hounkonnou-ngompe",
                      "g * t^nu * s^(-mu) * (s*t - 1)/((q - p^(-1))*t)",
                      "p^(1-mu) * q^nu", "p^(-mu) * q^(nu-1)",
                      extras={"mu": 1, "nu": 1, "g": 1}, aliases=("hn",)),
)


class PresetRegistry:
    def __init__(self, presets=BUILTIN_PRESETS):
        self._by_name = {}
        self._alias = {}
        for p in presets:
            self.add(p)

    def add(self, preset):
        if preset.name in self._by_name or preset.name in self._alias:
            raise ConfigError("duplicate preset name %r" % preset.name)
        self._by_name[preset.name] = preset
        for al in preset.aliases:
            self._alias[al] = preset.name

    def get(self, name):
        name = self._alias.get(name, name)
        try:
            return self._by_name[name]
        except KeyError:
            raise ConfigError("unknown preset %r" % name) from None

    def names(self):
        return list(self._by_name)

    def __iter__(self):
        return iter(self._by_name.values())

    def __len__(self):
        return len(self._by_name)

    def copy(self):
        out = PresetRegistry(())
        for p in self:
            out.add(p)
        return out


def preset_from_json(doc):
    try:
        return DeformationPreset(doc["name"], doc["R"], doc["tau1"], doc["tau2"],
                                 extras=doc.get("extras", {}),
                                 C=doc.get("C", 1), c=doc.get("c", 1))
    except KeyError as exc:
        raise ConfigError("preset document missing field %s" % exc) from None


def load_presets(source, registry=None):
    """Extend a registry (default: built-ins) with presets from JSON text, a path or a list."""
    reg = (registry or PresetRegistry()).copy()
    if isinstance(source, str):
        if source.lstrip().startswith(("[", "{")):
            data = json.loads(source)
        else:
            with open(source) as fh:
                data = json.load(fh)
    else:
        data = source
    if isinstance(data, dict):
        data = data.get("presets", [data])
    for doc in data:
        reg.add(preset_from_json(doc))
    return reg


DEFAULT_REGISTRY = PresetRegistry()


def get_preset(name):
    if isinstance(name, DeformationPreset):
        return name
    return DEFAULT_REGISTRY.get(name)


# --- deformed numbers -------------------------------------------------------

def _key(x):
    """Cheap hashable stand-in for a rational."""
    t = type(x)
    if t is int:
        return x
    if t is not Fraction and t is not _MPQ:
        x = Fraction(x)
    num, den = int(x.numerator), int(x.denominator)
    return num if den == 1 else (num, den)


def _unkey(x):
    return Fraction(*x) if type(x) is tuple else Fraction(x)


def rpq_number_at(x, preset, sp, a=1):
    """[x] = R(p^x, q^x), with p, q replaced by p^a, q^a."""
    return _rpq_number_cached(_key(x), preset, sp, _key(a))


@lru_cache(maxsize=None)
def _rpq_number_cached(x, preset, sp, a):
    x, a = _unkey(x), _unkey(a)
    try:
        m = preset._R.evaluate(preset.env(sp, a, x), sp.u, sp.v)
    except ZeroDivisionError as exc:
        raise PoleError("R has a pole at x=%s (a=%s): %s" % (x, a, exc)) from None
    return sp.value(m)


def rpq_factorial(n, preset, sp, a=1):
    if n < 0:
        raise DomainError("factorial needs n >= 0")
    out = ONE
    for k in range(1, n + 1):
        out *= rpq_number_at(k, preset, sp, a)
    return out


def rpq_binomial(m, n, preset, sp, a=1):
    if n < 0 or n > m:
        raise DomainError("binomial needs 0 <= n <= m")
    den = rpq_factorial(n, preset, sp, a) * rpq_factorial(m - n, preset, sp, a)
    if den == 0:
        raise PoleError("vanishing factorial in binomial")
    return rpq_factorial(m, preset, sp, a) / den


def plain_pq_number(x, sp, a=1):
    """(p^x - q^x)/(p - q) at (p^a, q^a)."""
    x = Fraction(x)
    a = Fraction(a)
    return (sp.ppow(a * x) - sp.qpow(a * x)) / (sp.ppow(a) - sp.qpow(a))


@lru_cache(maxsize=None)
def tau_mono(which, preset, sp, a=1):
    env = preset.env(sp, a)
    if which == "tau1":
        return preset._tau1.evaluate(env, sp.u, sp.v)
    if which == "tau2":
        return preset._tau2.evaluate(env, sp.u, sp.v)
    if which in ("tau1tau2", "tau1*tau2"):
        return tau_mono("tau1", preset, sp, a) * tau_mono("tau2", preset, sp, a)
    raise DomainError("unknown tau selector %r" % which)


def tau_power(which, exponent, preset, sp, a=1):
    """tau^exponent exactly, where tau is evaluated at (p^a, q^a)."""
    return _tau_power_cached(which, _key(exponent), preset, sp, _key(a))


@lru_cache(maxsize=1 << 18)
def _tau_power_cached(which, exponent, preset, sp, a):
    return sp.value(tau_mono(which, preset, sp, _unkey(a)).power(_unkey(exponent)))


def tau_number(x, preset, sp, a=1):
    """(tau1^x - tau2^x)/(tau1 - tau2) at (p^a, q^a)."""
    t1 = tau_power("tau1", 1, preset, sp, a)
    t2 = tau_power("tau2", 1, preset, sp, a)
    if t1 == t2:
        raise PoleError("tau1 == tau2 at this sample point")
    return (tau_power("tau1", x, preset, sp, a) - tau_power("tau2", x, preset, sp, a)) / (t1 - t2)


def proportionality_constant(n, preset, sp, a=1):
    """[n](tau1 - tau2)/(tau1^n - tau2^n); constant in n when the tau pair fits R."""
    den = tau_power("tau1", n, preset, sp, a) - tau_power("tau2", n, preset, sp, a)
    if den == 0:
        raise SingularError("tau1^n == tau2^n")
    t1 = tau_power("tau1", 1, preset, sp, a)
    t2 = tau_power("tau2", 1, preset, sp, a)
    return rpq_number_at(n, preset, sp, a) * (t1 - t2) / den


def f_delta(n, delta, preset, sp, a=1):
    """(p-q)/(p^e - q^e) * R(p^e, q^e) with e = delta*(n+1)."""
    e = Fraction(delta) * (n + 1)
    if e == 0:
        raise SingularError("delta*(n+1) = 0")
    den = sp.ppow(a * e) - sp.qpow(a * e)
    return (sp.ppow(a) - sp.qpow(a)) / den * rpq_number_at(e, preset, sp, a)


def is_positive(preset, sp, nmax=8):
    try:
        return all(rpq_number_at(n, preset, sp) > 0 for n in range(1, nmax + 1))
    except (PoleError, FractionalPowerError):
        return False


def required_rho(*values):
    """Least rho making every given rational exponent integral after scaling."""
    return lcm(*[Fraction(v).denominator for v in values])
