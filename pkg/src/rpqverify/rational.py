"""Exact rationals for coefficient arithmetic (gmpy2's mpq; interoperates with Fraction)."""
from fractions import Fraction

from gmpy2 import mpq

_MPQ = type(mpq(0))
RATIONAL_TYPES = (Fraction, _MPQ)
ZERO = mpq(0)
ONE = mpq(1)


def Q(x):
    if type(x) is _MPQ:
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)



def to_fraction(x):
    return Fraction(int(x.numerator), int(x.denominator))
