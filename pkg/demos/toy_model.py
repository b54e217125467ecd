"""The toy-model correspondence in truncated power series.

The constraint operator is applied to the moment generating series.  The
result is compared with the integrand insertion to a fixed total t-degree.
The check runs at depth 4 and again at depth 6 to show the verdict is stable.
"""
from fractions import Fraction

from rpqverify.cases import sample_points
from rpqverify.rational import Q
from rpqverify.scalars import get_preset
from rpqverify.series import TOY_READINGS, verify_toy_correspondence

js = get_preset("js")
pts, _ = sample_points(0, 2, 2, [js])

for reading in TOY_READINGS:
    row = []
    for m, delta in ((0, Fraction(1)), (1, Fraction(2)), (2, Fraction(1, 2))):
        shallow = verify_toy_correspondence(m, 1, delta, Q(0), js, pts, 4, reading)
        deep = verify_toy_correspondence(m, 1, delta, Q(0), js, pts, 6, reading)
        row.append("%s/%s" % (shallow.verdict, deep.verdict))
    print("%-16s %s" % (reading, "  ".join(row)))
