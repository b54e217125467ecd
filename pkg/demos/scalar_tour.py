"""A tour of deformed numbers at one exact sample point.

Prints [n], [n]!, the tau powers and the addition law
[u + v] = tau1^v [u] + tau2^u [v] for every built-in preset.
"""
from rpqverify.cases import sample_points
from rpqverify.scalars import (DEFAULT_REGISTRY, proportionality_constant, rpq_factorial,
                               rpq_number_at, tau_power)

presets = list(DEFAULT_REGISTRY)
(sp,), _ = sample_points(0, 2, 1, presets)
print("sample point:", sp.label())

for preset in presets:
    print("\n%s:  R(s,t) = %s" % (preset.name, preset.R))
    for n in range(5):
        print("  [%d] = %-28s [%d]! = %s" % (n, rpq_number_at(n, preset, sp), n,
                                             rpq_factorial(n, preset, sp)))
    # the addition law ties the deformed numbers to the two tau characters
    u, v = 3, -2
    lhs = rpq_number_at(u + v, preset, sp)
    rhs = tau_power("tau1", v, preset, sp) * rpq_number_at(u, preset, sp) + \
        tau_power("tau2", u, preset, sp) * rpq_number_at(v, preset, sp)
    print("  addition law at u=3, v=-2:", lhs == rhs)
    print("  [n] / plain (p,q)-number is constant:",
          proportionality_constant(1, preset, sp) == proportionality_constant(5, preset, sp))
