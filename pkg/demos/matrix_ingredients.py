"""Ingredients of the deformed matrix model, under the q-reduction.

theta(z) is a truncated Jacobi-type product.  Its two shift properties hold
to float precision once the boundary factors are negligible.  The Newton
determinant and the D_N operators are checked symbolically.
"""
from rpqverify.matrix_model import (QReduction, dN_check, newton_check, newton_product_determinant,
                                    theta, theta_shift_check, theta_zsamples, useful_id_check)

q = QReduction(0.4)
for K in (20, 40, 60):
    print("theta(0.3) with K=%d: %.15g" % (K, theta(0.3, q, K)))

zs = theta_zsamples(0, 5)
print("shift properties at z =", zs, "->", theta_shift_check(q, 50, zs) or "hold")

for N in range(1, 4):
    print("Newton determinant N=%d: %s" % (N, newton_product_determinant(N)))
print("Newton expansion N<=4:", all(newton_check(N) is None for N in range(1, 5)))
print("D_N on the exponential, N<=3:", all(dN_check(N, 3) is None for N in range(1, 4)))
print("derivative identity, N=1 exact and N=2 in floats:",
      useful_id_check(1, 2, 1) is None and useful_id_check(1, 2, 2, 0.4, 60) is None)
