"""Hermite and Charlier polynomials side by side, and the kernel that maps one to the other.

Both families come out of the same generating polynomial over permutations:
feed it (x, -a, 0, 0, ...) and you get Hermite, feed it (x - a, -x, x, -x, ...)
and you get Charlier.  The kernel K^a(k, x) then carries normalized Charlier
polynomials of a Poisson count onto normalized Hermite polynomials of a
Gaussian variable with the same variance.

Run:  python demos/polynomial_correspondence.py
"""
from fractions import Fraction

import numpy as np

from levygauss import combinatorics as comb
from levygauss import orthopoly as op
from levygauss import single_point as sp

a, x = Fraction(2), Fraction(1, 3)
print("n   H_n^a(x)            via cycle index      C_n^a(x)            via cycle index")
for n in range(6):
    herm = comb.augmented_cycle_index(n, [x, -a] + [0] * max(0, n - 2))
    char = comb.augmented_cycle_index(n, [x - a] + [x if k % 2 else -x for k in range(2, n + 1)])
    print(f"{n}   {str(op.hermite(n, a, x)):18s}  {str(herm):18s}   {str(op.charlier(n, a, x)):18s}  {char}")

print("\nkernel rows K^1(k, x) for k = 0..4 and their Poisson-weighted sums")
xs = np.linspace(-1.0, 1.0, 5)
for xv in xs:
    row = [sp.kernel_1d(k, xv, 1.0) for k in range(5)]
    total = sp.inverse_kernel_weights([xv], 1.0, 80)[:, 0].sum()
    print(f"x={xv:+.2f}  " + "  ".join(f"{v:+.4f}" for v in row) + f"   sum={total:.12f}")

for rate in (0.5, 1.0, 2.0):
    g = sp.kernel_gram_1d(rate, 8)
    print(f"a={rate}: Gram defect of the kernel image of degree <= 8 is {g.defect:.2e}")

v = sp.resolve_identity_normalization(Fraction(2), Fraction(1, 2), 2)
print(f"\nthe Hermite-Charlier series sums to the closed form with a^n in the {v.certified}: "
      f"{v.denominator_sum:.15f} vs {v.closed_form:.15f}")
