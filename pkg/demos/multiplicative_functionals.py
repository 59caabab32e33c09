"""Multiplicative functionals on white noise and on Poisson configurations.

For a step function h the normalized functionals exp(<h, W> - |h|^2/2) and
prod(1 + h(x_i)) exp(-int h) have the same inner products, exp(<h1, h2>).
Summing F - 1 over finer and finer cells converges to their logarithm, an
element of the first chaos.

Run:  python demos/multiplicative_functionals.py
"""
import math

from levygauss import chaos
from levygauss import processes as pr

P = pr.Partition.uniform(4)
h1 = chaos.StepFunction(P, [0.5, -0.3, 0.2, 0.8])
h2 = chaos.StepFunction(P, [0.2, 0.6, -0.5, 0.1])
print(f"exp(<h1, h2>) = {math.exp(h1.pairing(h2)):.6f}")
for kind in ("gauss", "poisson"):
    est = chaos.multiplicative_inner_mc(kind, h1, h2, 100_000, seed=1)
    print(f"  {kind:8s} Monte Carlo {est.mean:.6f} +- {est.stderr:.6f}  (z = {est.z:.2f})")

print("\nsum over cells of (F_A - 1) against LOG F, halving the cell size each step")
h = chaos.StepFunction(pr.Partition.uniform(2), [0.8, -0.4])
for kind in ("gauss", "poisson"):
    rows = chaos.log_convergence_profile(kind, h, [pr.Partition.uniform(2**i) for i in range(5)], 100_000, seed=2)
    print(f"  {kind}")
    for r in rows:
        print(f"    cells={r.cells:3d}  E|sum - LOG|^2 = {r.distance2:.5f} +- {r.stderr:.5f}   exact {r.exact:.5f}")
