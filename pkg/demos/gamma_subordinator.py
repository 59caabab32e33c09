"""The gamma subordinator: sampled jumps, its Laplace transform and its jump-polynomial basis.

Jumps of the gamma process have intensity e^{-t}/t dt.  The chaos of the
process is indexed by polynomials orthogonal for t^2 e^{-t}/t dt = t e^{-t} dt,
which are the Laguerre polynomials L^(1).  A finite Levy measure with three
atoms has only three such polynomials; a pure Gaussian part adds one more
dimension.

Run:  python demos/gamma_subordinator.py
"""
from levygauss import chaos
from levygauss import levy_isometry as li
from levygauss import processes as pr

gamma = pr.LevySpec.gamma()
basis = li.build_jump_basis(gamma, 4)
for k in range(len(basis)):
    print(f"P_{k}(t) coefficients (constant first): {[str(c) for c in basis.coefficients[k]]}")

a = chaos.StepFunction(pr.Partition.uniform(2), [0.5, 1.5])
est = li.subordinator_laplace_mc(gamma, a, 100_000, seed=3, eps=1e-6)
print(f"\nE exp(-<a, gamma>) = {est.exact:.6f}, Monte Carlo {est.mean:.6f} +- {est.stderr:.6f}")

three = pr.LevySpec.subordinator(pr.FiniteAtomic((0.5, 1.0, 2.0), (1.0, 0.5, 0.25)))
for name, spec in (("Dirac(1)", pr.LevySpec.poisson()), ("three atoms", three), ("gamma", gamma),
                   ("three atoms + Gaussian", pr.LevySpec(0.0, 1.0, three.levy_measure))):
    print(f"dimension of {name:24s} {li.dimension_invariant(spec)}")
