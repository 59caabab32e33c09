"""Isometries between Gaussian white noise and Poisson / Levy noise, at desk scale.

Submodules
----------
combinatorics   permutations, involutions, augmented cycle index
orthopoly       Hermite, Charlier and Laguerre polynomials, quadrature
single_point    the one-cell isometry and its kernel
finite_base     tensor products over finitely many cells
processes       samplers and exact laws on [0, 1]
chaos           generalized Hermite / Charlier functionals and the logarithm
levy_isometry   jump polynomial bases and Levy chaos blocks
nonfock         hierarchical voting schemes
suites, cli     verification suites and the command line
"""
__version__ = "0.1.0"
