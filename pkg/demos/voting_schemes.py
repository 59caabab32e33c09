"""Hierarchical voting: which schemes admit nonconstant additive or multiplicative functionals.

A ballot is an m-ary tree of i.i.d. uniform votes, each internal node holding
phi of its children.  If some composition of one-variable sections of phi is
constant (the scheme is abundant), the only additive solutions are constants,
and no nonconstant multiplicative ones exist.  XOR is the standard contrast:
its sign character is multiplicative.

Run:  python demos/voting_schemes.py
"""
import numpy as np

from levygauss import nonfock as nf

for scheme in (nf.VotingScheme.majority(), nf.VotingScheme.example2(), nf.VotingScheme.xor()):
    v = nf.validate_scheme(scheme)
    ab = nf.is_abundant(scheme)
    sols = nf.antimultiplicative_search(scheme, 2)
    print(f"{scheme.name:9s} valid={v.valid} preimages={v.preimage_counts} abundant={ab.abundant} "
          f"witness={ab.witness} additive-dim={nf.antiadditive_solution_dim(scheme)} "
          f"sign solutions={[s.g_values() for s in sols]}")

tree = nf.sample_ballots(nf.VotingScheme.majority(), 3, seed=4, n=100_000)
for d, level in enumerate(tree.levels):
    print(f"majority depth-3 ballots, level {d}: frequency of vote 1 at the first node = {np.mean(level[:, 0]):.4f}")

balanced = nf.balanced_schemes(2, 3)
abundant = sum(nf.is_abundant(s).abundant for s in balanced)
print(f"\n{len(balanced)} balanced symmetric schemes with m=2, r=3; {abundant} are abundant")
