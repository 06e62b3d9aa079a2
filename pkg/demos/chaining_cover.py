"""Partition tree of a random finite set and the cover read off its chains.

Run: python demos/chaining_cover.py
"""

import numpy as np

from hullcover import RandomFamily
from hullcover.constructions import extract_cover_from_partition, gamma_bruteforce, gamma_partition
from hullcover.functionals import b_sup, little_m
from hullcover.geometry import FinitePointSet, member_abs_hull

fam = RandomFamily.gaussian()
P = np.random.default_rng(7).standard_normal((24, 5))

g = gamma_partition(P, fam)
print("cells per level:", g.tree.cell_counts())
print(f"chaining bound    {g.gamma_upper:.4f}")
print(f"b_X(T)            {b_sup(FinitePointSet(P), fam, count=200_000).value:.4f}")

ex = extract_cover_from_partition(g.tree, fam)
print(f"extracted |S|     {ex.cover.size}  radius {ex.radius:.4f}")
print(f"m_X(S)            {little_m(ex.cover.points, fam).estimate.value:.4f}")
ok = all(member_abs_hull(P[i] - P[j], ex.cover.points, tol=1e-7).member
         for i in range(len(P)) for j in range(len(P)) if i != j)
print("T - T inside conv(S u -S):", ok)

small = P[:4]
print(f"4 points: greedy {gamma_partition(small, fam).gamma_upper:.4f}"
      f"  exhaustive {gamma_bruteforce(small, fam):.4f}")
