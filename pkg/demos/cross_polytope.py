"""Functionals of the canonical cover of the cross-polytope under several laws.

Run: python demos/cross_polytope.py
"""

from hullcover import RandomFamily, canonical_cover, compare
from hullcover.geometry import L1Ball

LAWS = ["gaussian", "rademacher", "weibull shape=0.5", "student df=9"]

print(f"{'law':<20}{'n':>5}{'b_X(T)':>10}{'M_X(S)':>10}{'M/b':>8}")
for law in LAWS:
    fam = RandomFamily.parse(law)
    for n in (2, 8, 32, 128):
        rep = compare(L1Ball(n), canonical_cover(n), fam, count=100_000, seed=1)
        print(f"{law:<20}{n:>5}{rep.b_sup.value:>10.4f}{rep.m_big.value:>10.4f}{rep.ratio:>8.3f}")
