"""Rotated block cover of the Euclidean ball, light and heavy tails side by side.

For a Gaussian law M_X(S) / sqrt(n) stays flat. For a 1.5-stable law the same
construction drifts upward while b_X(B_2^n) grows like n^(1/p).

Run: python demos/euclidean_ball.py
"""

import math
import warnings

from hullcover import RandomFamily, containment_probe, rotation_cover_b2
from hullcover.functionals import b_sup, solve, stable_ball_mean, truncation_curve
from hullcover.geometry import L2Ball

warnings.simplefilter("ignore", RuntimeWarning)

for law in ("gaussian", "stable p=1.5"):
    fam = RandomFamily.parse(law)
    print(law)
    print(f"{'n':>5}{'|S|':>7}{'probe':>8}{'b_X':>10}{'M_X':>10}{'M/sqrt n':>10}{'M/b':>8}")
    for n in (8, 16, 32, 64):
        cover, _ = rotation_cover_b2(n, fam, trials=16, seed=0)
        probe = containment_probe(L2Ball(n), cover, 4000, seed=0)
        m = solve(truncation_curve(cover.points, fam, count=100_000, seed=0)).m_big.value
        if fam.kind == "stable":
            b = stable_ball_mean(n, fam, count=100_000, seed=0).value
        else:
            b = b_sup(L2Ball(n), fam, count=100_000, seed=0).value
        print(f"{n:>5}{cover.size:>7}{probe.worst_ratio:>8.3f}{b:>10.3f}{m:>10.3f}"
              f"{m / math.sqrt(n):>10.3f}{m / b:>8.3f}")
    print()
