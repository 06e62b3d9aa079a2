"""Estimators for ``M~_X(S)``, ``M_X(S)``, ``m_X(S)`` and ``b_X(T)``.

Everything about ``M~`` and ``M`` is driven by one curve,

    F(m) = sum_{t in S} E|X_t| 1{|X_t| >= m},

which is evaluated in closed form where the law allows it and otherwise from
a single set of samples reused at every threshold (common random numbers).
With one shared curve the two functionals obey ``M~ <= M <= 2 M~`` exactly,
not just up to noise.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .distributions import (
    DEFAULT_MC, RandomFamily, iter_sample_chunks, sample_matrix, stable_scale,
)
from .estimate import Z_CI, Estimate, combined_stderr
from .geometry import HullCover, IndexSet

BISECTION_DEPTH = 40
# geometric threshold grid: points per octave and number of octaves
GRID_PER_OCTAVE = 16
GRID_OCTAVES = 48
# points of the grid scanned by big_m inside [m~/16, 16 m~]
BIG_M_GRID = 64
# at most this many entries are kept for exact evaluation of a Monte-Carlo curve
KEEP_LIMIT = 30_000_000
# entries of |X S^T| materialized at once
BLOCK_ENTRIES = 2_000_000


# ---------------------------------------------------------------------------
# truncation curves
# ---------------------------------------------------------------------------

class TruncationCurve:
    """``F(m)`` together with its standard error.

    ``grid`` is an ascending geometric grid on which ``F`` is always available;
    off the grid, call :meth:`ensure` with a lower bound first.
    """

    total: float
    total_stderr: float = 0.0
    count: int = 0
    seed: int = 0
    grid: np.ndarray

    @functools.cached_property
    def grid_values(self) -> np.ndarray:
        return np.array([self(g) for g in self.grid])

    def ensure(self, lo: float) -> bool:
        return True

    def __call__(self, m: float) -> float:
        raise NotImplementedError

    def stderr(self, m: float) -> float:
        return 0.0

    def kept_above(self, lo: float) -> float:
        """Number of stored entries an :meth:`ensure` at ``lo`` would need."""
        return 0.0

    def breakpoints(self, lo: float, hi: float) -> Optional[np.ndarray]:
        """Jump points of a piecewise-constant curve in ``[lo, hi]``."""
        return None

    def _make_grid(self, top: float) -> None:
        j = np.arange(GRID_PER_OCTAVE * GRID_OCTAVES, -1, -1)
        self.grid = top * 2.0 ** (-j / GRID_PER_OCTAVE)


class _ZeroCurve(TruncationCurve):
    def __init__(self, seed):
        self.total, self.seed = 0.0, seed
        self._make_grid(1.0)

    def __call__(self, m):
        return 0.0


class _ClosedCurve(TruncationCurve):
    """Sum of scaled closed-form scalar tails: ``sum_t c_t g(m / c_t)``."""

    def __init__(self, coefs: np.ndarray, family: RandomFamily, seed: int):
        self.coefs = coefs
        self.family = family
        self.seed = seed
        self.total = float(self(0.0))
        self._make_grid(2 * max(self.total, coefs.max()))

    def __call__(self, m):
        # tiny coefficients overflow m / c harmlessly: the tail is then 0
        with np.errstate(over="ignore", divide="ignore"):
            return float(np.sum(self.coefs * self.family.scalar_tail_mean(m / self.coefs)))


class _GaussianCurve(_ClosedCurve):
    def __init__(self, sigmas: np.ndarray, seed: int):
        self.sigmas = sigmas
        self.seed = seed
        self.total = float(math.sqrt(2 / math.pi) * sigmas.sum())
        self._make_grid(2 * max(self.total, sigmas.max()))

    def __call__(self, m):
        s = self.sigmas
        with np.errstate(over="ignore", divide="ignore", under="ignore"):
            return float(math.sqrt(2 / math.pi) * np.sum(s * np.exp(-(m * m) / (2 * s * s))))


class _ScalarSampleCurve(TruncationCurve):
    """``F(m) = sum_t c_t g(m / c_t)`` with ``g(v) = E|X_1| 1{|X_1| >= v}``
    estimated from one scalar sample shared by all ``t``.

    Used for stable laws, where ``X_t`` has the law of ``||t||_p X_1``.
    """

    def __init__(self, coefs, family, count, seed, tag):
        self.coefs = np.sort(coefs)
        self.count, self.seed = count, seed
        x = np.sort(np.abs(sample_matrix(family, 1, count, seed, tag=tag)[:, 0]))
        self._x = x
        # suffix sums: _xs[i] = sum of x[i:]
        self._xs = np.concatenate([np.cumsum(x[::-1])[::-1], [0.0]])
        self._cs = np.concatenate([np.cumsum(self.coefs[::-1])[::-1], [0.0]])
        self.total = float(self.coefs.sum() * x.mean())
        self.total_stderr = float(self.coefs.sum() * x.std(ddof=1) / math.sqrt(count))
        top = max(self.coefs.max() * x[-1], self.total)
        self._make_grid(2 * top)

    def __call__(self, m):
        if m <= 0:
            return self.total
        idx = np.searchsorted(self._x, m / self.coefs, side="left")
        return float(np.sum(self.coefs * self._xs[idx]) / self.count)

    def _per_sample(self, m):
        x = self._x
        with np.errstate(divide="ignore"):
            v = np.where(x > 0, m / np.where(x > 0, x, 1.0), np.inf)
        idx = np.searchsorted(self.coefs, v, side="left")
        return x * self._cs[idx]

    def stderr(self, m):
        if m <= 0:
            return self.total_stderr
        z = self._per_sample(m)
        return float(z.std(ddof=1) / math.sqrt(self.count))


class _MonteCarloCurve(TruncationCurve):
    """Empirical ``F`` from ``count`` draws of ``X``, all thresholds sharing
    the same draws.

    A first pass histograms ``|X_t|`` on the grid, which gives ``F`` there.
    :meth:`ensure` replays the identical samples and keeps every entry
    ``|X_t| >= lo``, after which ``F`` is exact for the empirical measure at
    any ``m >= lo``. Standard errors below ``lo`` come from one more replay.
    """

    def __init__(self, S, family, count, seed, tag, workers):
        self.S, self.family = S, family
        self.count, self.seed, self.tag, self.workers = count, seed, tag, workers
        top = 2 * family.scale * float(np.linalg.norm(S, axis=1).sum())
        self._make_grid(top)
        G = len(self.grid)
        mass = np.zeros(G + 1)
        hits = np.zeros(G + 1)
        tot = tot2 = 0.0
        for _, A in self._blocks():
            z0 = A.sum(axis=1)
            tot += z0.sum()
            tot2 += (z0 * z0).sum()
            b = self._bin(A.ravel())  # 0 .. G
            mass += np.bincount(b, weights=A.ravel(), minlength=G + 1)
            hits += np.bincount(b, minlength=G + 1)
        # an entry in bin b is >= grid[j] exactly for j < b
        self.total = tot / count
        self.total_stderr = _se(tot, tot2, count)
        self.grid_values = np.cumsum(mass[:0:-1])[::-1] / count
        self._grid_counts = np.cumsum(hits[:0:-1])[::-1]
        self._lo = math.inf
        self._se_cache = {}

    def _bin(self, a):
        """``searchsorted(grid, a, side="right")`` for the geometric grid: a
        log2 guess followed by an exact one-step correction."""
        g = self.grid
        G = len(g)
        with np.errstate(divide="ignore"):
            b = np.floor((G - 1) + GRID_PER_OCTAVE * np.log2(a / g[-1])) + 1
        b = np.clip(np.nan_to_num(b, nan=0.0, neginf=0.0), 0, G).astype(np.intp)
        gp = np.concatenate([[-np.inf], g, [np.inf]])
        b -= gp[b] > a          # grid[b - 1] must be <= a
        b += gp[b + 1] <= a     # grid[b] must be > a
        return b

    def _blocks(self):
        n = self.S.shape[1]
        rows = max(1, BLOCK_ENTRIES // max(1, len(self.S)))
        for start, X in iter_sample_chunks(self.family, n, self.count, self.seed,
                                           self.tag, self.workers):
            for lo in range(0, len(X), rows):
                yield start + lo, np.abs(X[lo: lo + rows] @ self.S.T)

    def kept_above(self, lo):
        j = np.searchsorted(self.grid, lo, side="right") - 1
        if j < 0:
            return float(len(self.S) * self.count)
        return float(self._grid_counts[j])

    def ensure(self, lo):
        if lo >= self._lo:
            return True
        if self.kept_above(lo) > KEEP_LIMIT:
            return False
        vals, rows = [], []
        for start, A in self._blocks():
            r, c = np.nonzero(A >= lo)
            vals.append(A[r, c])
            rows.append(r + start)
        v = np.concatenate(vals)
        r = np.concatenate(rows)
        order = np.argsort(-v, kind="stable")
        self._vals, self._rows = v[order], r[order]
        self._csum = np.concatenate([[0.0], np.cumsum(self._vals)])
        self._lo = lo
        return True

    def _n_above(self, m, strict=False):
        # kept entries >= m (> m when strict); values are sorted descending
        return np.searchsorted(-self._vals, -np.asarray(m), side="left" if strict else "right")

    def strict_values(self, pts):
        """``F`` just above each point, entries equal to the point excluded."""
        return self._csum[self._n_above(pts, strict=True)] / self.count

    def _grid_index(self, m):
        j = np.searchsorted(self.grid, m)
        if j < len(self.grid) and self.grid[j] == m:
            return j
        return None

    def __call__(self, m):
        if m <= 0:
            return self.total
        if m >= self._lo:
            return float(self._csum[self._n_above(m)] / self.count)
        j = self._grid_index(m)
        if j is None:
            raise ValueError(f"F({m}) not available; call ensure() first")
        return float(self.grid_values[j])

    def stderr(self, m):
        if m <= 0:
            return self.total_stderr
        if m >= self._lo:
            k = int(self._n_above(m))
            z = np.bincount(self._rows[:k], weights=self._vals[:k], minlength=self.count)
            return float(z.std(ddof=1) / math.sqrt(self.count))
        if m not in self._se_cache:
            s = s2 = 0.0
            for _, A in self._blocks():
                z = np.where(A >= m, A, 0.0).sum(axis=1)
                s += z.sum()
                s2 += (z * z).sum()
            self._se_cache[m] = _se(s, s2, self.count)
        return self._se_cache[m]

    def breakpoints(self, lo, hi):
        if lo < self._lo:
            return None
        v = self._vals
        return np.unique(v[(v >= lo) & (v <= hi)])


def _se(s, s2, n):
    if n < 2:
        return 0.0
    var = max(s2 / n - (s / n) ** 2, 0.0) * n / (n - 1)
    return math.sqrt(var / n)


def truncation_curve(
    S, family: RandomFamily, *, count: int = DEFAULT_MC, seed: int = 0,
    tag: str = "functional", workers: int = 1,
) -> TruncationCurve:
    """Build ``F(m) = sum_t E|X_t| 1{|X_t| >= m}`` for the point list ``S``.

    Duplicated points are kept: the sum runs over the multiset.
    """
    S = np.atleast_2d(np.asarray(S, dtype=float))
    if not np.all(np.isfinite(S)):
        raise ValueError("points must be finite")
    S = S[np.any(S != 0, axis=1)]
    if len(S) == 0:
        return _ZeroCurve(seed)
    if family.kind == "gaussian":
        return _GaussianCurve(family.scale * np.linalg.norm(S, axis=1), seed)
    if family.kind == "stable":
        p = family.params[0]
        coefs = np.array([stable_scale(t, p) for t in S])
        return _ScalarSampleCurve(coefs, family, count, seed, tag)
    if np.all(np.count_nonzero(S, axis=1) == 1):
        return _ClosedCurve(np.abs(S).max(axis=1), family, seed)
    return _MonteCarloCurve(S, family, count, seed, tag, workers)


# ---------------------------------------------------------------------------
# M~ and M
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Solution:
    m_tilde: Estimate
    m_big: Estimate
    argmin_u: float


def _tilde_bracket(curve: TruncationCurve) -> tuple[float, float]:
    g, F = curve.grid, curve.grid_values
    ok = np.flatnonzero(F <= g)
    if len(ok) == 0:
        raise ArithmeticError("sum of truncated means exceeds every threshold (diverging sum)")
    j = ok[0]
    if j == 0:
        return 0.0, float(g[0])
    return float(g[j - 1]), float(g[j])


def solve(curve: TruncationCurve) -> Solution:
    """Compute ``M~`` (root of ``F(m) = m``) and ``M`` (``inf_u u + F(u)``).

    ``M`` is minimized over ``u -> 0``, ``u = M~`` and a geometric grid on
    ``[M~/16, 16 M~]``. Empirical curves are then minimized exactly over their
    jump points (on the whole window when the kept entries fit in memory,
    otherwise next to the best grid point); smooth curves are refined by a
    bounded scalar search next to the best grid point.
    """
    seed, count = curve.seed, curve.count
    if curve.total == 0:
        z = Estimate(0.0, 0.0, count, seed)
        return Solution(z, z, 0.0)

    lo, hi = _tilde_bracket(curve)
    g = curve.grid
    win = np.flatnonzero((g >= hi / 16) & (g <= 16 * hi))
    obj = g[win] + curve.grid_values[win]
    j_best = win[int(np.argmin(obj))]
    a = float(g[max(j_best - 1, 0)])
    b = float(g[min(j_best + 1, len(g) - 1)])
    empirical = isinstance(curve, _MonteCarloCurve)
    if empirical and curve.ensure(min(lo, float(g[win[0]]))):
        a, b = float(g[win[0]]), float(g[win[-1]])
        refine_big = True
    else:
        refine_big = curve.ensure(min(lo, a))
        if not refine_big and not curve.ensure(lo):
            raise MemoryError("too many tail entries to bracket M~")

    for _ in range(BISECTION_DEPTH):
        mid = 0.5 * (lo + hi)
        if curve(mid) <= mid:
            hi = mid
        else:
            lo = mid
    mt = hi
    if empirical:
        # exact infimum on a step curve: last jump v below hi, then the
        # constant value F(> v) if that lies above v
        inside = curve.breakpoints(lo, hi)
        inside = inside[inside < hi]
        v = float(inside.max()) if len(inside) else lo
        mt = max(v, float(curve.strict_values(v)))
    m_tilde = Estimate(mt, curve.stderr(mt), count, seed)

    cands = [(curve.total, 0.0), (mt + curve(mt), mt),
             (float(g[j_best] + curve.grid_values[j_best]), float(g[j_best]))]
    if refine_big:
        bp = curve.breakpoints(a, b)
        if bp is not None:
            if len(bp):
                # on a left-continuous step curve the infimum over the step
                # just above a jump v is v + F(> v)
                vals = bp + curve.strict_values(bp)
                i = int(np.argmin(vals))
                cands.append((float(vals[i]), float(bp[i])))
            cands.append((a + curve(a), a))
            cands.append((mt + float(curve.strict_values(mt)), mt))
        else:
            res = minimize_scalar(lambda u: u + curve(u), bounds=(a, b), method="bounded",
                                  options={"xatol": 1e-10 * max(b, 1e-300)})
            cands.append((float(res.fun), float(res.x)))
    value, u = min(cands)
    m_big = Estimate(value, curve.stderr(u), count, seed)
    return Solution(m_tilde, m_big, u)


def tilde_m(
    S, family: RandomFamily, *, count: int = DEFAULT_MC, seed: int = 0, workers: int = 1,
) -> Estimate:
    """``M~_X(S) = inf{m > 0 : sum_t E|X_t| 1{|X_t| >= m} <= m}``.

    The reported standard error is that of ``F`` at the root, an upper bound
    for the root's own error because ``F`` is nonincreasing.
    """
    return solve(truncation_curve(S, family, count=count, seed=seed, workers=workers)).m_tilde


def big_m(
    S, family: RandomFamily, *, count: int = DEFAULT_MC, seed: int = 0, workers: int = 1,
) -> Estimate:
    """``M_X(S) = inf_{u > 0} [u + sum_t E|X_t| 1{|X_t| >= u}]``."""
    return solve(truncation_curve(S, family, count=count, seed=seed, workers=workers)).m_big


# ---------------------------------------------------------------------------
# m_X
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LittleM:
    estimate: Estimate
    ordering: tuple
    mode: str


def _norm_table(S, family, count, seed):
    """``w[t, i] = ||X_t||_{log(e + i + 1)}`` for positions ``i = 0 .. N-1``."""
    N = len(S)
    p = np.log(np.e + np.arange(1, N + 1))
    if p[-1] >= family.moment_limit:
        raise ValueError(
            f"||X_t||_{p[-1]:.3g} is infinite for {family.describe()}")
    nz = np.count_nonzero(S, axis=1)
    if family.kind in ("gaussian", "stable") or np.all(nz <= 1):
        if family.kind == "gaussian":
            c = np.linalg.norm(S, axis=1)
        elif family.kind == "stable":
            c = np.array([stable_scale(t, family.params[0]) for t in S])
        else:
            c = np.abs(S).max(axis=1)
        base = np.array([family.norm(q) for q in p])
        return np.outer(c, base), np.zeros((N, N)), 0
    Y = np.abs(sample_matrix(family, S.shape[1], count, seed, tag="little-m") @ S.T)
    with np.errstate(divide="ignore"):
        logY = np.log(Y)
    w = np.empty((N, N))
    se = np.empty((N, N))
    for i, q in enumerate(p):
        Yq = np.exp(q * logY)
        mean = Yq.mean(axis=0)
        sd = Yq.std(axis=0, ddof=1) / math.sqrt(count)
        w[:, i] = mean ** (1 / q)
        with np.errstate(divide="ignore", invalid="ignore"):
            se[:, i] = np.where(mean > 0, w[:, i] / (q * mean) * sd, 0.0)
    return w, se, count


def _local_search(w, order):
    order = list(order)
    N = len(order)
    improved = True
    sweeps = 0
    while improved and sweeps < 10 * N + 10:
        improved = False
        sweeps += 1
        for i in range(N - 1):
            a, b = order[i], order[i + 1]
            cur = max(w[a, i], w[b, i + 1])
            new = max(w[b, i], w[a, i + 1])
            if new < cur * (1 - 1e-12):
                order[i], order[i + 1] = b, a
                improved = True
    return order


def little_m(
    S, family: RandomFamily, *, mode: str = "heuristic", count: int = 50_000, seed: int = 0,
) -> LittleM:
    """``m_X(S) = inf over orderings of sup_i ||X_{t_i}||_{log(e + i)}``.

    ``heuristic`` orders by nonincreasing ``||X_t||_2`` and then applies
    adjacent swaps until none helps; ``exact-small`` tries every ordering
    (``|S| <= 8``).
    """
    S = np.atleast_2d(np.asarray(S, dtype=float))
    N = len(S)
    if mode not in ("heuristic", "exact-small"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exact-small" and N > 8:
        raise ValueError("exact-small enumeration needs |S| <= 8")
    w, se, used = _norm_table(S, family, count, seed)
    cols = np.arange(N)
    if mode == "exact-small":
        perms = np.array(list(itertools.permutations(range(N))))
        vals = w[perms, cols].max(axis=1)
        best = perms[int(np.argmin(vals))]
    else:
        l2 = family.scale * np.linalg.norm(S, axis=1) if family.variance < math.inf else w[:, 0]
        start = sorted(range(N), key=lambda t: (-l2[t], t))
        best = np.array(_local_search(w, start))
    terms = w[best, cols]
    k = int(np.argmax(terms))
    est = Estimate(float(terms[k]), float(se[best[k], k]), used, seed)
    return LittleM(est, tuple(int(i) for i in best), mode)


# ---------------------------------------------------------------------------
# b_X(T)
# ---------------------------------------------------------------------------

def b_sup(
    T: IndexSet, family: RandomFamily, *, count: int = DEFAULT_MC, seed: int = 0,
    workers: int = 1,
) -> Estimate:
    """``b_X(T) = E sup_{t in T} <t, X>`` as a Monte-Carlo mean of ``h_T(X)``."""
    if family.moment_limit <= 1:
        raise ValueError("E h_T(X) is infinite for this law")
    s = s2 = 0.0
    for _, X in iter_sample_chunks(family, T.dim, count, seed, "b-sup", workers):
        h = T.support(X)
        s += h.sum()
        s2 += (h * h).sum()
    return Estimate(float(s / count), _se(s, s2, count), count, seed)


def stable_ball_mean(n: int, family: RandomFamily, *, count: int = DEFAULT_MC, seed: int = 0) -> Estimate:
    """``E|X|_2`` for i.i.d. symmetric p-stable coordinates via the Gaussian
    mixing identity ``E|X| = sqrt(pi/2) E|X_1| E||G||_p``.

    Only the light-tailed factor ``E||G||_p`` is sampled, so this is a
    low-variance cross-check for :func:`b_sup` on ``B_2^n``.
    """
    if family.kind != "stable":
        raise ValueError("stable_ball_mean needs a stable law")
    p = family.params[0]
    g = sample_matrix(RandomFamily.gaussian(), n, count, seed, tag="stable-ball")
    norms = np.sum(np.abs(g) ** p, axis=1) ** (1 / p)
    c = math.sqrt(math.pi / 2) * family.abs_moment(1.0)
    return Estimate(float(c * norms.mean()), float(c * norms.std(ddof=1) / math.sqrt(count)), count, seed)


# ---------------------------------------------------------------------------
# comparison report
# ---------------------------------------------------------------------------

@dataclass
class FunctionalReport:
    m_tilde: Estimate
    m_big: Estimate
    m_little: Optional[Estimate] = None
    b_sup: Optional[Estimate] = None
    sandwich_ok: bool = True
    violation: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def ratio(self) -> Optional[float]:
        if self.b_sup is None or self.b_sup.value == 0:
            return None
        return self.m_big.value / self.b_sup.value

    def to_dict(self) -> dict:
        d = {
            "m_tilde": self.m_tilde.to_dict(),
            "m_big": self.m_big.to_dict(),
            "m_little": None if self.m_little is None else self.m_little.to_dict(),
            "b_sup": None if self.b_sup is None else self.b_sup.to_dict(),
            "sandwich_ok": self.sandwich_ok,
            "violation": self.violation,
            "ratio": self.ratio,
        }
        d.update(self.extra)
        return d

    def table(self) -> str:
        lines = [f"{'functional':<12}{'value':>14}{'stderr':>12}{'ci_low':>14}{'ci_high':>14}"]
        for name, est in (("M~_X(S)", self.m_tilde), ("M_X(S)", self.m_big),
                          ("m_X(S)", self.m_little), ("b_X(T)", self.b_sup)):
            if est is None:
                continue
            lo, hi = est.ci
            lines.append(f"{name:<12}{est.value:>14.6g}{est.stderr:>12.4g}{lo:>14.6g}{hi:>14.6g}")
        if self.ratio is not None:
            lines.append(f"{'M/b':<12}{self.ratio:>14.6g}")
        lines.append(f"sandwich_ok={self.sandwich_ok} violation={self.violation}")
        return "\n".join(lines)


def sandwich_holds(m_tilde: Estimate, m_big: Estimate, z: float = Z_CI) -> bool:
    """``M~ <= M <= 2 M~`` up to ``z`` combined standard errors."""
    se = combined_stderr(m_tilde, m_big)
    return (m_tilde.value <= m_big.value + z * se) and (m_big.value <= 2 * m_tilde.value + z * se)


def compare(
    T: IndexSet, cover: HullCover, family: RandomFamily, *, count: int = DEFAULT_MC,
    seed: int = 0, little: Optional[str] = None, b_count: Optional[int] = None,
    workers: int = 1,
) -> FunctionalReport:
    """All functionals for ``(T, S)`` and the check ``b_X(T) <= M_X(S)``.

    ``little`` selects an ``m_X`` mode (``None`` skips it). A violation is
    flagged when ``b_X(T)`` exceeds ``M_X(S)`` by more than four combined
    standard errors, which would contradict the claimed containment.
    """
    curve = truncation_curve(cover.points, family, count=count, seed=seed, workers=workers)
    sol = solve(curve)
    ml = None
    if little is not None:
        ml = little_m(cover.points, family, mode=little, count=min(count, 50_000), seed=seed).estimate
    b = b_sup(T, family, count=b_count or count, seed=seed, workers=workers)
    viol = b.value > sol.m_big.value + 4 * combined_stderr(b, sol.m_big)
    return FunctionalReport(
        sol.m_tilde, sol.m_big, ml, b, sandwich_holds(sol.m_tilde, sol.m_big), bool(viol),
    )
