"""Index sets, hull covers and containment checks.

An index set ``T`` is only ever touched through its support function
``h_T(x) = sup_{t in T} <t, x>``; ``b_X(T) = E h_T(X)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .rng import chunk_bounds, stream

PROVENANCES = (
    "Canonical", "Net", "BlockB2", "RotationB2", "EllipsoidDyadic", "LqEmbed", "GammaExtract",
)

# covers with more points than this use the conditional-gradient membership test
LP_POINT_LIMIT = 100_000


def holder_dual(q: float) -> float:
    """Conjugate exponent ``q' = q / (q - 1)`` (``1`` for ``q = inf``)."""
    if q == math.inf:
        return 1.0
    if q <= 1:
        raise ValueError("q must exceed 1")
    return q / (q - 1)


def _pnorm_rows(y: np.ndarray, p: float) -> np.ndarray:
    y = np.abs(y)
    if p == 1:
        return y.sum(axis=-1)
    if p == 2:
        return np.sqrt((y * y).sum(axis=-1))
    if p == math.inf:
        return y.max(axis=-1)
    # factor out the max for stability at large p
    m = y.max(axis=-1, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    return (m[..., 0] * ((y / safe) ** p).sum(axis=-1) ** (1 / p))


# ---------------------------------------------------------------------------
# index sets
# ---------------------------------------------------------------------------

class IndexSet:
    """Bounded ``T`` in R^n with a closed-form support function."""

    kind = "IndexSet"

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def _support(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def support(self, x):
        """``h_T(x)``; ``x`` may be one vector or a matrix of row vectors."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"dimension mismatch: expected {self.dim}, got {x.shape[-1]}")
        if x.ndim == 1:
            return float(self._support(x[None, :])[0])
        return self._support(x)

    def scaled(self, c: float) -> "IndexSet":
        raise NotImplementedError

    def vertices(self) -> Optional[np.ndarray]:
        """Extreme points, for sets that have finitely many."""
        return None

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(eq=False)
class L1Ball(IndexSet):
    n: int
    radius: float = 1.0
    kind = "L1Ball"

    @property
    def dim(self):
        return self.n

    def _support(self, x):
        return self.radius * np.abs(x).max(axis=1)

    def scaled(self, c):
        return L1Ball(self.n, self.radius * c)

    def vertices(self):
        e = self.radius * np.eye(self.n)
        return np.vstack([e, -e])

    def to_dict(self):
        return {"kind": self.kind, "n": self.n, "radius": self.radius}


@dataclass(eq=False)
class L2Ball(IndexSet):
    n: int
    radius: float = 1.0
    kind = "L2Ball"

    @property
    def dim(self):
        return self.n

    def _support(self, x):
        return self.radius * np.linalg.norm(x, axis=1)

    def scaled(self, c):
        return L2Ball(self.n, self.radius * c)

    def to_dict(self):
        return {"kind": self.kind, "n": self.n, "radius": self.radius}


@dataclass(eq=False)
class LqBall(IndexSet):
    n: int
    q: float
    radius: float = 1.0
    kind = "LqBall"

    def __post_init__(self):
        if not self.q >= 2:
            raise ValueError("q must lie in [2, inf]")

    @property
    def dim(self):
        return self.n

    def _support(self, x):
        return self.radius * _pnorm_rows(x, holder_dual(self.q))

    def scaled(self, c):
        return LqBall(self.n, self.q, self.radius * c)

    def vertices(self):
        if self.q == math.inf and self.n <= 10:
            grid = np.array(np.meshgrid(*[[-1.0, 1.0]] * self.n)).reshape(self.n, -1).T
            return self.radius * grid
        return None

    def to_dict(self):
        return {"kind": self.kind, "n": self.n, "q": _q_out(self.q), "radius": self.radius}


@dataclass(eq=False)
class Ellipsoid(IndexSet):
    """``{t : sum_i <t, u_i>^2 / a_i^2 <= 1}`` with ``u_i`` the columns of ``U``."""

    U: np.ndarray
    a: np.ndarray
    kind = "Ellipsoid"

    def __post_init__(self):
        self.U = np.asarray(self.U, dtype=float)
        self.a = np.asarray(self.a, dtype=float)
        n = len(self.a)
        if self.U.shape != (n, n):
            raise ValueError("U must be n x n with n = len(a)")
        if not np.all(self.a > 0):
            raise ValueError("all semi-axes must be positive")
        if not np.allclose(self.U.T @ self.U, np.eye(n), atol=1e-10, rtol=0):
            raise ValueError("U must be orthonormal")

    @property
    def dim(self):
        return len(self.a)

    def _support(self, x):
        return np.linalg.norm((x @ self.U) * self.a, axis=1)

    def scaled(self, c):
        return Ellipsoid(self.U, self.a * c)

    def to_dict(self):
        return {"kind": self.kind, "U": self.U.tolist(), "a": self.a.tolist()}


@dataclass(eq=False)
class LinearImageLq(IndexSet):
    """``A B_q^n``; its support function is ``||A^T x||_{q'}``."""

    A: np.ndarray
    q: float
    kind = "LinearImageLq"

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        if self.A.ndim != 2 or self.A.shape[0] != self.A.shape[1]:
            raise ValueError("A must be square")
        if not self.q >= 2:
            raise ValueError("q must lie in [2, inf]")

    @property
    def dim(self):
        return self.A.shape[0]

    def _support(self, x):
        return _pnorm_rows(x @ self.A, holder_dual(self.q))

    def scaled(self, c):
        return LinearImageLq(self.A * c, self.q)

    def to_dict(self):
        return {"kind": self.kind, "A": self.A.tolist(), "q": _q_out(self.q)}


@dataclass(eq=False)
class FinitePointSet(IndexSet):
    points: np.ndarray
    kind = "FinitePointSet"

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if len(self.points) == 0:
            raise ValueError("point set must be nonempty")

    @property
    def dim(self):
        return self.points.shape[1]

    def _support(self, x):
        return (x @ self.points.T).max(axis=1)

    def scaled(self, c):
        return FinitePointSet(self.points * c)

    def vertices(self):
        return self.points

    def to_dict(self):
        return {"kind": self.kind, "points": self.points.tolist()}


def _q_out(q):
    return "inf" if q == math.inf else q


def _q_in(q):
    return math.inf if q in ("inf", "Infinity", None) else float(q)


def index_set_from_dict(d: dict) -> IndexSet:
    kind = d["kind"]
    if kind == "L1Ball":
        return L1Ball(int(d["n"]), float(d.get("radius", 1.0)))
    if kind == "L2Ball":
        return L2Ball(int(d["n"]), float(d.get("radius", 1.0)))
    if kind == "LqBall":
        return LqBall(int(d["n"]), _q_in(d["q"]), float(d.get("radius", 1.0)))
    if kind == "Ellipsoid":
        return Ellipsoid(np.array(d["U"]), np.array(d["a"]))
    if kind == "LinearImageLq":
        return LinearImageLq(np.array(d["A"]), _q_in(d["q"]))
    if kind == "FinitePointSet":
        return FinitePointSet(np.array(d["points"]))
    raise ValueError(f"unknown index set kind {kind!r}")


def support(T: IndexSet, x):
    """Support function ``h_T(x)``."""
    return T.support(x)


# ---------------------------------------------------------------------------
# covers
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class HullCover:
    """A center ``t0`` and points ``S`` claiming ``T - t0 ⊂ conv(S ∪ -S)``.

    ``claimed_radius`` is the factor the construction had to apply before the
    points were rescaled; the stored points already include it.
    """

    center: np.ndarray
    points: np.ndarray
    provenance: str
    claimed_radius: float = 1.0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.center = np.asarray(self.center, dtype=float)
        if self.points.ndim != 2:
            self.points = self.points.reshape(-1, len(self.center))
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.points.shape[1] != len(self.center):
            raise ValueError("center and points disagree on dimension")
        if len(self.points) == 0:
            raise ValueError("a cover needs at least one point")

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return len(self.center)

    def scaled(self, c: float) -> "HullCover":
        return HullCover(self.center * c, self.points * c, self.provenance,
                         self.claimed_radius, dict(self.params))

    def to_dict(self) -> dict:
        return {
            "center": self.center.tolist(),
            "points": self.points.tolist(),
            "provenance": self.provenance,
            "claimed_radius": self.claimed_radius,
            "params": _jsonable(self.params),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HullCover":
        center = np.asarray(d["center"], dtype=float)
        pts = np.asarray(d["points"], dtype=float).reshape(-1, len(center))
        return cls(center, pts, d["provenance"], float(d.get("claimed_radius", 1.0)),
                   dict(d.get("params", {})))


def canonical_cover(n: int) -> HullCover:
    """``{e_1, ..., e_n}``, which covers ``B_1^n`` exactly."""
    return HullCover(np.zeros(n), np.eye(n), "Canonical", 1.0, {"n": n})


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    return obj


# ---------------------------------------------------------------------------
# membership and containment
# ---------------------------------------------------------------------------

@dataclass
class Membership:
    member: bool
    weights: Optional[np.ndarray]
    l1: float
    residual: float

    def __bool__(self):
        return self.member


def member_abs_hull(x, S, tol: float = 1e-9, method: str = "auto") -> Membership:
    """Decide whether ``x`` lies within ``tol`` (Euclidean) of ``conv(S ∪ -S)``.

    The LP minimizes ``sum |lambda_i|`` subject to every coordinate of
    ``S^T lambda - x`` lying in ``[-tol/sqrt(n), tol/sqrt(n)]``; ``x`` is a member
    iff the optimum is at most 1 (relative slack 1e-9). Point lists longer than
    :data:`LP_POINT_LIMIT` use a conditional-gradient method instead.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = np.asarray(x, dtype=float)
    S = np.atleast_2d(np.asarray(S, dtype=float))
    if method == "auto":
        method = "lp" if len(S) <= LP_POINT_LIMIT else "fw"
    if method == "lp":
        return _member_lp(x, S, tol)
    if method == "fw":
        return _member_fw(x, S, tol)
    raise ValueError(f"unknown method {method!r}")


def _member_lp(x, S, tol):
    k, n = S.shape
    delta = tol / math.sqrt(n)
    # variables: lambda+ (k), lambda- (k), residual r (n) with |r_i| <= delta
    A_eq = np.hstack([S.T, -S.T, np.eye(n)])
    c = np.concatenate([np.ones(2 * k), np.zeros(n)])
    bounds = [(0, None)] * (2 * k) + [(-delta, delta)] * n
    res = None
    # HiGHS presolve can misreport infeasibility when delta is below its
    # feasibility tolerance, so failures are retried without it
    for method, presolve in (("highs-ds", True), ("highs-ds", False), ("highs-ipm", False)):
        opts = {"presolve": presolve, "primal_feasibility_tolerance": 1e-10,
                "dual_feasibility_tolerance": 1e-10}
        res = linprog(c, A_eq=A_eq, b_eq=x, bounds=bounds, method=method, options=opts)
        if res.status == 0:
            break
    if res.status != 0:
        return Membership(False, None, math.inf, math.inf)
    lam = res.x[:k] - res.x[k: 2 * k]
    l1 = float(np.abs(lam).sum())
    resid = float(np.linalg.norm(S.T @ lam - x))
    return Membership(l1 <= 1 + 1e-9, lam, l1, resid)


def _member_fw(x, S, tol, max_iter=200_000):
    k = len(S)
    lam = np.zeros(k)
    y = np.zeros_like(x)
    target = tol * tol / 2
    for _ in range(max_iter):
        g = y - x
        if 0.5 * g @ g <= target:
            break
        scores = S @ g
        i = int(np.argmax(np.abs(scores)))
        # -g separates: dist(x, hull) >= (<-g, x> - max_s |<s, g>|) / |g|
        if (-(g @ x) - abs(scores[i])) > tol * math.sqrt(g @ g):
            break
        sgn = -np.sign(scores[i]) or 1.0
        v = sgn * S[i]
        d = v - y
        gap = -(g @ d)
        if gap < target:
            break
        step = min(1.0, gap / (d @ d))
        lam *= 1 - step
        lam[i] += step * sgn
        y = y + step * d
    resid = float(np.linalg.norm(y - x))
    return Membership(resid <= tol, lam, float(np.abs(lam).sum()), resid)


@dataclass
class ProbeReport:
    worst_ratio: float
    witness: np.ndarray
    directions: int
    exact_ok: Optional[bool] = None

    def consistent(self, tol: float = 1e-2) -> bool:
        ok = self.worst_ratio <= 1 + tol
        return ok and self.exact_ok is not False

    def to_dict(self) -> dict:
        return {"worst_ratio": _jsonable(self.worst_ratio), "witness": self.witness.tolist(),
                "directions": self.directions, "exact_ok": self.exact_ok}


def random_directions(count: int, n: int, seed: int, tag: str = "directions") -> np.ndarray:
    """``count`` uniform unit vectors in R^n (normalized Gaussians)."""
    out = np.empty((count, n))
    for c, (lo, hi) in enumerate(chunk_bounds(count)):
        out[lo:hi] = stream(seed, tag, c).standard_normal((hi - lo, n))
    out /= np.linalg.norm(out, axis=1, keepdims=True)
    return out


def containment_probe(
    T: IndexSet, cover: HullCover, directions: int = 10_000, seed: int = 0,
    exact_limit: int = 2_000,
) -> ProbeReport:
    """Statistical falsifier for ``T - t0 ⊂ conv(S ∪ -S)``.

    Returns the worst ratio ``h_{T - t0}(x) / max_s |<s, x>|`` over random unit
    directions; a ratio above 1 is a disproof with ``witness`` as the
    separating direction. When ``T`` has at most ``exact_limit`` extreme points
    each of them is also checked with :func:`member_abs_hull`.
    """
    if directions < 1:
        raise ValueError("directions must be >= 1")
    if T.dim != cover.dim:
        raise ValueError("index set and cover dimensions differ")
    S = cover.points
    worst, witness = -math.inf, None
    block = max(1, min(4096, 4_000_000 // max(1, len(S))))
    D = random_directions(directions, T.dim, seed, tag="probe")
    for lo in range(0, directions, block):
        d = D[lo: lo + block]
        num = T.support(d) - d @ cover.center
        den = np.abs(d @ S.T).max(axis=1) if len(S) else np.zeros(len(d))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(den > 0, num / np.where(den > 0, den, 1.0),
                             np.where(num > 0, math.inf, 0.0))
        i = int(np.argmax(ratio))
        if ratio[i] > worst:
            worst, witness = float(ratio[i]), d[i].copy()
    exact_ok = None
    verts = T.vertices()
    if verts is not None and len(verts) <= exact_limit:
        exact_ok = all(
            member_abs_hull(v - cover.center, S, tol=1e-7).member for v in verts
        ) if len(S) else False
    return ProbeReport(worst, witness, directions, exact_ok)


def haar_orthogonal(n: int, seed: int) -> np.ndarray:
    """Haar-distributed orthogonal ``n x n`` matrix.

    QR of a Gaussian matrix, with column signs fixed so that ``R`` has a
    positive diagonal; that makes the factorization unique and the law of
    ``Q`` exactly Haar.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    G = stream(seed, "haar").standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs
