"""Cover constructions: separated nets, block and rotation covers of the
Euclidean ball, dyadic ellipsoid covers, the l_q -> ellipsoid embedding and
partition trees for the chaining functional with their cover extraction.

Every builder returns a :class:`~hullcover.geometry.HullCover` already scaled
so that ``T - t0 ⊂ conv(S ∪ -S)``.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .distributions import DEFAULT_MC, RandomFamily, sample_matrix, stable_scale
from .geometry import Ellipsoid, FinitePointSet, HullCover, haar_orthogonal, holder_dual
from .rng import derive_seed, ordered_map, stream

log = logging.getLogger(__name__)

MAX_NET_DIM = 12
DEFAULT_NET_BUDGET = 4000
DEFAULT_TRIALS = 64
DEFAULT_C_LOG = 1.0
SELECTION_MC = 4000
_BATCH = 512


# ---------------------------------------------------------------------------
# nets and ball covers
# ---------------------------------------------------------------------------

def _uniform_ball(rng, count, k):
    g = rng.standard_normal((count, k))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * rng.random((count, 1)) ** (1.0 / k)


def separated_net(
    k: int, separation: float = 0.5, budget: int = DEFAULT_NET_BUDGET, seed: int = 0,
    max_dim: int = MAX_NET_DIM,
) -> np.ndarray:
    """Greedy ``separation``-separated subset of ``B_2^k``.

    Candidates are drawn uniformly from the ball and accepted when they are at
    least ``separation`` away from every accepted point; the stream stops after
    ``budget`` consecutive rejections. At separation 1/2 a maximal set has at
    most ``5^k`` points and ``B_2^k ⊂ 2 conv(T)``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > max_dim:
        raise ValueError(f"k={k} exceeds the net dimension limit {max_dim}")
    if not 0 < separation <= 2:
        raise ValueError("separation must lie in (0, 2]")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    return _cached_net(k, float(separation), int(budget), int(seed)).copy()


@functools.lru_cache(maxsize=64)
def _cached_net(k: int, separation: float, budget: int, seed: int) -> np.ndarray:
    sep2 = separation * separation
    pts = np.empty((0, k))
    misses = 0
    chunk = 0
    while misses < budget:
        cand = _uniform_ball(stream(seed, f"net-{k}", chunk), _BATCH, k)
        chunk += 1
        if len(pts):
            d2 = ((cand[:, None, :] - pts[None, :, :]) ** 2).sum(-1).min(axis=1)
            free = d2 >= sep2
        else:
            free = np.ones(len(cand), bool)
        pos = 0
        new = []
        for i in np.flatnonzero(free):
            c = cand[i]
            if all(((c - q) ** 2).sum() >= sep2 for q in new):
                misses += i - pos
                if misses >= budget:
                    break
                new.append(c)
                misses = 0
                pos = i + 1
        else:
            misses += len(cand) - pos
        if new:
            pts = np.vstack([pts, new])
    return pts


def _blocks(n: int, k: int) -> list[range]:
    return [range(s, min(s + k, n)) for s in range(0, n, k)]


def block_cover_b2(
    n: int, k: int, budget: int = DEFAULT_NET_BUDGET, seed: int = 0,
) -> HullCover:
    """Cover of ``B_2^n`` from nets on ``ceil(n/k)`` coordinate blocks.

    Each block carries a 1/2-separated net of its dimension; the union is
    scaled by ``2 sqrt(l)`` with ``l`` the number of blocks.
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    blocks = _blocks(n, k)
    scale = 2.0 * math.sqrt(len(blocks))
    nets = {}
    rows = []
    for blk in blocks:
        d = len(blk)
        if d not in nets:
            nets[d] = separated_net(d, 0.5, budget, seed)
        net = nets[d]
        P = np.zeros((len(net), n))
        P[:, blk.start: blk.stop] = net
        rows.append(P)
    S = scale * np.vstack(rows)
    params = {"n": n, "k": k, "blocks": len(blocks), "budget": budget, "seed": seed,
              "net_sizes": {str(d): len(v) for d, v in nets.items()}}
    return HullCover(np.zeros(n), S, "BlockB2" if n > k else "Net", scale, params)


def block_dimension(n: int, c_log: float = DEFAULT_C_LOG) -> int:
    """``ceil(c_log * ln n)`` clamped to ``[1, n]``."""
    return int(min(max(math.ceil(c_log * math.log(n)), 1), n))


def _threshold_sums(point_sets, family, thr, X, count, seed):
    """``sum_t E|X_t| 1{|X_t| >= thr}`` for each point array in the list."""
    from .functionals import truncation_curve
    out = []
    for P in point_sets:
        if X is None:
            out.append(truncation_curve(P, family, count=count, seed=seed, tag="rotation-select")(thr))
        else:
            A = np.abs(X @ P.T)
            out.append(float(np.where(A >= thr, A, 0.0).sum() / len(X)))
    return out


@dataclass
class RotationDiagnostics:
    sums: list
    chosen: int
    threshold: float

    @property
    def achieved(self) -> float:
        return self.sums[self.chosen]

    @property
    def mean(self) -> float:
        return float(np.mean(self.sums))


def _moment_warning(family: RandomFamily) -> None:
    if family.moment_limit <= 4:
        warnings.warn(
            f"{family.describe()} has no finite moment of order > 4; the rotation "
            "cover carries no size guarantee for it", RuntimeWarning, stacklevel=3)


def rotation_cover_b2(
    n: int, family: RandomFamily, trials: int = DEFAULT_TRIALS, threshold_const: float = 2.0,
    seed: int = 0, budget: int = DEFAULT_NET_BUDGET, c_log: float = DEFAULT_C_LOG,
    selection_mc: int = SELECTION_MC, workers: int = 1,
) -> tuple[HullCover, RotationDiagnostics]:
    """Rotated block cover of ``B_2^n`` with at most ``10 n^2`` points.

    The block cover is built with block size ``ceil(c_log ln n)``; among
    ``trials`` Haar rotations ``U`` the one minimizing
    ``sum_i E|<X, U t_i>| 1{|<X, U t_i>| >= threshold_const sqrt(n)}`` is kept.
    All trials are scored on the same samples of ``X``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    _moment_warning(family)
    k = block_dimension(n, c_log)
    base = block_cover_b2(n, k, budget, seed)
    P = base.points
    cap = 10 * n * n
    if len(P) > cap:
        log.warning("block cover has %d points > 10 n^2 = %d; truncating", len(P), cap)
        warnings.warn(f"cover truncated from {len(P)} to {cap} points", RuntimeWarning, stacklevel=2)
        P = P[:cap]
    thr = threshold_const * math.sqrt(n)
    rots = ordered_map(lambda i: haar_orthogonal(n, derive_seed(seed, "rotation", i)),
                       range(trials), workers)
    rots = list(rots)
    closed = family.kind in ("gaussian", "stable")
    X = None if closed else sample_matrix(family, n, selection_mc, seed, tag="rotation-select")
    sums = _threshold_sums([P @ U.T for U in rots], family, thr, X, selection_mc, seed)
    best = int(np.argmin(sums))
    S = P @ rots[best].T
    params = dict(base.params)
    params.update({"family": family.to_dict(), "trials": trials, "threshold_const": threshold_const,
                   "c_log": c_log, "selection_mc": selection_mc, "chosen_trial": best})
    cover = HullCover(np.zeros(n), S, "RotationB2", base.claimed_radius, params)
    return cover, RotationDiagnostics(sums, best, thr)


# ---------------------------------------------------------------------------
# ellipsoids
# ---------------------------------------------------------------------------

@dataclass
class Block:
    k: int
    indices: np.ndarray
    basis: np.ndarray
    weight: float

    @property
    def size(self) -> int:
        return len(self.indices)


@dataclass
class BlockDecomposition:
    """Dyadic level sets ``I_k = {i : 2^-(k+1) < a_i <= 2^-k}`` of the
    normalized semi-axes with weights ``c_k = 2^(k+2) (2^k + n_k)^(-1/2)``."""

    blocks: list
    total_dim: int
    rescale: float

    def level_mass(self) -> float:
        """``sum_k n_k 4^-k``, which lies in ``[1, 4)``."""
        return float(sum(b.size * 4.0 ** -b.k for b in self.blocks))

    def weight_mass(self) -> float:
        """``sum_k c_k^-2``, at most 1 (below 3/8 in fact)."""
        return float(sum(b.weight ** -2 for b in self.blocks))

    def check(self) -> list[str]:
        bad = []
        for b in self.blocks:
            exact = 2.0 ** (b.k + 2) / math.sqrt(2.0 ** b.k + b.size)
            if b.weight != exact:
                bad.append(f"c_{b.k} differs from its formula")
        if not 1 - 1e-12 <= self.level_mass() < 4:
            bad.append(f"level mass {self.level_mass()} outside [1, 4)")
        if self.weight_mass() > 1:
            bad.append(f"weight mass {self.weight_mass()} > 1")
        return bad

    def to_dict(self) -> dict:
        return {"total_dim": self.total_dim, "rescale": self.rescale,
                "blocks": [{"k": b.k, "indices": b.indices.tolist(), "n_k": b.size,
                            "c_k": b.weight} for b in self.blocks]}


def dyadic_level(a: np.ndarray) -> np.ndarray:
    """Integer ``k`` with ``2^-(k+1) < a <= 2^-k`` for ``a`` in ``(0, 1]``."""
    k = np.floor(-np.log2(a)).astype(int)
    # repair rounding at exact powers of two
    k = np.where(a > 2.0 ** -k, k - 1, k)
    k = np.where(a <= 2.0 ** -(k + 1), k + 1, k)
    return k


def ellipsoid_blocks(a, U=None) -> BlockDecomposition:
    """Dyadic decomposition of the ellipsoid with semi-axes ``a`` along the
    columns of ``U``. ``a`` is rescaled to unit Euclidean norm; zero axes are
    dropped."""
    a = np.asarray(a, dtype=float)
    if np.any(a < 0):
        raise ValueError("semi-axes must be nonnegative")
    norm = float(np.linalg.norm(a))
    if norm == 0:
        raise ValueError("all semi-axes are zero")
    U = np.eye(len(a)) if U is None else np.asarray(U, dtype=float)
    keep = np.flatnonzero(a > 0)
    levels = dyadic_level(a[keep] / norm)
    blocks = []
    for k in np.unique(levels):
        idx = keep[levels == k]
        c = 2.0 ** (k + 2) / math.sqrt(2.0 ** k + len(idx))
        blocks.append(Block(int(k), idx, U[:, idx], c))
    return BlockDecomposition(blocks, len(a), norm)


def ellipsoid_cover(
    E: Ellipsoid, family: RandomFamily, trials: int = DEFAULT_TRIALS, seed: int = 0,
    budget: int = DEFAULT_NET_BUDGET, threshold_const: float = 2.0,
    c_log: float = DEFAULT_C_LOG, workers: int = 1, provenance: str = "EllipsoidDyadic",
) -> HullCover:
    """Cover of an ellipsoid by per-block rotation covers.

    With normalized axes the ellipsoid sits in ``conv(U_k c_k 2^-k B_2^{I_k})``;
    each block ball is replaced by its rotation cover.
    """
    dec = ellipsoid_blocks(E.a, E.U)
    parts = []
    per_block = []
    for b in dec.blocks:
        cov, diag = rotation_cover_b2(
            b.size, family, trials, threshold_const, derive_seed(seed, "block", b.k),
            budget, c_log, workers=workers)
        factor = dec.rescale * b.weight * 2.0 ** -b.k
        parts.append(factor * cov.points @ b.basis.T)
        per_block.append({"k": b.k, "n_k": b.size, "points": cov.size, "chosen_trial": diag.chosen})
    S = np.vstack(parts)
    params = {"family": family.to_dict(), "trials": trials, "seed": seed, "budget": budget,
              "threshold_const": threshold_const, "c_log": c_log,
              "decomposition": dec.to_dict(), "blocks": per_block}
    return HullCover(np.zeros(E.dim), S, provenance, dec.rescale, params)


# ---------------------------------------------------------------------------
# l_q balls
# ---------------------------------------------------------------------------

@dataclass
class LqEmbedding:
    weights: np.ndarray      # diagonal of D
    ellipsoid: Ellipsoid
    scale: float

    @property
    def D(self) -> np.ndarray:
        return np.diag(self.weights)


def lq_embed(A, q: float) -> LqEmbedding:
    """Ellipsoid ``A D B_2^n`` containing ``A B_q^n``.

    Columns are normalized so that ``sum_i |A e_i|^q' = 1``; then
    ``d_i = |A e_i|^(q'/2 - 1)`` satisfies ``D^-1 B_q^n ⊂ B_2^n`` by Hölder.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if q < 2:
        raise ValueError("q must be >= 2")
    qd = holder_dual(q)
    cols = np.linalg.norm(A, axis=0)
    if np.any(cols == 0):
        raise ValueError("A has a zero column")
    s = float(np.sum(cols ** qd) ** (1 / qd))
    d = (cols / s) ** (qd / 2 - 1)
    W, sig, _ = np.linalg.svd(A * d)
    if sig.min() <= 1e-12 * sig.max():
        raise ValueError("A must be nonsingular")
    return LqEmbedding(d, Ellipsoid(W, sig), s)


def lq_cover(A, q: float, family: RandomFamily, **kw) -> HullCover:
    emb = lq_embed(A, q)
    cov = ellipsoid_cover(emb.ellipsoid, family, provenance="LqEmbed", **kw)
    cov.params.update({"q": "inf" if math.isinf(q) else q, "lq_scale": emb.scale,
                       "lq_weights": emb.weights})
    return cov


# ---------------------------------------------------------------------------
# partition trees
# ---------------------------------------------------------------------------

def _pair_coefficients(P):
    i, j = np.triu_indices(len(P), 1)
    return i, j, P[i] - P[j]


def moment_distances(
    points, family: RandomFamily, orders, *, count: int = 50_000, seed: int = 0,
) -> dict:
    """``{p: D}`` with ``D[s, t] = ||X_s - X_t||_p`` for each order ``p``."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    N = len(P)
    orders = [float(p) for p in orders]
    for p in orders:
        if p >= family.moment_limit:
            raise ValueError(f"||X_t||_{p:g} is infinite for {family.describe()}")
    out = {p: np.zeros((N, N)) for p in orders}
    if N < 2:
        return out
    i, j, diff = _pair_coefficients(P)
    nz = np.count_nonzero(diff, axis=1)
    if family.kind == "gaussian":
        c = np.linalg.norm(diff, axis=1)
    elif family.kind == "stable":
        c = np.array([stable_scale(t, family.params[0]) for t in diff])
    elif np.all(nz <= 1):
        c = np.abs(diff).max(axis=1)
    else:
        c = None
    for p in orders:
        if c is not None:
            v = c * family.norm(p)
        else:
            Y = sample_matrix(family, P.shape[1], count, seed, tag="distances") @ diff.T
            v = np.mean(np.abs(Y) ** p, axis=0) ** (1 / p)
        D = out[p]
        D[i, j] = v
        D[j, i] = v
    return out


@dataclass
class PartitionTree:
    """Nested partitions of a finite point set.

    ``labels[n][t]`` is the cell of point ``t`` at level ``n`` and
    ``reps[n][c]`` the index of the representative of cell ``c``;
    ``diameters[n][c]`` is that cell's diameter under ``||X_s - X_t||_{2^n}``.
    """

    points: np.ndarray
    labels: list
    reps: list
    diameters: list
    family: dict = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return len(self.labels) - 1

    def cell_counts(self) -> list[int]:
        return [len(r) for r in self.reps]

    def singletons(self) -> bool:
        return self.cell_counts()[-1] == len(self.points)

    def chain_cost(self) -> np.ndarray:
        """``sum_n diam(A_n(t))`` per point ``t``."""
        return sum(np.asarray(d)[lab] for lab, d in zip(self.labels, self.diameters))

    def to_dict(self) -> dict:
        return {"points": self.points.tolist(),
                "labels": [l.tolist() for l in self.labels],
                "reps": [r.tolist() for r in self.reps],
                "diameters": [d.tolist() for d in self.diameters],
                "family": self.family}


def level_budget(n: int) -> int:
    """``2^(2^n)``, capped to avoid huge integers."""
    return 2 ** (2 ** n) if n < 6 else 2 ** 64


def _farthest_split(idx, first, k, D):
    """Farthest-point clustering of ``idx`` into ``k`` cells under ``D``."""
    centers = [first]
    dist = D[first, idx].copy()
    while len(centers) < k:
        j = int(np.argmax(dist))
        if dist[j] <= 0:
            break
        centers.append(int(idx[j]))
        dist = np.minimum(dist, D[idx[j], idx])
    C = np.array(centers)
    # nearest center, ties to the earliest
    owner = np.argmin(D[np.ix_(C, idx)], axis=0)
    return C, owner


def _water_fill(sizes, budget):
    """Split ``budget`` into integer shares ``1 <= share_i <= sizes_i`` as
    evenly as the caps allow (smaller cells first, ties by position)."""
    shares = [0] * len(sizes)
    left = budget
    order = sorted(range(len(sizes)), key=lambda i: (sizes[i], i))
    for pos, i in enumerate(order):
        fair = max(1, left // (len(sizes) - pos))
        shares[i] = min(sizes[i], fair)
        left -= shares[i]
    return shares


def _cell_diameter(idx, D):
    return float(D[np.ix_(idx, idx)].max()) if len(idx) > 1 else 0.0


def default_levels(size: int) -> int:
    """Smallest ``L`` with ``2^(2^L) >= size``, at least 1 when there is
    anything to split (level 0 is always the whole set)."""
    if size <= 1:
        return 0
    L = 1
    while level_budget(L) < size:
        L += 1
    return L


@dataclass
class GammaResult:
    tree: PartitionTree
    gamma_upper: float


def gamma_partition(
    T, family: RandomFamily, max_levels: Optional[int] = None, seed: int = 0,
    count: int = 50_000, max_points: int = 512,
) -> GammaResult:
    """Greedy admissible partition tree and the upper bound
    ``sup_t sum_n diam_n(A_n(t))`` it certifies for the chaining functional.

    Each cell of level ``n-1`` is split by farthest-point clustering under
    ``||X_s - X_t||_{2^n}``, starting from the parent's representative. The
    level budget ``2^(2^n)`` is shared between cells by water-filling, so a
    level whose budget covers ``|T|`` always ends in singletons. The bound is ``inf`` when the
    cells are not singletons after ``max_levels`` levels.
    """
    P = T.points if isinstance(T, FinitePointSet) else np.atleast_2d(np.asarray(T, dtype=float))
    N = len(P)
    if N > max_points:
        raise ValueError(f"|T| = {N} exceeds {max_points}")
    L = default_levels(N) if max_levels is None else int(max_levels)
    dists = moment_distances(P, family, [2.0 ** n for n in range(L + 1)], count=count, seed=seed)
    D0 = dists[1.0]
    everything = np.arange(N)
    root = int(np.argmin(D0.max(axis=1))) if N > 1 else 0
    labels = [np.zeros(N, dtype=int)]
    reps = [np.array([root])]
    diams = [np.array([_cell_diameter(everything, D0)])]
    for n in range(1, L + 1):
        D = dists[2.0 ** n]
        cells = [np.flatnonzero(labels[-1] == c) for c in range(len(reps[-1]))]
        shares = _water_fill([len(c) for c in cells], level_budget(n))
        lab = np.empty(N, dtype=int)
        new_reps, new_diam = [], []
        for rep, idx, share in zip(reps[-1], cells, shares):
            C, owner = _farthest_split(idx, int(rep), share, D)
            for j, center in enumerate(C):
                members = idx[owner == j]
                lab[members] = len(new_reps)
                new_reps.append(center)
                new_diam.append(_cell_diameter(members, D))
        labels.append(lab)
        reps.append(np.array(new_reps))
        diams.append(np.array(new_diam))
        if len(new_reps) == N:
            break
    tree = PartitionTree(P, labels, reps, diams, family.to_dict())
    gamma = float(tree.chain_cost().max()) if tree.singletons() else math.inf
    return GammaResult(tree, gamma)


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def _refinements(cell_list):
    """All common refinements obtained by partitioning each cell."""
    for combo in itertools.product(*[list(_set_partitions(c)) for c in cell_list]):
        yield [sub for part in combo for sub in part]


def gamma_bruteforce(T, family: RandomFamily, levels: Optional[int] = None, seed: int = 0,
                     count: int = 50_000) -> float:
    """Exact infimum of ``sup_t sum_n diam_n(A_n(t))`` over all admissible
    partition sequences of a set with at most 5 points."""
    P = T.points if isinstance(T, FinitePointSet) else np.atleast_2d(np.asarray(T, dtype=float))
    N = len(P)
    if N > 5:
        raise ValueError("brute force is limited to |T| <= 5")
    L = default_levels(N) if levels is None else levels
    dists = moment_distances(P, family, [2.0 ** n for n in range(L + 1)], count=count, seed=seed)

    def cost(cells, n):
        D = dists[2.0 ** n]
        c = np.zeros(N)
        for cell in cells:
            c[cell] = _cell_diameter(np.array(cell), D)
        return c

    best = math.inf

    def walk(cells, n, acc):
        nonlocal best
        if len(cells) == N:
            best = min(best, float(acc.max()))
            return
        if n > L:
            return
        for ref in _refinements(cells):
            if len(ref) <= level_budget(n):
                walk(ref, n + 1, acc + cost(ref, n))

    walk([list(range(N))], 1, cost([list(range(N))], 0))
    return best


@dataclass
class ExtractedCover:
    cover: HullCover
    radius: float
    levels: list
    slots: list


def _level_offsets(L):
    """``M_n = 1 + sum_{1 <= j <= n} 2^(2^j)`` for ``n = 0..L`` (level 0 has one cell)."""
    return list(itertools.accumulate([1] + [level_budget(j) for j in range(1, L + 1)]))


def extract_cover_from_partition(
    tree: PartitionTree, family: RandomFamily, *, count: int = 50_000, seed: int = 0,
) -> ExtractedCover:
    """Cover of ``T - T`` from the increments ``pi_n(t) - pi_{n-1}(t)``.

    Increments are normalized by ``||X_.||_{2^(n+1)}`` and the set is scaled by
    ``R = 2 sup_t sum_n ||X_{pi_n(t)} - X_{pi_{n-1}(t)}||_{2^(n+1)}``. Zero
    increments are skipped. Points of level ``n`` carry slots in
    ``[M_{n-1}, M_n)`` where ``M_0 = 1`` and ``M_n = M_{n-1} + 2^(2^n)``.
    """
    P = tree.points
    N, dim = P.shape
    if not tree.singletons():
        raise ValueError("tree does not reach singleton cells")
    L = tree.depth
    dists = moment_distances(P, family, [2.0 ** (n + 1) for n in range(1, L + 1)],
                             count=count, seed=seed)
    offsets = _level_offsets(L)
    chain = np.zeros(N)
    pts, levels, slots = [], [], []
    for n in range(1, L + 1):
        D = dists[2.0 ** (n + 1)]
        rep_now = tree.reps[n][tree.labels[n]]
        rep_prev = tree.reps[n - 1][tree.labels[n - 1]]
        chain += D[rep_now, rep_prev]
        used = 0
        for c, r in enumerate(tree.reps[n]):
            members = np.flatnonzero(tree.labels[n] == c)
            parent = tree.reps[n - 1][tree.labels[n - 1][members[0]]]
            if r == parent:
                continue
            pts.append((P[r] - P[parent]) / D[r, parent])
            levels.append(n)
            slots.append(offsets[n - 1] + used)
            used += 1
    R = 2.0 * float(chain.max()) if N > 1 else 0.0
    # a single point has T - T = {0}; the zero vector keeps the list nonempty
    S = R * np.array(pts) if pts else np.zeros((1, dim))
    params = {"family": family.to_dict(), "radius": R, "levels": levels, "slots": slots,
              "seed": seed, "count": count}
    cover = HullCover(np.zeros(dim), S, "GammaExtract", R, params)
    return ExtractedCover(cover, R, levels, slots)
