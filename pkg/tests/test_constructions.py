import math
import warnings

import numpy as np
import pytest

from hullcover.constructions import (
    BlockDecomposition, _level_offsets, block_cover_b2, block_dimension, dyadic_level,
    ellipsoid_blocks, ellipsoid_cover, extract_cover_from_partition, gamma_bruteforce,
    gamma_partition, level_budget, lq_cover, lq_embed, moment_distances, rotation_cover_b2,
    separated_net,
)
from hullcover.distributions import RandomFamily
from hullcover.functionals import b_sup, little_m
from hullcover.geometry import (
    Ellipsoid, FinitePointSet, HullCover, L2Ball, LinearImageLq, LqBall, containment_probe,
    haar_orthogonal, member_abs_hull, support,
)

GAUSS = RandomFamily.gaussian()


def min_pair_distance(P):
    d = np.linalg.norm(P[:, None] - P[None], axis=-1)
    d[np.diag_indices(len(P))] = np.inf
    return d.min()


# -- separated_net -------------------------------------------------------------

def test_net_one_dimensional():
    T = separated_net(1)
    assert len(T) <= 5
    assert min_pair_distance(T) >= 0.5 - 1e-12
    assert np.all(np.abs(T) <= 1)
    # maximal at spacing 1/2: every point of [-1, 1] lies within 1/2 of T
    grid = np.linspace(-1, 1, 2001)
    assert np.abs(grid[:, None] - T[None, :, 0]).min(axis=1).max() <= 0.5 + 1e-3


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_net_bounds_and_containment(k):
    T = separated_net(k)
    assert len(T) <= 5 ** k
    assert np.all(np.linalg.norm(T, axis=1) <= 1 + 1e-12)
    if len(T) > 1:
        assert min_pair_distance(T) >= 0.5 - 1e-12
    cover = HullCover(np.zeros(k), 2 * T, "Net")
    assert containment_probe(L2Ball(k), cover, 10_000, seed=k).worst_ratio <= 1 + 1e-2


def test_net_large_separation():
    assert len(separated_net(3, separation=2.0)) <= 2


def test_net_validation_and_determinism():
    with pytest.raises(ValueError):
        separated_net(13)
    with pytest.raises(ValueError):
        separated_net(0)
    with pytest.raises(ValueError):
        separated_net(2, separation=0)
    assert np.array_equal(separated_net(3, seed=4), separated_net(3, seed=4))


# -- block_cover_b2 ------------------------------------------------------------

def test_block_cover_n4_k2():
    cover = block_cover_b2(4, 2)
    assert cover.size <= 4 * 25
    assert cover.claimed_radius == pytest.approx(2 * math.sqrt(2))
    assert cover.provenance == "BlockB2"
    assert containment_probe(L2Ball(4), cover, 10_000, seed=1).worst_ratio <= 1 + 1e-2


def test_block_cover_single_block():
    cover = block_cover_b2(3, 3)
    assert cover.claimed_radius == 2.0 and cover.provenance == "Net"
    assert np.allclose(cover.points, 2 * separated_net(3))


@pytest.mark.parametrize("n,k", [(5, 2), (7, 3), (10, 4), (9, 1)])
def test_block_cover_size_bound(n, k):
    cover = block_cover_b2(n, k)
    assert cover.size <= 2 * n / k * 5 ** k
    assert containment_probe(L2Ball(n), cover, 10_000, seed=n).worst_ratio <= 1 + 1e-2


def test_block_dimension():
    assert block_dimension(1) == 1
    assert block_dimension(8) == math.ceil(math.log(8))
    assert block_dimension(8, 2.0) == math.ceil(2 * math.log(8))
    assert block_dimension(3, 10.0) == 3
    with pytest.raises(ValueError):
        block_cover_b2(3, 4)


# -- rotation_cover_b2 ---------------------------------------------------------

def test_rotation_cover_n2():
    cover, diag = rotation_cover_b2(2, GAUSS, trials=32)
    assert cover.size <= 40
    assert cover.provenance == "RotationB2"
    assert containment_probe(L2Ball(2), cover, 10_000, seed=0).worst_ratio <= 1 + 1e-2
    assert diag.achieved <= diag.mean + 1e-12
    assert len(diag.sums) == 32 and diag.threshold == pytest.approx(2 * math.sqrt(2))


@pytest.mark.parametrize("fam", [GAUSS, RandomFamily.rademacher(), RandomFamily.student(9)],
                         ids=lambda f: f.kind)
def test_rotation_cover_sizes_and_selection(fam):
    for n in (4, 8, 16):
        cover, diag = rotation_cover_b2(n, fam, trials=8)
        assert cover.size <= 10 * n * n
        assert diag.achieved == min(diag.sums) <= diag.mean
        assert containment_probe(L2Ball(n), cover, 4000, seed=n).worst_ratio <= 1 + 1e-2


def test_rotation_cover_is_rotated_block_cover():
    cover, diag = rotation_cover_b2(6, GAUSS, trials=4)
    base = block_cover_b2(6, block_dimension(6))
    # rotation preserves norms and Gram matrices
    assert np.allclose(cover.points @ cover.points.T, base.points @ base.points.T)


def test_rotation_cover_warns_for_heavy_tails():
    with pytest.warns(RuntimeWarning, match="moment"):
        rotation_cover_b2(4, RandomFamily.stable(1.5), trials=2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rotation_cover_b2(4, GAUSS, trials=2)


def test_rotation_cover_truncation_cap():
    # c_log large enough for a single 6-dim net, which exceeds 10 n^2 = 360 points
    assert len(separated_net(6)) > 360
    with pytest.warns(RuntimeWarning, match="truncated"):
        cover, _ = rotation_cover_b2(6, GAUSS, trials=1, c_log=10.0)
    assert cover.size == 360


def test_rotation_cover_validation():
    with pytest.raises(ValueError):
        rotation_cover_b2(3, GAUSS, trials=0)


# -- ellipsoid_blocks ----------------------------------------------------------

def test_blocks_single_axis():
    dec = ellipsoid_blocks([1.0])
    (b,) = dec.blocks
    assert b.k == 0 and b.size == 1
    assert b.weight == pytest.approx(2 * math.sqrt(2))


def test_blocks_equal_axes():
    dec = ellipsoid_blocks([0.5] * 4)
    (b,) = dec.blocks
    assert dec.rescale == pytest.approx(1.0)
    assert b.k == 1 and b.size == 4
    assert b.weight == pytest.approx(8 / math.sqrt(6))


def test_blocks_invariants_random():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(1, 40))
        a = np.exp(-rng.uniform(0, 8, n))
        dec = ellipsoid_blocks(a)
        assert dec.check() == []
        assert dec.weight_mass() <= 1
        # c_k^-2 = (2^-k + n_k 4^-k) / 16 sums below (2 + 4) / 16
        assert dec.weight_mass() < 3 / 8
        assert 1 - 1e-12 <= dec.level_mass() < 4
        an = a / np.linalg.norm(a)
        idx = np.sort(np.concatenate([b.indices for b in dec.blocks]))
        assert np.array_equal(idx, np.arange(n))
        for b in dec.blocks:
            assert np.all(an[b.indices] <= 2.0 ** -b.k * (1 + 1e-12))
            assert np.all(an[b.indices] > 2.0 ** -(b.k + 1))


def test_blocks_drop_zero_axes_and_errors():
    dec = ellipsoid_blocks([1.0, 0.0, 1.0])
    assert sorted(np.concatenate([b.indices for b in dec.blocks]).tolist()) == [0, 2]
    with pytest.raises(ValueError):
        ellipsoid_blocks([0.0, 0.0])
    with pytest.raises(ValueError):
        ellipsoid_blocks([1.0, -1.0])


def test_dyadic_level_powers_of_two():
    a = np.array([1.0, 0.5, 0.25, 0.3, 2.0 ** -10])
    assert dyadic_level(a).tolist() == [0, 1, 2, 1, 10]


def test_decomposition_check_flags_bad_weight():
    dec = ellipsoid_blocks([1.0, 0.3])
    dec.blocks[0].weight *= 1.01
    assert dec.check()
    assert isinstance(dec, BlockDecomposition)


# -- ellipsoid_cover -----------------------------------------------------------

def test_ellipsoid_cover_ball():
    n = 6
    E = Ellipsoid(np.eye(n), np.full(n, 3.0 / math.sqrt(n)))
    cover = ellipsoid_cover(E, GAUSS, trials=4)
    assert len(cover.params["blocks"]) == 1
    assert containment_probe(E, cover, 10_000, seed=1).worst_ratio <= 1 + 1e-2


def test_ellipsoid_cover_geometric_axes():
    n = 16
    a = 2.0 ** (-np.arange(1, n + 1) / 4)
    E = Ellipsoid(haar_orthogonal(n, 5), a / np.linalg.norm(a))
    cover = ellipsoid_cover(E, GAUSS, trials=8)
    assert cover.size <= 10 * n * n
    assert cover.provenance == "EllipsoidDyadic"
    assert containment_probe(E, cover, 10_000, seed=2).worst_ratio <= 1 + 1e-2


# -- lq_embed ------------------------------------------------------------------

def test_lq_embed_q2_identity_weights():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((4, 4))
    emb = lq_embed(A, 2.0)
    assert np.allclose(emb.weights, 1.0)
    x = rng.standard_normal((20, 4))
    # D = I, so the ellipsoid is A B_2
    assert np.allclose(support(emb.ellipsoid, x), np.linalg.norm(x @ A, axis=1))


def test_lq_embed_identity_inf():
    emb = lq_embed(np.eye(3), math.inf)
    x = np.random.default_rng(2).standard_normal((20, 3))
    assert emb.scale == pytest.approx(3.0)
    assert np.allclose(support(emb.ellipsoid, x), math.sqrt(3) * np.linalg.norm(x, axis=1))


@pytest.mark.parametrize("q", [2.0, 3.0, 4.0, math.inf])
def test_lq_embed_contains_image(q):
    rng = np.random.default_rng(3)
    A = rng.standard_normal((5, 5))
    emb = lq_embed(A, q)
    x = rng.standard_normal((2000, 5))
    inner = support(LinearImageLq(A, q), x)
    outer = support(emb.ellipsoid, x)
    assert np.all(inner <= outer * (1 + 1e-12))


def test_lq_embed_errors():
    with pytest.raises(ValueError):
        lq_embed(np.eye(2), 1.5)
    with pytest.raises(ValueError):
        lq_embed(np.array([[1.0, 0.0], [0.0, 0.0]]), 3.0)
    with pytest.raises(ValueError):
        lq_embed(np.array([[1.0, 1.0], [1.0, 1.0]]), 3.0)


def test_lq_cover_random_matrix():
    rng = np.random.default_rng(4)
    A = rng.standard_normal((8, 8))
    cover = lq_cover(A, 4.0, GAUSS, trials=8)
    assert cover.provenance == "LqEmbed" and cover.size <= 640
    rep = containment_probe(LinearImageLq(A, 4.0), cover, 10_000, seed=3)
    assert rep.worst_ratio <= 1 + 1e-2
    cover = lq_cover(np.eye(4), math.inf, GAUSS, trials=4)
    rep = containment_probe(LqBall(4, math.inf), cover, 10_000, seed=3)
    assert rep.worst_ratio <= 1 + 1e-2 and rep.exact_ok


# -- gamma_partition -----------------------------------------------------------

def test_gamma_singleton():
    res = gamma_partition(np.ones((1, 3)), GAUSS)
    assert res.gamma_upper == 0.0


def test_gamma_two_points():
    t = np.array([1.0, -2.0, 0.5])
    res = gamma_partition(np.vstack([np.zeros(3), t]), GAUSS)
    # only the level-0 diameter ||X_t||_1 survives
    assert res.gamma_upper == pytest.approx(math.sqrt(2 / math.pi) * np.linalg.norm(t), rel=1e-12)
    assert res.gamma_upper == pytest.approx(
        gamma_bruteforce(np.vstack([np.zeros(3), t]), GAUSS), rel=1e-12)


def test_gamma_tree_invariants():
    rng = np.random.default_rng(0)
    P = rng.standard_normal((40, 4))
    res = gamma_partition(P, GAUSS)
    tree = res.tree
    assert tree.singletons()
    counts = tree.cell_counts()
    assert counts[0] == 1
    for n, c in enumerate(counts):
        assert c <= level_budget(n) if n else c == 1
    for n in range(1, tree.depth + 1):
        # refinement: points sharing a cell at level n share it at level n-1
        lab, prev = tree.labels[n], tree.labels[n - 1]
        for c in range(counts[n]):
            assert len(set(prev[lab == c])) == 1
        # representatives belong to their cells
        assert np.all(lab[tree.reps[n]] == np.arange(counts[n]))
    assert res.gamma_upper == pytest.approx(tree.chain_cost().max())


def test_gamma_matches_bruteforce_small():
    rng = np.random.default_rng(1)
    for N in range(1, 6):
        for fam in (GAUSS, RandomFamily.stable(1.5) if N == 1 else RandomFamily.rademacher()):
            P = rng.standard_normal((N, 3))
            g = gamma_partition(P, fam, count=20_000).gamma_upper
            brute = gamma_bruteforce(P, fam, count=20_000)
            assert brute <= g + 1e-9


def test_gamma_monotone_in_levels():
    rng = np.random.default_rng(2)
    P = rng.standard_normal((20, 3))
    vals = [gamma_partition(P, GAUSS, max_levels=L).gamma_upper for L in (1, 2, 3, 4, 5)]
    assert vals[0] == math.inf  # two cells cannot hold 20 singletons... level 1 budget is 4
    finite = [v for v in vals if v < math.inf]
    assert finite and all(b <= a + 1e-12 for a, b in zip(finite, finite[1:]))


def test_gamma_band_vs_b_sup():
    rng = np.random.default_rng(3)
    P = rng.standard_normal((32, 4))
    g = gamma_partition(P, GAUSS).gamma_upper
    b = b_sup(FinitePointSet(P), GAUSS, count=100_000, seed=1).value
    assert 0.05 <= g / b <= 200


def test_gamma_errors():
    with pytest.raises(ValueError):
        gamma_partition(np.zeros((600, 2)), GAUSS)
    with pytest.raises(ValueError):
        gamma_partition(np.random.default_rng(0).standard_normal((5, 2)), RandomFamily.stable(1.5))
    with pytest.raises(ValueError):
        gamma_bruteforce(np.zeros((6, 2)), GAUSS)


def test_moment_distances_closed_form_vs_mc():
    rng = np.random.default_rng(4)
    P = rng.standard_normal((4, 3))
    uni = RandomFamily.uniform()
    D = moment_distances(P, uni, [2.0], count=200_000, seed=1)[2.0]
    # second moment of a linear form is exact: |s - t|^2 Var
    exact = np.linalg.norm(P[:, None] - P[None], axis=-1) * math.sqrt(uni.variance)
    assert np.allclose(D, exact, rtol=1e-2)


# -- extract_cover_from_partition ----------------------------------------------

def pairwise_differences(P):
    i, j = np.triu_indices(len(P), 1)
    return np.vstack([P[i] - P[j], P[j] - P[i]])


def test_extract_singleton():
    tree = gamma_partition(np.ones((1, 2)), GAUSS).tree
    ex = extract_cover_from_partition(tree, GAUSS)
    assert ex.radius == 0.0 and ex.levels == [] and ex.slots == []
    assert np.all(ex.cover.points == 0)


def test_extract_two_points():
    t = np.array([0.3, -1.2])
    tree = gamma_partition(np.vstack([np.zeros(2), t]), GAUSS).tree
    ex = extract_cover_from_partition(tree, GAUSS)
    assert ex.cover.size == 1
    norm4 = 3 ** 0.25 * np.linalg.norm(t)
    # R = 2 ||X_t||_4 and the point is R t / ||X_t||_4 up to sign
    assert ex.radius == pytest.approx(2 * norm4)
    assert np.allclose(np.abs(ex.cover.points[0]), np.abs(2 * t))
    assert member_abs_hull(t, ex.cover.points).member


@pytest.mark.parametrize("fam", [GAUSS, RandomFamily.rademacher()], ids=lambda f: f.kind)
def test_extract_contains_differences(fam):
    rng = np.random.default_rng(5)
    P = rng.standard_normal((16, 4))
    g = gamma_partition(P, fam, count=20_000)
    ex = extract_cover_from_partition(g.tree, fam, count=20_000)
    for d in pairwise_differences(P):
        assert member_abs_hull(d, ex.cover.points, tol=1e-7).member
    offsets = _level_offsets(g.tree.depth)
    for lev, slot in zip(ex.levels, ex.slots):
        assert offsets[lev - 1] <= slot < offsets[lev]
    ml = little_m(ex.cover.points, fam, count=20_000).estimate.value
    assert ml <= 10 * g.gamma_upper


def test_level_offsets():
    assert _level_offsets(3) == [1, 5, 21, 277]
