import json
import math

import numpy as np
import pytest
from scipy import stats

from hullcover.geometry import (
    Ellipsoid, FinitePointSet, HullCover, L1Ball, L2Ball, LinearImageLq, LqBall, canonical_cover,
    containment_probe, haar_orthogonal, holder_dual, index_set_from_dict, member_abs_hull,
    random_directions, support,
)


# -- support -------------------------------------------------------------------

def test_support_examples():
    assert support(L1Ball(2), [3.0, -4.0]) == 4.0
    assert support(Ellipsoid(np.eye(2), np.array([2.0, 1.0])), [1.0, 0.0]) == 2.0
    assert support(LqBall(2, 4.0), [1.0, 1.0]) == pytest.approx(2 ** 0.75, rel=1e-14)
    assert support(L2Ball(2), [3.0, 4.0]) == pytest.approx(5.0)
    assert support(LqBall(3, math.inf), [1.0, -2.0, 3.0]) == pytest.approx(6.0)
    assert support(LqBall(3, 2.0), [1.0, -2.0, 2.0]) == pytest.approx(3.0)


def test_support_matches_vertex_maximum():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((50, 3))
    for T in (L1Ball(3), LqBall(3, math.inf)):
        V = T.vertices()
        assert np.allclose(support(T, x), (x @ V.T).max(axis=1))
    P = rng.standard_normal((7, 3))
    assert np.allclose(support(FinitePointSet(P), x), (x @ P.T).max(axis=1))


def test_support_ellipsoid_vs_parametrization():
    # sup over the boundary U diag(a) w, |w| = 1, sampled densely in 2-D
    rng = np.random.default_rng(1)
    U = haar_orthogonal(2, 3)
    a = np.array([1.5, 0.3])
    E = Ellipsoid(U, a)
    th = np.linspace(0, 2 * np.pi, 200_001)
    B = (U @ np.diag(a) @ np.vstack([np.cos(th), np.sin(th)])).T
    for x in rng.standard_normal((5, 2)):
        assert support(E, x) == pytest.approx((B @ x).max(), rel=1e-9)


def test_support_linear_image():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((3, 3))
    T = LinearImageLq(A, 4.0)
    x = rng.standard_normal(3)
    # h_{A B_q}(x) = ||A^T x||_{q'}
    assert support(T, x) == pytest.approx(np.sum(np.abs(A.T @ x) ** (4 / 3)) ** 0.75)


def test_support_homogeneous_and_subadditive():
    rng = np.random.default_rng(3)
    sets = [L1Ball(4), L2Ball(4), LqBall(4, 3.0), LqBall(4, math.inf),
            Ellipsoid(haar_orthogonal(4, 1), rng.uniform(0.1, 2, 4)),
            LinearImageLq(rng.standard_normal((4, 4)), 5.0), FinitePointSet(rng.standard_normal((6, 4)))]
    x, y = rng.standard_normal((2, 100, 4))
    for T in sets:
        for c in (0.5, 3.0):
            assert np.allclose(support(T, c * x), c * support(T, x), rtol=1e-13)
        assert np.all(support(T, x + y) <= support(T, x) + support(T, y) + 1e-12)


def test_support_dimension_mismatch():
    with pytest.raises(ValueError):
        support(L1Ball(3), [1.0, 2.0])


def test_holder_dual():
    assert holder_dual(2.0) == 2.0
    assert holder_dual(4.0) == pytest.approx(4 / 3)
    assert holder_dual(math.inf) == 1.0


def test_ellipsoid_validation():
    with pytest.raises(ValueError):
        Ellipsoid(np.array([[1.0, 0.1], [0.0, 1.0]]), np.ones(2))
    with pytest.raises(ValueError):
        Ellipsoid(np.eye(2), np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        LqBall(3, 1.5)


def test_index_set_roundtrip():
    rng = np.random.default_rng(4)
    sets = [L1Ball(3), L2Ball(3), LqBall(3, 4.0), LqBall(3, math.inf),
            Ellipsoid(haar_orthogonal(3, 2), np.array([1.0, 0.5, 0.2])),
            LinearImageLq(rng.standard_normal((3, 3)), math.inf),
            FinitePointSet(rng.standard_normal((4, 3)))]
    x = rng.standard_normal((10, 3))
    for T in sets:
        d = json.loads(json.dumps(T.to_dict()))
        assert np.allclose(support(index_set_from_dict(d), x), support(T, x), rtol=1e-14)


# -- member_abs_hull -----------------------------------------------------------

S2 = np.eye(2)


def test_membership_examples():
    m = member_abs_hull([1.0, 0.0], S2)
    assert m.member and np.allclose(m.weights, [1.0, 0.0], atol=1e-9)
    assert not member_abs_hull([1.01, 0.0], S2).member
    m = member_abs_hull([0.5, 0.5], S2)
    # the residual slack tol lets the weights fall short of 1 by O(tol)
    assert m.member and m.l1 == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("method", ["lp", "fw"])
def test_membership_methods_agree(method):
    rng = np.random.default_rng(5)
    S = rng.standard_normal((8, 3))
    for _ in range(20):
        lam = rng.standard_normal(8)
        inside = S.T @ (lam / np.abs(lam).sum() * 0.9)
        # beyond the largest point norm, so certainly outside
        x = rng.standard_normal(3)
        outside = x / np.linalg.norm(x) * 1.01 * np.linalg.norm(S, axis=1).max()
        assert member_abs_hull(inside, S, tol=1e-6, method=method).member
        assert not member_abs_hull(outside, S, tol=1e-6, method=method).member


def test_membership_certificate_consistency():
    rng = np.random.default_rng(6)
    S = rng.standard_normal((10, 4))
    D = random_directions(1000, 4, seed=1)
    tol = 1e-9
    for _ in range(30):
        x = rng.standard_normal(4) * rng.uniform(0.2, 2)
        m = member_abs_hull(x, S, tol=tol)
        if m.member:
            assert np.all(D @ x <= np.abs(D @ S.T).max(axis=1) + tol)
            assert np.linalg.norm(S.T @ m.weights - x) <= tol * 1.01
            assert np.abs(m.weights).sum() <= 1 + 1e-9


def test_membership_rejects_bad_tol():
    with pytest.raises(ValueError):
        member_abs_hull([0.0, 0.0], S2, tol=0.0)


# -- HullCover -----------------------------------------------------------------

def test_cover_roundtrip_and_validation():
    c = canonical_cover(3)
    d = json.loads(json.dumps(c.to_dict()))
    back = HullCover.from_dict(d)
    assert np.array_equal(back.points, c.points) and back.provenance == "Canonical"
    with pytest.raises(ValueError):
        HullCover(np.zeros(2), np.eye(2), "Bogus")
    with pytest.raises(ValueError):
        HullCover(np.zeros(2), np.zeros((0, 2)), "Canonical")
    with pytest.raises(ValueError):
        HullCover(np.zeros(3), np.eye(2), "Canonical")


# -- containment_probe ---------------------------------------------------------

def test_probe_canonical_l1():
    rep = containment_probe(L1Ball(3), canonical_cover(3), 10_000, seed=0)
    assert rep.worst_ratio <= 1 + 1e-12
    assert rep.exact_ok is True and rep.consistent(1e-6)


def test_probe_l2_axes_ratio_sqrt2():
    cover = HullCover(np.zeros(2), S2, "Canonical")
    rep = containment_probe(L2Ball(2), cover, 100_000, seed=0)
    assert rep.worst_ratio == pytest.approx(math.sqrt(2), abs=1e-4)
    diag = np.abs(rep.witness)
    assert np.allclose(diag, [1 / math.sqrt(2)] * 2, atol=0.02)
    assert not rep.consistent()


def test_probe_scaling_doubles_ratio():
    cover = HullCover(np.zeros(2), S2, "Canonical")
    a = containment_probe(L2Ball(2), cover, 5000, seed=3)
    b = containment_probe(L2Ball(2).scaled(2.0), cover, 5000, seed=3)
    assert b.worst_ratio == pytest.approx(2 * a.worst_ratio, rel=1e-12)


def test_probe_detects_shrunk_cover_on_vertices():
    rep = containment_probe(L1Ball(4), canonical_cover(4).scaled(0.999), 200, seed=0)
    assert rep.exact_ok is False and not rep.consistent(0.01)


def test_probe_zero_denominator():
    cover = HullCover(np.zeros(2), np.zeros((1, 2)), "Canonical")
    rep = containment_probe(L2Ball(2), cover, 100, seed=0)
    assert math.isinf(rep.worst_ratio) and rep.witness is not None


def test_probe_center_shift():
    # T = center + B_1: shifting both by the same t0 keeps the ratio at 1
    t0 = np.array([3.0, -1.0])
    T = FinitePointSet(np.vstack([t0 + np.eye(2), t0 - np.eye(2)]))
    cover = HullCover(t0, np.eye(2), "Canonical")
    rep = containment_probe(T, cover, 2000, seed=0)
    assert rep.worst_ratio <= 1 + 1e-12 and rep.exact_ok


def test_probe_rejects_bad_input():
    with pytest.raises(ValueError):
        containment_probe(L1Ball(3), canonical_cover(3), 0)
    with pytest.raises(ValueError):
        containment_probe(L1Ball(2), canonical_cover(3), 10)


# -- haar_orthogonal -----------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 5, 40])
def test_haar_orthonormal(n):
    U = haar_orthogonal(n, seed=n)
    assert np.allclose(U.T @ U, np.eye(n), atol=1e-10)
    assert abs(abs(np.linalg.det(U)) - 1) < 1e-8


def test_haar_first_column_uniform():
    n = 4
    first = np.array([haar_orthogonal(n, seed=s)[0, 0] for s in range(10_000)])
    g = np.random.default_rng(12).standard_normal((200_000, n))
    ref = g[:, 0] / np.linalg.norm(g, axis=1)
    assert stats.ks_2samp(first, ref).statistic < 0.02


def test_haar_deterministic_and_validated():
    assert np.array_equal(haar_orthogonal(5, 7), haar_orthogonal(5, 7))
    assert not np.array_equal(haar_orthogonal(5, 7), haar_orthogonal(5, 8))
    with pytest.raises(ValueError):
        haar_orthogonal(0, 1)


def test_random_directions_unit():
    D = random_directions(1000, 5, seed=2)
    assert np.allclose(np.linalg.norm(D, axis=1), 1.0)
