import numpy as np
import pytest

from fastron.kernels import LazyGramMatrix

from reference import eager_gram


@pytest.fixture
def points():
    rng = np.random.default_rng(42)
    return rng.uniform(-1, 1, (60, 3))


def test_ensure_column_matches_eager(points):
    g = LazyGramMatrix(30.0)
    g.reset(len(points))
    col = g.ensure_column(points, 0)
    K = eager_gram(points, 30.0)
    np.testing.assert_array_equal(col, K[:, 0])
    assert col[0] == 1.0


def test_ensure_column_idempotent(points):
    g = LazyGramMatrix(30.0)
    g.reset(len(points))
    g.ensure_column(points, 5)
    evals = g.kernel_evals
    g.ensure_column(points, 5)
    assert g.kernel_evals == evals  # second call does no work


def test_ensure_column_out_of_range(points):
    g = LazyGramMatrix(30.0)
    g.reset(len(points))
    with pytest.raises(IndexError):
        g.ensure_column(points, len(points))
    with pytest.raises(IndexError):
        g.ensure_column(points, -1)


def test_full_fill_symmetric_and_exact(points):
    g = LazyGramMatrix(30.0)
    g.reset(len(points))
    K = g.full(points).copy()
    np.testing.assert_array_equal(K, K.T)  # 0 ulp symmetry
    np.testing.assert_array_equal(K, eager_gram(points, 30.0))


def test_lazy_fill_order_independent(points):
    # any fill order is extensionally equal to the eager computation
    rng = np.random.default_rng(3)
    g = LazyGramMatrix(30.0)
    g.reset(len(points))
    for j in rng.permutation(len(points)):
        g.ensure_column(points, int(j))
    np.testing.assert_array_equal(g.matrix, eager_gram(points, 30.0))


def test_positive_definite_on_distinct_points():
    rng = np.random.default_rng(7)
    X = rng.uniform(-1, 1, (200, 2))
    g = LazyGramMatrix(30.0)
    g.reset(len(X))
    K = g.full(X)
    np.linalg.cholesky(K)  # raises if not positive definite
    assert np.linalg.eigvalsh(K).min() > 0.0


def test_complete_and_extend_no_op_on_empty(points):
    g = LazyGramMatrix(30.0)
    g.reset(10)
    for j in range(10):
        g.ensure_column(points[:10], j)
    before = g.matrix.copy()
    g.complete_and_extend(points[:10], points[:0])
    assert g.n == 10
    np.testing.assert_array_equal(g.matrix, before)


def test_complete_and_extend_matches_eager(points):
    # 3 old points, all columns computed, extend by 2 new points
    g = LazyGramMatrix(30.0)
    g.reset(3)
    for j in range(3):
        g.ensure_column(points[:3], j)
    g.complete_and_extend(points[:3], points[3:5])
    assert g.n == 5
    K5 = eager_gram(points[:5], 30.0)
    np.testing.assert_array_equal(g.matrix[:, :3], K5[:, :3])
    assert not g.column_computed(3)
    assert not g.column_computed(4)


def test_complete_and_extend_only_touches_computed_columns(points):
    g = LazyGramMatrix(30.0)
    g.reset(4)
    g.ensure_column(points[:4], 1)
    evals = g.kernel_evals
    g.complete_and_extend(points[:4], points[4:7])
    # only the single computed column gains the 3 new rows
    assert g.kernel_evals == evals + 3
    K7 = eager_gram(points[:7], 30.0)
    np.testing.assert_array_equal(g.matrix[:, 1], K7[:, 1])


def test_capacity_hint_prevents_reallocation(points):
    g = LazyGramMatrix(30.0, capacity=40)
    g.reset(30)
    for j in range(30):
        g.ensure_column(points[:30], j)
    g.compact(np.arange(10))
    g.complete_and_extend(points[:10], points[10:35])
    assert g.n == 35
    assert g.reallocs == 0
    g.complete_and_extend(points[:35], points[35:45])
    assert g.reallocs == 1  # above the hint: one growth


def test_compact_preserves_exactness(points):
    g = LazyGramMatrix(30.0)
    g.reset(20)
    g.full(points[:20])
    keep = np.array([0, 3, 7, 11, 19])
    g.compact(keep)
    np.testing.assert_array_equal(g.matrix, eager_gram(points[:20][keep], 30.0))
    assert all(g.column_computed(j) for j in range(5))
