import numpy as np
import pytest

from src.errors import InvalidInputError, ShapeMismatchError
from src.prox import L1Penalty, TVPenalty
from src.prox.chambolle import (
    ChambolleConfig,
    chambolle_project_1d,
    chambolle_project_2d,
    generalized_threshold,
)
from src.prox.thresholding import (
    WeightVector,
    project_box,
    soft_threshold,
    soft_threshold_vector,
    weighted_l1,
)
from src.decomp import make_index_split, make_random_orthogonal
from src.grids import discrete_tv
from tests.oracles import exact_tv_projection_1d, tv_projection_2d_oracle


def test_soft_threshold_scalar():
    assert soft_threshold(3.0, 1.0) == 2.0
    assert soft_threshold(-3.0, 1.0) == -2.0
    assert soft_threshold(0.5, 1.0) == 0.0
    assert soft_threshold(1.0, 1.0) == 0.0
    with pytest.raises(InvalidInputError):
        soft_threshold(1.0, -0.1)


def test_weighted_soft_threshold_and_box():
    u = np.array([3.0, -3.0, 0.5])
    weights = WeightVector(np.array([1.0, 2.0, 0.25]))
    np.testing.assert_allclose(soft_threshold_vector(u, 1.0, weights), [2.0, -1.0, 0.25])
    np.testing.assert_allclose(project_box(u, 1.0, weights), [1.0, -2.0, 0.25])
    # threshold + projection reassemble the input
    np.testing.assert_allclose(soft_threshold_vector(u, 1.0, weights) + project_box(u, 1.0, weights), u)
    assert weighted_l1(u, weights) == pytest.approx(3.0 + 6.0 + 0.125)


def test_weight_vector_validation():
    with pytest.raises(InvalidInputError):
        WeightVector(np.array([1.0, 0.0]))
    with pytest.raises(ShapeMismatchError):
        soft_threshold_vector(np.ones(3), 1.0, WeightVector(np.ones(2)))


def test_two_node_tv_prox():
    # ||u - (0, 2)||^2 + 2 * 0.5 * |u1 - u0| is minimized at (0.5, 1.5)
    cfg = ChambolleConfig(tol=1e-9, max_iters=100000)
    np.testing.assert_allclose(generalized_threshold(np.array([0.0, 2.0]), 0.5, cfg), [0.5, 1.5], atol=1e-6)


def test_constant_signal_is_a_fixed_point():
    g = np.full(10, 4.0)
    result = chambolle_project_1d(g, 1.0)
    np.testing.assert_array_equal(result.projection, np.zeros(10))
    np.testing.assert_array_equal(generalized_threshold(g, 1.0), g)
    np.testing.assert_array_equal(generalized_threshold(g, 0.0), g)


def test_chambolle_matches_least_squares_oracle_1d(rng, tight_chambolle):
    for _ in range(50):
        n = int(rng.integers(2, 13))
        g = rng.standard_normal(n)
        alpha = float(rng.uniform(0.1, 1.0))
        result = chambolle_project_1d(g, alpha, tight_chambolle)
        assert np.linalg.norm(result.projection - exact_tv_projection_1d(g, alpha)) < 1e-3
        assert np.max(np.abs(result.dual)) <= 1.0 + 1e-12


def test_chambolle_matches_slsqp_oracle_2d(rng, tight_chambolle):
    for _ in range(10):
        g = rng.standard_normal((4, 4))
        alpha = float(rng.uniform(0.1, 0.6))
        result = chambolle_project_2d(g, alpha, tight_chambolle)
        assert np.linalg.norm(result.projection - tv_projection_2d_oracle(g, alpha)) < 1e-3


def test_warm_start_needs_fewer_iterations(rng):
    g = rng.standard_normal(30)
    cfg = ChambolleConfig(tol=1e-6, max_iters=100000)
    cold = chambolle_project_1d(g, 0.5, cfg)
    warm = chambolle_project_1d(g, 0.5, cfg, dual=cold.dual)
    assert warm.iters < cold.iters
    np.testing.assert_allclose(warm.projection, cold.projection, atol=1e-4)


def test_chambolle_config_validation():
    with pytest.raises(InvalidInputError):
        ChambolleConfig(tau=0.0)
    with pytest.raises(InvalidInputError):
        ChambolleConfig(tol=-1.0)
    with pytest.raises(InvalidInputError):
        chambolle_project_1d(np.ones((2, 2)), 1.0)
    with pytest.raises(InvalidInputError):
        chambolle_project_1d(np.ones(3), 0.0)
    with pytest.raises(InvalidInputError):
        generalized_threshold(np.ones(3), 1.0, geometry="3d")


def test_tv_penalty_keeps_duals_per_key(rng):
    penalty = TVPenalty(ChambolleConfig(tol=1e-6, max_iters=100000))
    g = rng.standard_normal(20)
    penalty.project(g, 0.5, key="a")
    first = penalty.dual_iterations
    penalty.project(g, 0.5, key="a")
    assert penalty.dual_iterations - first < first
    assert penalty.projections == 2

    np.testing.assert_array_equal(penalty.project(g, 0.0), np.zeros(20))
    assert penalty.value(np.array([0.0, 1.0, 0.0])) == 2.0

    # a fork starts cold and does not touch the parent duals
    forked = penalty.fork()
    forked.project(g, 0.5, key="a")
    assert forked.dual_iterations == first
    before = penalty.dual_iterations
    penalty.project(g, 0.5, key="a")
    assert penalty.dual_iterations - before < first


def test_l1_penalty_splitting():
    penalty = L1Penalty()
    np.testing.assert_array_equal(penalty.threshold(np.array([2.0, -0.5]), 1.0), [1.0, 0.0])
    np.testing.assert_array_equal(penalty.project(np.array([2.0, -0.5]), 1.0), [1.0, -0.5])
    assert penalty.splits_over(make_index_split(6, 3))
    assert not penalty.splits_over(make_random_orthogonal(6, 3, seed=0))
    assert penalty.splits_over(make_random_orthogonal(6, 1, seed=0))
    assert not TVPenalty().splits_over(make_index_split(6, 3))


def test_soft_threshold_minimizes_scalar_objective(rng):
    grid = np.linspace(-6.0, 6.0, 240001)
    for _ in range(50):
        x = float(rng.uniform(-5.0, 5.0))
        theta = float(rng.uniform(0.0, 2.0))
        best = soft_threshold(x, theta)
        objective = (grid - x) ** 2 + 2.0 * theta * np.abs(grid)
        value = (best - x) ** 2 + 2.0 * theta * abs(best)
        assert value <= objective.min() + 1e-12
        assert abs(best - grid[np.argmin(objective)]) <= 1e-4


@pytest.mark.parametrize("shape", [(9,), (5, 6)])
def test_generalized_threshold_is_nonexpansive(shape, rng, tight_chambolle):
    for _ in range(20):
        a, b = rng.standard_normal(shape), rng.standard_normal(shape)
        alpha = float(rng.uniform(0.1, 1.0))
        gap = generalized_threshold(a, alpha, tight_chambolle) - generalized_threshold(b, alpha, tight_chambolle)
        assert np.linalg.norm(gap) <= np.linalg.norm(a - b) + 1e-5


@pytest.mark.parametrize("shape", [(10,), (5, 5)])
def test_generalized_threshold_minimizes_rof_energy(shape, rng, tight_chambolle):
    def rof(u, g, alpha):
        return float(np.sum((u - g) ** 2) + 2.0 * alpha * discrete_tv(u))

    for _ in range(10):
        g = rng.standard_normal(shape)
        alpha = float(rng.uniform(0.1, 1.0))
        u = generalized_threshold(g, alpha, tight_chambolle)
        for _ in range(20):
            other = u + 0.1 * rng.standard_normal(shape)
            assert rof(u, g, alpha) <= rof(other, g, alpha) + 1e-6
