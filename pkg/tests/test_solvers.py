import numpy as np
import pandas as pd
import pytest
from scipy.optimize import minimize

import src.solvers.subspace as subspace_module
from src.decomp import SwitchSchedule, make_index_split, make_random_orthogonal, make_stripes, make_svd_q
from src.errors import CoercivityError, InvalidInputError, ShapeMismatchError
from src.experiments import gaussian_l1, signal_experiment
from src.oblique import EtaState, StripeSpec
from src.operators import DenseMap, IdentityMap, MaskMap
from src.prox.chambolle import ChambolleConfig
from src.prox.thresholding import WeightVector
from src.solvers import (
    SolveProblem,
    SolverConfig,
    energy,
    inner_subspace_min,
    iterative_threshold_solve,
    parallel_solve,
    sequential_solve,
    solve,
    surrogate_energy,
)
from src.solvers.problem import REASON_ETA, REASON_MAX_OUTER, REASON_TOL


def l1_oracle(matrix, g, alpha):
    """argmin ||Au - g||^2 + 2 alpha ||u||_1 via the split u = p - n with p, n >= 0"""
    n = matrix.shape[1]

    def objective(x):
        residual = matrix @ (x[:n] - x[n:]) - g
        value = float(residual @ residual + 2.0 * alpha * np.sum(x))
        grad_u = 2.0 * matrix.T @ residual
        return value, np.concatenate([grad_u + 2.0 * alpha, -grad_u + 2.0 * alpha])

    result = minimize(
        objective, np.zeros(2 * n), jac=True, method="L-BFGS-B",
        bounds=[(0.0, None)] * (2 * n), options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 20000},
    )
    return result.x[:n] - result.x[n:]


@pytest.fixture
def small_l1(rng):
    matrix = rng.standard_normal((30, 10))
    truth = np.zeros(10)
    truth[[1, 4, 7]] = [1.5, -2.0, 0.8]
    g = matrix @ truth + 0.01 * rng.standard_normal(30)
    return matrix, g


def test_problem_validation():
    op = IdentityMap((4,))
    with pytest.raises(ShapeMismatchError):
        SolveProblem.build(op, np.zeros(5), 1.0, "tv-1d")
    with pytest.raises(InvalidInputError):
        SolveProblem.build(op, np.zeros(4), -1.0, "tv-1d")
    with pytest.raises(InvalidInputError):
        SolveProblem.build(op, np.zeros(4), 1.0, "tv-3d")
    with pytest.raises(ShapeMismatchError):
        SolveProblem.build(op, np.zeros(4), 1.0, "tv-2d")
    with pytest.raises(CoercivityError):
        SolveProblem.build(MaskMap(np.zeros(4)), np.zeros(4), 1.0, "tv-1d")
    with pytest.raises(InvalidInputError):
        SolveProblem.build(op, np.zeros(4), 1.0, "tv-1d", weights=WeightVector(np.ones(4)))
    with pytest.raises(InvalidInputError):
        SolveProblem.build(op, np.zeros(4), 1.0, "l1", stripe=StripeSpec(6))
    with pytest.raises(ShapeMismatchError):
        SolveProblem.build(op, np.zeros(4), 1.0, "l1", decomposition=make_index_split(5, 1))
    with pytest.raises(InvalidInputError):
        SolveProblem.build(op, np.array([0.0, np.inf, 0.0, 0.0]), 1.0, "l1")


def test_build_rescales_to_target(small_l1):
    matrix, g = small_l1
    problem = SolveProblem.build(DenseMap(matrix), g, 0.5, "l1")
    assert problem.scale == pytest.approx(np.linalg.norm(matrix, 2) / 0.9, rel=1e-4)
    assert problem.original_alpha == pytest.approx(0.5)
    assert problem.decomposition.count == 1

    raw = SolveProblem.build(DenseMap(matrix), g, 0.5, "l1", rescale=False)
    assert raw.scale == 1.0
    assert raw.alpha == 0.5


def test_energy_is_in_original_units(small_l1, rng):
    matrix, g = small_l1
    problem = SolveProblem.build(DenseMap(matrix), g, 0.3, "l1")
    u = rng.standard_normal(10)
    expected = np.sum((matrix @ u - g) ** 2) + 2 * 0.3 * np.sum(np.abs(u))
    assert energy(problem, u) == pytest.approx(expected, rel=1e-12)

    tv = SolveProblem.build(IdentityMap((3,)), np.array([0.0, 1.0, 1.0]), 0.5, "tv-1d")
    assert energy(tv, np.zeros(3)) == pytest.approx(2.0)
    with pytest.raises(ShapeMismatchError):
        energy(tv, np.zeros(4))


def test_surrogate_dominates_energy(small_l1, rng):
    matrix, g = small_l1
    dec = make_index_split(10, 2)
    problem = SolveProblem.build(DenseMap(matrix), g, 0.3, "l1", decomposition=dec)
    u = rng.standard_normal(10)
    for _ in range(5):
        a = dec.project(0, rng.standard_normal(10))
        assert surrogate_energy(problem, u, a, 0) >= energy(problem, u) - 1e-12
    assert surrogate_energy(problem, u, dec.project(0, u), 0) == pytest.approx(energy(problem, u))


def test_solver_config_defaults_and_validation():
    tv = SolverConfig.from_config("tv-1d")
    l1 = SolverConfig.from_config("l1", max_outer=7)
    assert tv.inner_iters == (5,)
    assert l1.inner_iters == (30,)
    assert l1.eta_max_iters == 20
    assert l1.max_outer == 7

    cfg = SolverConfig(inner_iters=(2, 3))
    assert cfg.inner_for(1) == 3
    with pytest.raises(InvalidInputError):
        cfg.inner_for(2)
    assert SolverConfig(inner_iters=4).inner_for(9) == 4

    with pytest.raises(InvalidInputError):
        SolverConfig(inner_iters=(0,))
    with pytest.raises(InvalidInputError):
        SolverConfig(max_outer=0)
    with pytest.raises(InvalidInputError):
        SolverConfig(max_workers=0)


def test_baseline_matches_lasso_oracle(small_l1):
    matrix, g = small_l1
    alpha = 0.5
    problem = SolveProblem.build(DenseMap(matrix), g, alpha, "l1")
    cfg = SolverConfig.from_config("l1", outer_tol=1e-14, max_outer=20000)
    result = iterative_threshold_solve(problem, cfg, timing=False)
    assert result.reason == REASON_TOL
    assert np.linalg.norm(result.u - l1_oracle(matrix, g, alpha)) < 1e-4
    assert result.energy_increases == 0
    assert np.all(np.diff(result.trace.energies) <= 1e-12 * result.trace.energies[0])


@pytest.mark.parametrize("psi_kind", ["l1", "tv-1d"])
def test_single_subspace_reproduces_baseline_bit_for_bit(psi_kind, rng):
    if psi_kind == "l1":
        op = DenseMap(rng.standard_normal((20, 8)))
        g = rng.standard_normal(20)
        dec = make_index_split(8, 1)
    else:
        op = MaskMap((rng.uniform(size=30) > 0.3).astype(float))
        g = rng.standard_normal(30)
        dec = make_stripes(30, 1)
    problem = SolveProblem.build(op, g, 0.2, psi_kind, decomposition=dec)
    cfg = SolverConfig.from_config(psi_kind, inner_iters=(1,), max_outer=15, outer_tol=0.0)

    baseline = iterative_threshold_solve(problem, cfg, timing=False)
    sequential = sequential_solve(problem, cfg, timing=False)
    np.testing.assert_array_equal(sequential.u, baseline.u)
    np.testing.assert_array_equal(sequential.trace.energies, baseline.trace.energies)
    assert sequential.reason == baseline.reason == REASON_MAX_OUTER


def test_two_node_inner_minimization():
    # T = I/2, g = (2, 0): z = (1, 0) on the first node, eta -> (0, 1), u1* = 0
    problem = SolveProblem.build(
        DenseMap(0.5 * np.eye(2)), np.array([2.0, 0.0]), 1.0, "tv-1d",
        decomposition=make_stripes(2, 2), rescale=False,
    )
    cfg = SolverConfig(
        inner_iters=(1,), eta_max_iters=200, eta_rel_tol=1e-12,
        chambolle=ChambolleConfig(tol=1e-9, max_iters=200000),
    )
    penalty = problem.make_penalty(cfg.chambolle)
    u_i, state = inner_subspace_min(problem, np.zeros(2), 0, 1, problem.decomposition, penalty, cfg)
    np.testing.assert_allclose(u_i, [0.0, 0.0], atol=5e-4)
    np.testing.assert_allclose(state.eta, [0.0, 1.0], atol=5e-4)


def test_l1_index_split_sequential_agrees_with_baseline(small_l1):
    matrix, g = small_l1
    problem = SolveProblem.build(DenseMap(matrix), g, 0.5, "l1", decomposition=make_index_split(10, 2))
    cfg = SolverConfig.from_config("l1", inner_iters=(10,), outer_tol=1e-14, max_outer=5000)
    result = sequential_solve(problem, cfg, timing=False)
    reference = iterative_threshold_solve(problem, SolverConfig.from_config("l1", outer_tol=1e-14, max_outer=20000))
    assert result.final_energy == pytest.approx(reference.final_energy, rel=1e-6)
    assert result.energy_increases == 0
    assert result.warnings == []

    splitting = sequential_solve(problem, SolverConfig.from_config(
        "l1", inner_iters=(10,), outer_tol=1e-14, max_outer=5000, use_splitting=True,
    ), timing=False)
    np.testing.assert_allclose(splitting.u, result.u, atol=1e-10)


def test_rotated_subspaces_are_flagged_uncertified(small_l1):
    matrix, g = small_l1
    problem = SolveProblem.build(
        DenseMap(matrix), g, 0.5, "l1", decomposition=make_random_orthogonal(10, 2, seed=3)
    )
    result = sequential_solve(problem, SolverConfig.from_config("l1", max_outer=20), timing=False)
    assert any("not certified" in w for w in result.warnings)
    assert result.final_energy < result.trace.energies[0]


def test_parallel_merge_is_independent_of_threads():
    g, mask = signal_experiment("ramp-1d", 60, 10)
    problem = SolveProblem.build(MaskMap(mask), mask * g, 1.0, "tv-1d", decomposition=make_stripes(60, 4))
    serial = parallel_solve(problem, SolverConfig.from_config("tv-1d", max_outer=6, max_workers=1), timing=False)
    threaded = parallel_solve(problem, SolverConfig.from_config("tv-1d", max_outer=6, max_workers=4), timing=False)
    np.testing.assert_array_equal(serial.u, threaded.u)
    assert serial.final_energy < serial.trace.energies[0]

    dispatched = solve(problem, SolverConfig.from_config("tv-1d", max_outer=6, parallel=True), timing=False)
    np.testing.assert_array_equal(dispatched.u, serial.u)


def test_parallel_step_is_average_of_single_updates(small_l1):
    matrix, g = small_l1
    dec = make_index_split(10, 2)
    problem = SolveProblem.build(DenseMap(matrix), g, 0.5, "l1", decomposition=dec)
    cfg = SolverConfig.from_config("l1", inner_iters=(3,), max_outer=1)
    result = parallel_solve(problem, cfg, timing=False)

    penalty = problem.make_penalty()
    u0 = np.zeros(10)
    new = [inner_subspace_min(problem, u0, i, 3, dec, penalty, cfg)[0] for i in range(2)]
    np.testing.assert_allclose(result.u, (new[0] + new[1] + u0) / 2.0, atol=1e-14)


def assert_descends_and_settles(result):
    energies = result.trace.energies
    assert result.reason == REASON_TOL
    assert np.max(np.diff(energies)) <= 1e-12 * (1.0 + energies[0])
    assert result.energy_increases == 0
    assert result.trace.increments[-1] < 1e-5


def denoising_1d_problem():
    g, _ = signal_experiment("step-1d", 200)
    noisy = g + 0.05 * np.random.default_rng(3).standard_normal(200)
    return SolveProblem.build(IdentityMap((200,)), noisy, 1.0, "tv-1d", decomposition=make_stripes(200, 2))


def tight_tv_config(psi_kind, max_outer, chambolle_tol):
    # |dJ| < outer_tol bounds the last step by sqrt(outer_tol / 0.19) since ||T|| = 0.9
    return SolverConfig.from_config(
        psi_kind,
        max_outer=max_outer,
        outer_tol=1e-11,
        eta_max_iters=2000,
        eta_rel_tol=1e-10,
        chambolle=ChambolleConfig(tol=chambolle_tol, max_iters=200000),
    )


def test_sequential_tv_denoising_is_monotone():
    result = sequential_solve(denoising_1d_problem(), tight_tv_config("tv-1d", 2000, 1e-9), timing=False)
    assert_descends_and_settles(result)
    # the jump at the interface survives
    assert result.u[120] - result.u[80] > 0.9


@pytest.mark.slow
def test_parallel_tv_denoising_is_monotone():
    result = parallel_solve(denoising_1d_problem(), tight_tv_config("tv-1d", 4000, 1e-9), timing=False)
    assert_descends_and_settles(result)
    assert result.u[120] - result.u[80] > 0.9


def test_switch_schedule_resets_and_continues(small_l1):
    matrix, g = small_l1
    op = DenseMap(matrix)
    schedule = SwitchSchedule(2, make_svd_q(op, 2), make_index_split(10, 2))
    problem = SolveProblem.build(op, g, 0.5, "l1", decomposition=schedule.initial, schedule=schedule)
    cfg = SolverConfig.from_config("l1", max_outer=10, outer_tol=0.0, use_splitting=True)
    result = sequential_solve(problem, cfg, timing=False)
    assert len(result.trace) == 11
    assert result.warnings == []
    assert result.final_energy < result.trace.energies[2]


def test_eta_divergence_keeps_previous_iterate(monkeypatch, small_l1):
    matrix, g = small_l1
    problem = SolveProblem.build(
        DenseMap(matrix), g, 0.5, "l1", decomposition=make_random_orthogonal(10, 2, seed=1)
    )

    def diverging(z, u2, alpha, projector, complement, **kwargs):
        return EtaState(np.full(z.shape, 1e9), 1, diverged=True, converged=False)

    monkeypatch.setattr(subspace_module, "eta_fixed_point", diverging)
    result = sequential_solve(problem, SolverConfig.from_config("l1", max_outer=5), timing=False)
    assert result.reason == REASON_ETA
    np.testing.assert_array_equal(result.u, np.zeros(10))
    assert len(result.trace) == 1
    assert any("eta" in w for w in result.warnings)


def test_trace_csv(tmp_path, small_l1):
    matrix, g = small_l1
    problem = SolveProblem.build(DenseMap(matrix), g, 0.5, "l1")
    result = iterative_threshold_solve(problem, SolverConfig.from_config("l1", max_outer=3), timing=False)
    path = result.trace.to_csv(tmp_path / "trace.csv")
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["iter", "energy", "increment", "seconds"]
    assert list(frame["iter"]) == [0, 1, 2, 3]
    assert (frame["seconds"] == 0.0).all()
    summary = result.summary()
    assert summary["outer_iterations"] == 3
    assert summary["reason"] == REASON_MAX_OUTER


@pytest.mark.slow
@pytest.mark.parametrize("kind", ["step-1d", "ramp-1d", "tent-1d"])
def test_two_stripes_match_single_domain(kind):
    g, mask = signal_experiment(kind, 200, 10)
    op = MaskMap(mask)
    problem = SolveProblem.build(op, mask * g, 1.0, "tv-1d", decomposition=make_stripes(200, 2))
    cfg = SolverConfig.from_config(
        "tv-1d", max_outer=3000, outer_tol=1e-13, chambolle=ChambolleConfig(tol=1e-7, max_iters=50000)
    )
    split = sequential_solve(problem, cfg, timing=False)
    single = sequential_solve(problem.with_decomposition(make_stripes(200, 1)), cfg, timing=False)
    assert np.max(np.abs(split.u - single.u)) < 1e-3
    if kind == "step-1d":
        jump = lambda u: u[100] - u[99]  # noqa: E731
        assert jump(split.u) == pytest.approx(jump(single.u), abs=1e-3)


@pytest.mark.slow
@pytest.mark.parametrize("count", [2, 5])
def test_inpainting_2d_is_monotone(count):
    from src.experiments import synthetic_image

    image, mask = synthetic_image(64, seed=0)
    problem = SolveProblem.build(
        MaskMap(mask), mask * image, 1e-2, "tv-2d",
        decomposition=make_stripes((64, 64), count), stripe=StripeSpec(10),
    )
    cfg = tight_tv_config("tv-2d", 3000, 1e-7)
    for result in (sequential_solve(problem, cfg, timing=False), parallel_solve(problem, cfg, timing=False)):
        assert_descends_and_settles(result)
        assert result.trace.energies[-1] < result.trace.energies[0]


@pytest.mark.slow
def test_l1_gaussian_index_split_matches_baseline():
    matrix, _, g = gaussian_l1(200, 40, 5, 0.01, seed=7)
    op = DenseMap(matrix)
    problem = SolveProblem.build(op, g, 0.005, "l1", decomposition=make_index_split(40, 5))
    cfg = SolverConfig.from_config("l1", eta_max_iters=20, outer_tol=1e-13, max_outer=3000)
    result = sequential_solve(problem, cfg, timing=False)
    reference = iterative_threshold_solve(problem, cfg, timing=False)
    assert result.final_energy == pytest.approx(reference.final_energy, rel=1e-4)
    assert_descends_and_settles(result)


@pytest.mark.slow
def test_l1_gaussian_index_split_parallel_is_monotone():
    matrix, _, g = gaussian_l1(200, 40, 5, 0.01, seed=7)
    problem = SolveProblem.build(DenseMap(matrix), g, 0.005, "l1", decomposition=make_index_split(40, 5))
    cfg = SolverConfig.from_config("l1", eta_max_iters=20, outer_tol=1e-11, max_outer=6000)
    result = parallel_solve(problem, cfg, timing=False)
    assert_descends_and_settles(result)
    reference = iterative_threshold_solve(problem, cfg, timing=False)
    assert result.final_energy == pytest.approx(reference.final_energy, rel=1e-4)


def test_default_tv_run_logs_leakage_at_debug_only(log_records):
    g, _ = signal_experiment("step-1d", 60)
    noisy = g + 0.05 * np.random.default_rng(5).standard_normal(60)
    problem = SolveProblem.build(IdentityMap((60,)), noisy, 1.0, "tv-1d", decomposition=make_stripes(60, 2))
    sequential_solve(problem, SolverConfig.from_config("tv-1d", max_outer=5), timing=False)

    leakage = [level for level, component, text in log_records if component == "oblique" and "leakage" in text]
    assert leakage
    assert set(leakage) == {"DEBUG"}
    assert not [text for level, _, text in log_records if level == "WARNING" and "leak" in text]
