from functools import partial

import numpy as np
import pytest

from src.decomp import make_random_orthogonal, make_stripes
from src.errors import EtaDivergenceError, InvalidInputError
from src.experiments import signal_experiment
from src.oblique import (
    EtaState,
    StripePiece,
    StripeSpec,
    eta_fixed_point,
    extend_from_stripes,
    oblique_threshold,
    restrict_to_stripe,
    restricted_eta,
)
from src.prox import L1Penalty, TVPenalty
from src.prox.chambolle import ChambolleConfig
from tests.oracles import exact_tv_projection_1d, oblique_oracle_l1, oblique_oracle_tv


def two_node_projection(w, alpha):
    """Exact P_{alpha K} for TV on two nodes: K = {(t, -t) : |t| <= 1}"""
    t = np.clip((w[0] - w[1]) / 2.0, -alpha, alpha)
    return np.array([t, -t])


def first_node(u):
    return np.array([u[0], 0.0])


def second_node(u):
    return np.array([0.0, u[1]])


def test_two_node_instance_exact():
    z, u2 = np.array([1.0, 0.0]), np.zeros(2)
    state = eta_fixed_point(z, u2, 1.0, two_node_projection, second_node, max_iters=200, rel_tol=1e-15)
    np.testing.assert_allclose(state.eta, [0.0, 1.0], atol=1e-12)
    assert state.converged and not state.diverged

    u1 = oblique_threshold(
        z, u2, 1.0, state, lambda w, a: w - two_node_projection(w, a), first_node, subspace=0
    )
    np.testing.assert_allclose(u1, [0.0, 0.0], atol=1e-12)


def test_two_node_instance_with_chambolle():
    penalty = TVPenalty(ChambolleConfig(tol=1e-9, max_iters=200000))
    z, u2 = np.array([1.0, 0.0]), np.zeros(2)
    state = eta_fixed_point(
        z, u2, 1.0, partial(penalty.project, key="eta"), second_node, max_iters=200, rel_tol=1e-12
    )
    np.testing.assert_allclose(state.eta, [0.0, 1.0], atol=5e-4)
    u1 = oblique_threshold(z, u2, 1.0, state, penalty.threshold, first_node)
    np.testing.assert_allclose(u1, [0.0, 0.0], atol=5e-4)


def test_eta_stops_at_iteration_cap():
    z, u2 = np.array([1.0, 0.0]), np.zeros(2)
    state = eta_fixed_point(z, u2, 1.0, two_node_projection, second_node, max_iters=3, rel_tol=1e-15)
    assert state.iters_used == 3
    assert not state.converged
    # eta_m = 1 - 2^-m from a cold start
    assert state.eta[1] == pytest.approx(1.0 - 2.0**-3)


def test_eta_warm_start_is_projected_to_complement():
    z, u2 = np.array([1.0, 0.0]), np.zeros(2)
    state = eta_fixed_point(
        z, u2, 1.0, two_node_projection, second_node, warm_start=np.array([5.0, 1.0]), max_iters=5
    )
    assert state.eta[0] == 0.0
    assert state.iters_used == 1


def test_divergence_is_flagged_then_raised():
    explode = lambda w, a: 4.0 * w  # noqa: E731
    z, u2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    state = eta_fixed_point(z, u2, 1.0, explode, second_node, max_iters=100, guard=10.0)
    assert state.diverged
    with pytest.raises(EtaDivergenceError) as info:
        oblique_threshold(z, u2, 1.0, state, explode, first_node, subspace=1)
    assert info.value.subspace == 1
    assert info.value.norm > 10.0


def test_eta_rejects_bad_arguments():
    with pytest.raises(InvalidInputError):
        eta_fixed_point(np.zeros(2), np.zeros(2), -1.0, two_node_projection, second_node)
    with pytest.raises(InvalidInputError):
        eta_fixed_point(np.zeros(2), np.zeros(2), 1.0, two_node_projection, second_node, max_iters=0)


def test_oblique_l1_matches_constrained_oracle(rng):
    for trial in range(25):
        dim = int(rng.integers(3, 9))
        dec = make_random_orthogonal(dim, 2, seed=trial)
        z = dec.project(0, rng.standard_normal(dim))
        u2 = dec.project(1, rng.standard_normal(dim))
        alpha = float(rng.uniform(0.05, 0.5))
        penalty = L1Penalty()

        state = eta_fixed_point(
            z, u2, alpha, penalty.project, partial(dec.complement, 0), max_iters=20000, rel_tol=1e-13
        )
        u1 = oblique_threshold(z, u2, alpha, state, penalty.threshold, partial(dec.project, 0))
        start, stop = dec.blocks[0]
        expected = oblique_oracle_l1(z, u2, alpha, dec.q[:, start:stop])
        assert np.linalg.norm(u1 - expected) < 1e-4


def test_oblique_tv_stripes_match_constrained_oracle(rng):
    for _ in range(25):
        n = int(rng.integers(4, 17))
        dec = make_stripes(n, 2)
        z = dec.project(0, rng.standard_normal(n))
        u2 = dec.project(1, rng.standard_normal(n))
        alpha = float(rng.uniform(0.1, 0.8))

        state = eta_fixed_point(
            z, u2, alpha, exact_tv_projection_1d, partial(dec.complement, 0), max_iters=2000, rel_tol=1e-12
        )
        u1 = oblique_threshold(
            z, u2, alpha, state, lambda w, a: w - exact_tv_projection_1d(w, a), partial(dec.project, 0)
        )
        start, stop = dec.blocks[0]
        expected = oblique_oracle_tv(z, u2, alpha, start, stop)
        assert np.linalg.norm(u1 - expected) < 1e-4


def test_stripe_bands_around_interfaces():
    two = make_stripes(40, 2)
    assert restrict_to_stripe(two, 0, StripeSpec(5)) == [StripePiece(15, 25, 15, 20)]
    assert restrict_to_stripe(two, 1, StripeSpec(5)) == [StripePiece(15, 25, 20, 25)]

    three = make_stripes(60, 3)
    assert restrict_to_stripe(three, 1, StripeSpec(5)) == [
        StripePiece(15, 25, 20, 25),
        StripePiece(35, 45, 35, 40),
    ]


def test_stripe_bands_are_clipped_and_merged():
    narrow = make_stripes(12, 3)
    assert restrict_to_stripe(narrow, 1, StripeSpec(6)) == [StripePiece(0, 12, 4, 8)]


def test_stripe_restriction_needs_stripes():
    assert restrict_to_stripe(make_stripes(10, 1), 0, StripeSpec(6)) == []
    with pytest.raises(InvalidInputError):
        restrict_to_stripe(make_random_orthogonal(4, 2, seed=0), 0, StripeSpec(6))
    with pytest.raises(InvalidInputError):
        restrict_to_stripe(make_stripes(10, 2), 2, StripeSpec(6))
    with pytest.raises(InvalidInputError):
        StripeSpec(0)


def test_stripe_piece_helpers():
    piece = StripePiece(2, 6, 2, 4)
    values = np.arange(8.0)
    np.testing.assert_array_equal(piece.take(values), [2.0, 3.0, 4.0, 5.0])
    np.testing.assert_array_equal(piece.complement(np.ones(4)), [0.0, 0.0, 1.0, 1.0])
    full = extend_from_stripes((8,), [piece], [np.ones(4)])
    np.testing.assert_array_equal(full, [0, 0, 1, 1, 1, 1, 0, 0])


def test_restricted_eta_without_bands_is_zero():
    state = restricted_eta(np.ones(5), np.zeros(5), 1.0, [], lambda k: exact_tv_projection_1d)
    np.testing.assert_array_equal(state.eta, np.zeros(5))
    assert isinstance(state, EtaState)


def test_wide_stripe_reproduces_full_eta(rng):
    n = 24
    dec = make_stripes(n, 2)
    z = dec.project(0, rng.standard_normal(n))
    u2 = dec.project(1, rng.standard_normal(n))
    options = {"max_iters": 2000, "rel_tol": 1e-13}

    full = eta_fixed_point(z, u2, 0.4, exact_tv_projection_1d, partial(dec.complement, 0), **options)
    pieces = restrict_to_stripe(dec, 0, StripeSpec(12))
    assert pieces == [StripePiece(0, 24, 0, 12)]
    banded = restricted_eta(z, u2, 0.4, pieces, lambda k: exact_tv_projection_1d, **options)
    np.testing.assert_allclose(banded.eta, full.eta, atol=1e-9)


def tv_stripe_instance(rng, n):
    dec = make_stripes(n, 2)
    z = dec.project(0, rng.standard_normal(n))
    u2 = dec.project(1, rng.standard_normal(n))
    return dec, z, u2


def exact_tv_threshold(w, alpha):
    return w - exact_tv_projection_1d(w, alpha)


def test_oblique_tv_is_nonexpansive_in_z(rng):
    for _ in range(15):
        n = int(rng.integers(4, 13))
        dec, z, u2 = tv_stripe_instance(rng, n)
        other = dec.project(0, rng.standard_normal(n))
        alpha = float(rng.uniform(0.1, 0.8))

        def threshold(point):
            state = eta_fixed_point(
                point, u2, alpha, exact_tv_projection_1d, partial(dec.complement, 0), max_iters=5000, rel_tol=1e-14
            )
            return oblique_threshold(point, u2, alpha, state, exact_tv_threshold, partial(dec.project, 0))

        assert np.linalg.norm(threshold(z) - threshold(other)) <= np.linalg.norm(z - other) + 1e-8


def test_oblique_l1_is_nonexpansive_in_z(rng):
    penalty = L1Penalty()
    for trial in range(15):
        dim = int(rng.integers(3, 9))
        dec = make_random_orthogonal(dim, 2, seed=100 + trial)
        u2 = dec.project(1, rng.standard_normal(dim))
        alpha = float(rng.uniform(0.05, 0.5))

        def threshold(point):
            state = eta_fixed_point(
                point, u2, alpha, penalty.project, partial(dec.complement, 0), max_iters=20000, rel_tol=1e-14
            )
            return oblique_threshold(point, u2, alpha, state, penalty.threshold, partial(dec.project, 0))

        z, other = (dec.project(0, rng.standard_normal(dim)) for _ in range(2))
        assert np.linalg.norm(threshold(z) - threshold(other)) <= np.linalg.norm(z - other) + 1e-6


def test_converged_eta_has_small_fixed_point_residual(rng):
    penalty = L1Penalty()
    for trial in range(20):
        n = int(rng.integers(4, 17))
        alpha = float(rng.uniform(0.05, 0.8))
        if trial % 2:
            dec, z, u2 = tv_stripe_instance(rng, n)
            projector = exact_tv_projection_1d
        else:
            dec = make_random_orthogonal(n, 2, seed=trial)
            z, u2 = dec.project(0, rng.standard_normal(n)), dec.project(1, rng.standard_normal(n))
            projector = penalty.project
        complement = partial(dec.complement, 0)

        state = eta_fixed_point(z, u2, alpha, projector, complement, max_iters=5000)
        assert state.converged
        residual = state.eta - complement(projector(state.eta - (z + u2), alpha))
        assert np.linalg.norm(residual) <= 1e-3 * (1.0 + np.linalg.norm(z + u2))


def test_stripe_eta_agrees_with_full_eta_on_a_step():
    g, _ = signal_experiment("step-1d", 100)
    dec = make_stripes(100, 2)
    z, u2 = dec.project(0, g), dec.project(1, g)
    alpha = 0.01
    options = {"max_iters": 200, "rel_tol": 1e-12}

    full = eta_fixed_point(z, u2, alpha, exact_tv_projection_1d, partial(dec.complement, 0), **options)
    pieces = restrict_to_stripe(dec, 0, StripeSpec(10))
    assert pieces == [StripePiece(40, 60, 40, 50)]
    banded = restricted_eta(z, u2, alpha, pieces, lambda k: exact_tv_projection_1d, **options)
    assert banded.converged and full.converged
    assert np.max(np.abs(banded.eta - full.eta)) < 1e-3

    first = partial(dec.project, 0)
    np.testing.assert_allclose(
        oblique_threshold(z, u2, alpha, banded, exact_tv_threshold, first),
        oblique_threshold(z, u2, alpha, full, exact_tv_threshold, first),
        atol=1e-6,
    )
