import numpy as np
import pytest

from app.core.exceptions import InputError, NonInteriorError, NotEfficientError
from app.models import SolverConfig
from app.services.games import Game
from app.services.pareto import (
    certify_efficiency,
    dominates,
    frontier_weights,
    interior_spread,
    normalize_weights,
    pareto_point,
    scalarize,
    sweep_frontier,
)
from tests.utils.utils import bundled_game


def test_scalarize_uniform_weights(qpg: Game, cfg: SolverConfig) -> None:
    point = scalarize(qpg, [0.5, 0.5], cfg)
    np.testing.assert_allclose(point.x, [1.5, 1.5], atol=1e-6)
    np.testing.assert_allclose(point.m, [0.5, 0.5])


def test_scalarize_worked_example(qpg: Game, cfg: SolverConfig) -> None:
    point = scalarize(qpg, [2 / 3, 1 / 3], cfg)
    np.testing.assert_allclose(point.x, [1.25, 2.0], atol=1e-6)
    np.testing.assert_allclose(point.payoffs, qpg.payoffs(np.array(point.x)))
    assert point.cert_residual <= 1e-6


def test_scalarize_normalizes_weights(qpg: Game, cfg: SolverConfig) -> None:
    point = scalarize(qpg, [2.0, 1.0], cfg)
    np.testing.assert_allclose(point.m, [2 / 3, 1 / 3])
    np.testing.assert_allclose(point.x, [1.25, 2.0], atol=1e-6)


def test_symmetric_weights_give_symmetric_point(cournot: Game, cfg: SolverConfig) -> None:
    point = scalarize(cournot, [0.5, 0.5], cfg)
    assert point.x[0] == pytest.approx(point.x[1], abs=1e-8)


@pytest.mark.parametrize("weights", [[0.0, 1.0], [-1.0, 2.0], [1.0], [np.nan, 1.0]])
def test_invalid_weights(weights: list[float]) -> None:
    with pytest.raises(InputError):
        normalize_weights(weights, 2)


def test_boundary_optimum_is_rejected(cournot_linear: Game, cfg: SolverConfig) -> None:
    # without own cost curvature the favoured firm takes the whole market
    with pytest.raises(NonInteriorError) as exc_info:
        scalarize(cournot_linear, [0.7, 0.3], cfg)
    assert min(exc_info.value.x) == 0.0


def test_certify_worked_example(qpg: Game) -> None:
    cert = certify_efficiency(qpg, [1.25, 2.0], tol=1e-6)
    assert cert.accepted
    np.testing.assert_allclose(cert.m, [2 / 3, 1 / 3], atol=1e-6)


def test_certify_rejects_nash_profile(qpg: Game) -> None:
    cert = certify_efficiency(qpg, [1.0, 1.0], tol=1e-6)
    assert not cert.accepted
    assert cert.reason


def test_certify_antiparallel_gradients(qpg: Game) -> None:
    cert = certify_efficiency(qpg, [1.5, 1.5], tol=1e-6)
    assert cert.accepted
    np.testing.assert_allclose(cert.m, [0.5, 0.5], atol=1e-9)


def test_certify_rejects_boundary_profile(qpg: Game) -> None:
    assert not certify_efficiency(qpg, [0.0, 1.0]).accepted


def test_pareto_point_from_profile(qpg: Game, cfg: SolverConfig) -> None:
    point = pareto_point(qpg, [1.25, 2.0], cfg)
    np.testing.assert_allclose(point.m, [2 / 3, 1 / 3], atol=1e-6)
    with pytest.raises(NotEfficientError):
        pareto_point(qpg, [1.0, 1.0], cfg)


def test_two_player_weight_grid() -> None:
    weights = frontier_weights(2, 11)
    np.testing.assert_allclose(weights[:, 0], np.arange(1, 12) / 12)
    np.testing.assert_allclose(weights.sum(axis=1), 1.0)


def test_simplex_weights_for_three_players() -> None:
    weights = frontier_weights(3, 25)
    assert weights.shape == (25, 3)
    np.testing.assert_allclose(weights[0], [1 / 3, 1 / 3, 1 / 3])
    np.testing.assert_allclose(weights.sum(axis=1), 1.0)
    assert np.all(weights > 0)
    np.testing.assert_array_equal(weights, frontier_weights(3, 25))


def test_spread_contracts_towards_barycenter() -> None:
    np.testing.assert_allclose(frontier_weights(2, 3, 0.0), 0.5)


def test_interior_games_keep_the_full_grid(qpg: Game, cfg: SolverConfig) -> None:
    assert interior_spread(qpg, 11, cfg) == 1.0


@pytest.mark.parametrize("name", ["qpg3", "cournot3", "commons3"])
def test_three_player_sweeps_stay_interior(name: str, cfg: SolverConfig) -> None:
    game = bundled_game(name)
    spread = interior_spread(game, 25, cfg)
    for w in frontier_weights(3, 25, spread):
        assert min(scalarize(game, w, cfg).x) > 0
    sweep = sweep_frontier(game, 25, cfg)
    assert len(sweep.points) == 25
    assert sweep.boundary_rejections == 0


def test_sweep_quadratic_frontier(qpg: Game, cfg: SolverConfig) -> None:
    sweep = sweep_frontier(qpg, 11, cfg)
    assert len(sweep.points) == 11
    assert sweep.boundary_rejections == 0
    xs = np.array([p.x for p in sweep.points])
    assert np.min(np.abs(xs - [1.5, 1.5]).max(axis=1)) <= 1e-6
    assert np.min(np.abs(xs - [1.25, 2.0]).max(axis=1)) <= 1e-6


def test_single_point_sweep_is_utilitarian(qpg: Game, cfg: SolverConfig) -> None:
    sweep = sweep_frontier(qpg, 1, cfg)
    assert len(sweep.points) == 1
    np.testing.assert_allclose(sweep.points[0].m, [0.5, 0.5])


def test_cournot_sweep_is_monotone(cournot: Game, cfg: SolverConfig) -> None:
    sweep = sweep_frontier(cournot, 11, cfg)
    m1 = [p.m[0] for p in sweep.points]
    x1 = [p.x[0] for p in sweep.points]
    assert m1 == sorted(m1)
    assert np.all(np.diff(x1) > 0)


@pytest.mark.parametrize("name", ["qpg", "qpg3", "cournot", "commons"])
def test_sweep_points_are_certified_and_undominated(name: str, cfg: SolverConfig) -> None:
    game = bundled_game(name)
    sweep = sweep_frontier(game, 11, cfg)
    assert sweep.points
    for p in sweep.points:
        assert certify_efficiency(game, p.x, tol=1e-6).accepted
    for p in sweep.points:
        for q in sweep.points:
            assert not dominates(q.payoffs, p.payoffs) or p is q


@pytest.mark.parametrize("m1", [0.2, 0.35, 0.6, 0.8])
def test_certification_recovers_weights(qpg: Game, cfg: SolverConfig, m1: float) -> None:
    point = scalarize(qpg, [m1, 1.0 - m1], cfg)
    cert = certify_efficiency(qpg, point.x, tol=1e-6)
    np.testing.assert_allclose(cert.m, point.m, atol=1e-4)


def test_dominance() -> None:
    assert dominates([1.125, 1.125], [1.0, 1.0], strict=True)
    assert dominates([1.0, 2.0], [1.0, 1.0])
    assert not dominates([1.0, 2.0], [1.0, 1.0], strict=True)
    assert not dominates([1.0, 1.0], [1.0, 1.0])
