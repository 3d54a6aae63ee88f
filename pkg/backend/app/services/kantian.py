import logging

import numpy as np
from scipy.optimize import brentq

from app.core.config import settings
from app.core.exceptions import (
    DegenerateRootError,
    InputError,
    NonConvergenceError,
    SingularGradientError,
)
from app.models import (
    EquilibriumKind,
    EquilibriumReport,
    MKEScan,
    NashMKEComparison,
    SolverConfig,
    Verdict,
)
from app.services.games import VALIDATION_BOX, PayoffModel, as_profile
from app.services.pareto import dominates
from app.services.solve import argmax_1d_batch, solve_damped_newton

logger = logging.getLogger(__name__)

MAX_DOUBLINGS = 60


def residual_scale(G: np.ndarray, x: np.ndarray) -> float:
    return max(1.0, float(np.linalg.norm(G, axis=1).max()) * float(np.linalg.norm(x)))


def mke_residual(game: PayoffModel, x: np.ndarray | list[float]) -> np.ndarray:
    """MKE residuals grad U_i(x) . x; zero exactly at candidate MKE."""
    x = as_profile(game, x)
    return game.gradient(x) @ x


def verify_mke(
    game: PayoffModel,
    x: np.ndarray | list[float],
    a_hi: float | None = None,
    cfg: SolverConfig | None = None,
) -> EquilibriumReport:
    """Check U_i(x) >= U_i(a x) on [0, a_hi] with the 1-D argmax oracle."""
    cfg = cfg or SolverConfig()
    a_hi = settings.A_HI if a_hi is None else a_hi
    if a_hi <= 1.0:
        raise InputError(f"a_hi must exceed 1, got {a_hi}")
    x = as_profile(game, x)
    if not np.any(x > 0):
        raise InputError("verify_mke needs a nonzero profile")
    G = game.gradient(x)
    residuals = G @ x
    max_residual = float(np.abs(residuals).max()) / residual_scale(G, x)

    def along_ray(a: np.ndarray) -> np.ndarray:
        return game.payoffs(np.multiply.outer(a, x))

    argmaxes = argmax_1d_batch(along_ray, 0.0, a_hi, cfg)
    ok = max_residual <= cfg.residual_tol and bool(
        np.all(np.abs(argmaxes - 1.0) <= cfg.argmax_delta)
    )
    return EquilibriumReport(
        kind=EquilibriumKind.MKE,
        x=x.tolist(),
        payoffs=game.payoffs(x).tolist(),
        residuals=residuals.tolist(),
        oracle_argmax=argmaxes.tolist(),
        verdict=Verdict.VERIFIED if ok else Verdict.FAILED,
        max_residual=max_residual,
        a_hi=a_hi,
        delta=cfg.argmax_delta,
    )


def solve_mke(
    game: PayoffModel,
    x0: np.ndarray | list[float],
    cfg: SolverConfig | None = None,
    a_hi: float | None = None,
) -> EquilibriumReport:
    """Damped Newton on the MKE residuals, rows divided by the own strategy.

    Dividing row i by x_i removes the factor that makes x = 0 a root and
    leaves the strictly positive roots unchanged.
    """
    cfg = cfg or SolverConfig()
    start = as_profile(game, x0)
    if np.any(start <= 0):
        raise InputError("solve_mke needs a strictly positive starting profile")

    def normalized(x: np.ndarray) -> np.ndarray:
        if np.any(x <= 0):
            return np.full(game.n, np.inf)
        try:
            return (game.gradient(x) @ x) / x
        except SingularGradientError:
            return np.full(game.n, np.inf)

    x, iterations = solve_damped_newton(normalized, start, cfg)
    if np.any(x <= 1e-8 * max(1.0, float(np.abs(x).max()))):
        raise DegenerateRootError(f"Newton converged to a non-positive root {x.tolist()}", x)
    report = verify_mke(game, x, a_hi, cfg)
    logger.info(
        "MKE root %s after %d Newton iterations: %s",
        np.round(x, 9).tolist(),
        iterations,
        report.verdict.value,
    )
    return report.model_copy(update={"iterations": iterations})


def _own_slope(game: PayoffModel, x: np.ndarray, i: int, t: float) -> float:
    y = x.copy()
    y[i] = t
    return float(game.gradient(y)[i, i])


def best_response(game: PayoffModel, x: np.ndarray, i: int) -> float:
    """Maximizer of U_i over own strategy >= 0, others fixed at x."""
    lo = 0.0
    try:
        at_zero = _own_slope(game, x, i, 0.0)
    except SingularGradientError:
        at_zero = np.inf
    if at_zero <= 0:
        return 0.0
    hi = max(1.0, 2.0 * float(x[i]))
    for _ in range(MAX_DOUBLINGS):
        if _own_slope(game, x, i, hi) < 0:
            break
        hi *= 2.0
    else:
        raise NonConvergenceError(f"No upper bracket for player {i + 1}'s best response", x, 0)
    if not np.isfinite(at_zero):
        lo = hi * 1e-12
    return float(brentq(lambda t: _own_slope(game, x, i, t), lo, hi, xtol=1e-14))


def solve_nash(
    game: PayoffModel,
    x0: np.ndarray | list[float] | None = None,
    cfg: SolverConfig | None = None,
) -> EquilibriumReport:
    """Iterated (Gauss-Seidel) best response, certified by own-derivative residuals."""
    cfg = cfg or SolverConfig()
    x = np.ones(game.n) if x0 is None else as_profile(game, x0).copy()
    for sweep in range(1, cfg.max_iter + 1):
        previous = x.copy()
        for i in range(game.n):
            x[i] = best_response(game, x, i)
        if np.abs(x - previous).max() <= cfg.tol_step * max(1.0, float(np.abs(x).max())):
            break
    else:
        raise NonConvergenceError(
            f"Best-response iteration did not settle within {cfg.max_iter} sweeps", x, cfg.max_iter
        )
    responses = np.array([best_response(game, x, i) for i in range(game.n)])
    G = game.gradient(x) if np.any(x > 0) else None
    residuals = np.empty(game.n)
    for i in range(game.n):
        slope = float(G[i, i]) if G is not None else _own_slope(game, x, i, 0.0)
        residuals[i] = slope if x[i] > 0 else max(0.0, slope)
    scale = max(1.0, float(np.abs(G).max())) if G is not None else 1.0
    max_residual = float(np.abs(residuals).max()) / scale
    logger.info("Nash profile %s after %d sweeps", np.round(x, 9).tolist(), sweep)
    return EquilibriumReport(
        kind=EquilibriumKind.NASH,
        x=x.tolist(),
        payoffs=game.payoffs(x).tolist(),
        residuals=residuals.tolist(),
        oracle_argmax=responses.tolist(),
        verdict=Verdict.VERIFIED if max_residual <= cfg.residual_tol else Verdict.FAILED,
        max_residual=max_residual,
        iterations=sweep,
    )


def compare_nash_mke(
    game: PayoffModel,
    x0: np.ndarray | list[float] | None = None,
    cfg: SolverConfig | None = None,
    a_hi: float | None = None,
) -> NashMKEComparison:
    """Nash and MKE from the same start ``x0``, all ones when omitted."""
    cfg = cfg or SolverConfig()
    start = np.ones(game.n) if x0 is None else x0
    nash = solve_nash(game, start, cfg)
    mke = solve_mke(game, start, cfg, a_hi)
    return NashMKEComparison(
        nash=nash,
        mke=mke,
        mke_dominates=dominates(mke.payoffs, nash.payoffs, strict=True),
    )


def enumerate_mke(
    game: PayoffModel,
    starts: int,
    cfg: SolverConfig | None = None,
    box: tuple[float, float] = VALIDATION_BOX,
) -> MKEScan:
    """Multi-start solve_mke; distinct verified strictly positive roots."""
    cfg = cfg or SolverConfig()
    rng = np.random.default_rng(cfg.seed)
    roots: list[EquilibriumReport] = []
    degenerate = nonconverged = 0
    for _ in range(starts):
        x0 = rng.uniform(*box, size=game.n)
        try:
            report = solve_mke(game, x0, cfg)
        except DegenerateRootError:
            degenerate += 1
            continue
        except NonConvergenceError:
            nonconverged += 1
            continue
        if not report.verified:
            continue
        x = np.asarray(report.x)
        if all(np.abs(x - np.asarray(r.x)).max() > cfg.dedup_spacing for r in roots):
            roots.append(report)
    return MKEScan(roots=roots, starts=starts, degenerate=degenerate, nonconverged=nonconverged)
