import logging

import numpy as np

from app.core.config import settings
from app.core.exceptions import InputError, KantianError
from app.models import SolverConfig, ValidationReport, Violation, ViolationKind
from app.services.games import (
    VALIDATION_BOX,
    Game,
    finite_difference_gradient,
    hessians,
)
from app.services.pareto import frontier_weights, interior_spread, scalarize
from app.services.shift import tangent_direction

logger = logging.getLogger(__name__)

# Points on the shifted ray a in [0, a_hi] compared against a = 1
TANGENT_GRID = 61
# Relative payoff gain along the tangent that counts as a higher peak
PEAK_TOL = 1e-9


def tangent_violations(
    game: Game,
    points: int | None = None,
    theta: float | None = None,
    a_hi: float | None = None,
    cfg: SolverConfig | None = None,
) -> list[Violation]:
    """Check every payoff along the common tangent of sampled frontier points.

    A shifted game with reference fraction ``theta`` moves player i along
    x_p + t v for t in [-theta eps_max, (a_hi - 1) theta eps_max]. U_i has to
    curve downward at t = 0 and must not rise above U_i(x_p) on that segment.
    Points where no interior shift exists are skipped.
    """
    points = settings.VALIDATION_FRONTIER_POINTS if points is None else points
    theta = settings.THETA if theta is None else theta
    a_hi = settings.A_HI if a_hi is None else a_hi
    cfg = cfg or SolverConfig()
    if points == 0:
        return []
    n = game.n
    violations: list[Violation] = []
    spread = interior_spread(game, points, cfg)
    for w in frontier_weights(n, points, spread):
        try:
            point = scalarize(game, w, cfg)
            v = tangent_direction(game, point, cfg.rank_tol)
        except KantianError as exc:
            logger.debug("No tangent check at m=%s: %s", np.round(w, 6).tolist(), exc)
            continue
        x_p = np.asarray(point.x)
        reach = theta * float(np.min(x_p / v))
        t = reach * (np.linspace(0.0, a_hi, TANGENT_GRID) - 1.0)
        base = game.payoffs(x_p)
        gain = (game.payoffs(x_p + t[:, None] * v) - base) / np.maximum(1.0, np.abs(base))
        H = hessians(game, x_p, cfg.fd_step)
        curvature = np.einsum("j,ijk,k->i", v, H, v)
        profile = x_p.tolist()
        for i in range(n):
            if curvature[i] > 1e-6 * max(1.0, float(np.abs(H[i]).max())):
                violations.append(
                    Violation(
                        kind=ViolationKind.TANGENT_CONCAVITY,
                        player=i,
                        profile=profile,
                        value=float(curvature[i]),
                        detail="payoff curves upward along the common tangent",
                    )
                )
            top = int(np.argmax(gain[:, i]))
            if gain[top, i] > PEAK_TOL:
                violations.append(
                    Violation(
                        kind=ViolationKind.TANGENT_CONCAVITY,
                        player=i,
                        profile=profile,
                        value=float(gain[top, i]),
                        detail=(
                            f"shifted payoff peaks at a = {1.0 + t[top] / reach:.3f} "
                            f"instead of a = 1 for theta = {theta:g}"
                        ),
                    )
                )
    return violations


def validate_game(
    game: Game,
    samples: int | None = None,
    seed: int | None = None,
    box: tuple[float, float] = VALIDATION_BOX,
    frontier_points: int | None = None,
    cfg: SolverConfig | None = None,
) -> ValidationReport:
    """Sample interior profiles and check the structural assumptions.

    Games that pass the pointwise checks are also checked along the common
    tangent of ``frontier_points`` frontier points, see ``tangent_violations``.
    """
    samples = settings.VALIDATION_SAMPLES if samples is None else samples
    seed = settings.SEED if seed is None else seed
    if samples < 1:
        raise InputError("validate_game needs at least one sample")
    rng = np.random.default_rng(seed)
    n = game.n
    off_diagonal = ~np.eye(n, dtype=bool)
    violations: list[Violation] = []
    non_concave: dict[int, float] = {}

    for _ in range(samples):
        x = rng.uniform(*box, size=n)
        profile = x.tolist()
        G = game.gradient(x)
        G_fd = finite_difference_gradient(game, x)
        scale = max(1.0, float(np.abs(G).max()))
        mismatch = np.abs(G - G_fd) / np.maximum(1.0, np.abs(G))
        H = hessians(game, x)

        for i in range(n):
            if mismatch[i].max() > 1e-6:
                violations.append(
                    Violation(
                        kind=ViolationKind.GRADIENT_MISMATCH,
                        player=i,
                        profile=profile,
                        value=float(mismatch[i].max()),
                        detail="analytic gradient disagrees with central differences",
                    )
                )
            own = float(H[i, i, i])
            if own > -1e-10:
                violations.append(
                    Violation(
                        kind=ViolationKind.OWN_CONCAVITY,
                        player=i,
                        profile=profile,
                        value=own,
                        detail="payoff is not strictly concave in own strategy",
                    )
                )
            ray = float(x @ H[i] @ x)
            if ray > 1e-6 * max(1.0, float(np.abs(H[i]).max()) * float(x @ x)):
                violations.append(
                    Violation(
                        kind=ViolationKind.RAY_CONCAVITY,
                        player=i,
                        profile=profile,
                        value=ray,
                        detail="U_i(a x) is not concave in the common scale a",
                    )
                )
            cross = G[i][off_diagonal[i]] * game.externality_sign
            if cross.min() < -1e-12 * scale:
                violations.append(
                    Violation(
                        kind=ViolationKind.NON_UNIDIRECTIONAL,
                        player=i,
                        profile=profile,
                        value=float(cross.min() * game.externality_sign),
                        detail=(
                            "cross-partial has the wrong sign for declared "
                            f"externality_sign {game.externality_sign:+d}"
                        ),
                    )
                )
            top = float(np.linalg.eigvalsh(H[i]).max())
            if top > 1e-7 * max(1.0, float(np.abs(H[i]).max())):
                non_concave[i] = max(non_concave.get(i, top), top)

    if not violations:
        violations.extend(tangent_violations(game, frontier_points, cfg=cfg))

    notes = [
        f"U_{i + 1} is not jointly concave (largest Hessian eigenvalue {top:.3g})"
        for i, top in sorted(non_concave.items())
    ]
    report = ValidationReport(
        passed=not violations,
        samples=samples,
        seed=seed,
        externality_sign=game.externality_sign,
        violations=violations,
        notes=notes,
    )
    if report.passed:
        logger.info("Game %s passed validation on %d samples", game.name, samples)
    else:
        logger.warning(
            "Game %s failed validation: %d violations (%s)",
            game.name,
            len(violations),
            ", ".join(sorted({v.kind.value for v in violations})),
        )
    return report
