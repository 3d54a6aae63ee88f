"""Small dense numerical kernels shared by the equilibrium modules."""

import logging
import math
from collections.abc import Callable

import numpy as np

from app.core.exceptions import InputError, NonConvergenceError, NonUnimodalError
from app.models import SolverConfig

logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
ARMIJO = 1e-4
MAX_HALVINGS = 40
# n is small by construction; larger problems belong to a sparse solver
MAX_DIMENSION = 64

Objective = Callable[[np.ndarray], float]
Gradient = Callable[[np.ndarray], np.ndarray]
# Vectorized 1-D objective: maps a (m,) array of scales to (m,) or (m, k) values
LineObjective = Callable[[np.ndarray], np.ndarray]


def _check_dimension(n: int) -> None:
    if n > MAX_DIMENSION:
        raise InputError(f"Dimension {n} exceeds the dense-kernel limit {MAX_DIMENSION}")


def projected_gradient(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Ascent direction projected onto the feasible cone of the orthant at x."""
    return np.where(x > 0, g, np.maximum(g, 0.0))


def maximize_concave(
    f: Objective, grad_f: Gradient, x0: np.ndarray, cfg: SolverConfig
) -> np.ndarray:
    """Projected gradient ascent on the nonnegative orthant.

    Barzilai-Borwein trial steps, Armijo backtracking along the projection
    arc. Deterministic for fixed ``x0`` and ``cfg``.
    """
    x = np.maximum(np.asarray(x0, dtype=float), 0.0)
    _check_dimension(x.size)
    fx = f(x)
    g = grad_f(x)
    step = 1.0
    for iteration in range(cfg.max_iter):
        pg = projected_gradient(x, g)
        if float(np.linalg.norm(pg)) <= cfg.tol_grad:
            logger.debug("maximize_concave converged in %d iterations", iteration)
            return x
        # rounding slack keeps near-optimal steps from being rejected on noise
        slack = 4.0 * np.finfo(float).eps * max(1.0, abs(fx))
        t = step
        while True:
            x_new = np.maximum(x + t * g, 0.0)
            d = x_new - x
            f_new = f(x_new)
            if f_new >= fx + ARMIJO * float(g @ d) - slack:
                break
            t *= 0.5
            if t < cfg.tol_step:
                raise NonConvergenceError(
                    "Backtracking failed to find an ascent step", x, iteration
                )
        g_new = grad_f(x_new)
        s = x_new - x
        y = g_new - g
        sy = float(s @ y)
        # BB step for ascent: curvature along s is -s.y
        step = float(s @ s) / -sy if sy < 0 else min(2.0 * t, 1e6)
        x, fx, g = x_new, f_new, g_new
    raise NonConvergenceError(
        f"Projected gradient did not reach tol_grad={cfg.tol_grad} "
        f"within {cfg.max_iter} iterations",
        x,
        cfg.max_iter,
    )


def golden_section(
    g: Callable[[float], float], lo: float, hi: float, tol: float
) -> float:
    """Maximize a unimodal g on [lo, hi]; returns the final bracket midpoint.

    An endpoint is returned when it beats the interior estimate, so monotone
    objectives land exactly on the boundary.
    """
    if not lo < hi:
        raise InputError(f"Empty bracket [{lo}, {hi}]")
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    gc, gd = g(c), g(d)
    while b - a > tol:
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - INV_PHI * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + INV_PHI * (b - a)
            gd = g(d)
        if c >= d:
            # bracket collapsed below float resolution
            break
    mid = 0.5 * (a + b)
    best, value = mid, g(mid)
    for end in (lo, hi):
        end_value = g(end)
        if end_value > value:
            best, value = end, end_value
    return best


def argmax_1d_batch(
    g: LineObjective, lo: float, hi: float, cfg: SolverConfig
) -> np.ndarray:
    """Golden section per column of g, cross-checked against a dense grid.

    ``g`` maps an array of m abscissae to an (m, k) array, one column per
    objective. The grid is evaluated in one call and shared by all columns.
    """
    if not lo < hi:
        raise InputError(f"Empty interval [{lo}, {hi}]")
    grid = np.linspace(lo, hi, cfg.grid_points)
    values = np.asarray(g(grid), dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    cell = (hi - lo) / (cfg.grid_points - 1)
    grid_best = grid[np.argmax(values, axis=0)]

    result = np.empty(values.shape[1])
    for j in range(values.shape[1]):

        def column(a: float, j: int = j) -> float:
            out = np.asarray(g(np.array([a])), dtype=float)
            return float(out.reshape(1, -1)[0, j])

        golden = golden_section(column, lo, hi, cfg.tol_step)
        if abs(golden - grid_best[j]) > cell + cfg.tol_step:
            raise NonUnimodalError(
                f"Golden section ({golden:.12g}) and grid oracle "
                f"({grid_best[j]:.12g}) disagree by more than one grid cell",
                golden,
                float(grid_best[j]),
            )
        result[j] = golden
    return result


def argmax_1d(g: LineObjective, lo: float, hi: float, cfg: SolverConfig) -> float:
    return float(argmax_1d_batch(g, lo, hi, cfg)[0])


def nullspace(G: np.ndarray, rank_tol: float) -> list[np.ndarray]:
    """Orthonormal basis of {v : G v = 0} by singular-value thresholding."""
    G = np.asarray(G, dtype=float)
    if not np.all(np.isfinite(G)):
        raise InputError("Gradient matrix has non-finite entries")
    _check_dimension(G.shape[1])
    _, s, vh = np.linalg.svd(G, full_matrices=True)
    top = float(s[0]) if s.size else 0.0
    if top == 0.0:
        return [row.copy() for row in vh]
    rank = int(np.sum(s > rank_tol * top))
    return [row.copy() for row in vh[rank:]]


def finite_difference_jacobian(
    F: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float
) -> np.ndarray:
    n = x.size
    J = np.empty((n, n))
    for k in range(n):
        step = h * max(1.0, abs(float(x[k])))
        e = np.zeros(n)
        e[k] = step
        J[:, k] = (F(x + e) - F(x - e)) / (2 * step)
    return J


def solve_damped_newton(
    F: Callable[[np.ndarray], np.ndarray], x0: np.ndarray, cfg: SolverConfig
) -> tuple[np.ndarray, int]:
    """Newton on F(x) = 0 with a finite-difference Jacobian.

    The step is halved until ||F|| decreases (at most 40 halvings); singular
    Jacobians fall back to the least-squares minimum-norm step.
    """
    x = np.asarray(x0, dtype=float).copy()
    _check_dimension(x.size)
    r = F(x)
    norm = float(np.abs(r).max())
    for iteration in range(cfg.max_iter):
        if norm <= cfg.tol_grad:
            return x, iteration
        J = finite_difference_jacobian(F, x, cfg.fd_step)
        dx = np.linalg.lstsq(J, -r, rcond=cfg.rank_tol)[0]
        t = 1.0
        for _ in range(MAX_HALVINGS):
            x_new = x + t * dx
            r_new = F(x_new)
            norm_new = float(np.abs(r_new).max())
            if norm_new < norm:
                break
            t *= 0.5
        else:
            raise NonConvergenceError(
                f"Damped Newton stalled at ||F|| = {norm:.3g}", x, iteration
            )
        x, r, norm = x_new, r_new, norm_new
    if norm <= cfg.tol_grad:
        return x, cfg.max_iter
    raise NonConvergenceError(
        f"Damped Newton did not converge within {cfg.max_iter} iterations "
        f"(||F|| = {norm:.3g})",
        x,
        cfg.max_iter,
    )
