from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import numpy as np
from pydantic import ValidationError

from app.core.config import settings
from app.core.exceptions import GameDefinitionError, InputError, SingularGradientError
from app.models import GameFamily, GameSpec, ParamValue

SPECS_DIR = Path(__file__).resolve().parent.parent / "specs"

# Sampling box for random interior profiles; every bundled instance is well inside it
VALIDATION_BOX = (0.1, 3.0)

_FAMILY_KEYS: dict[GameFamily, tuple[set[str], set[str]]] = {
    # family: (required, optional)
    GameFamily.QUADRATIC_PUBLIC_GOODS: ({"a", "b", "gamma"}, set()),
    GameFamily.CUSTOM_QUADRATIC: ({"a", "b", "gamma"}, set()),
    GameFamily.LINEAR_COURNOT: ({"p0", "p1", "c"}, {"d"}),
    GameFamily.COMMONS: ({"beta", "alpha"}, {"kappa"}),
}


class PayoffModel(Protocol):
    """Anything the equilibrium code can evaluate: a Game or a reparametrized one."""

    @property
    def n(self) -> int: ...

    def payoffs(self, X: np.ndarray) -> np.ndarray: ...

    def gradient(self, x: np.ndarray) -> np.ndarray: ...


def _scalar(params: Mapping[str, ParamValue], key: str) -> float:
    value = params[key]
    if not isinstance(value, int | float):
        raise GameDefinitionError(f"Parameter '{key}' must be a scalar")
    return float(value)


def _vector(
    params: Mapping[str, ParamValue], key: str, n: int, default: float | None = None
) -> np.ndarray:
    if key not in params:
        if default is None:
            raise GameDefinitionError(f"Missing parameter '{key}'")
        return np.full(n, default)
    value = params[key]
    if isinstance(value, int | float):
        return np.full(n, float(value))
    arr = np.asarray(value, dtype=float)
    if arr.shape != (n,):
        raise GameDefinitionError(
            f"Parameter '{key}' must be a scalar or a vector of length {n}"
        )
    return arr


def _matrix(params: Mapping[str, ParamValue], key: str, n: int) -> np.ndarray:
    arr = np.asarray(params[key], dtype=float)
    if arr.shape != (n, n):
        raise GameDefinitionError(f"Parameter '{key}' must be an {n}x{n} matrix")
    out = arr.copy()
    # own terms live in a and b
    np.fill_diagonal(out, 0.0)
    return out


@dataclass(frozen=True, eq=False)
class Game:
    """Validated in-memory form of a game.

    ``coef`` holds the family coefficients already broadcast to player
    vectors; ``spec`` is the document the game was built from.
    """

    spec: GameSpec
    coef: Mapping[str, np.ndarray]

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def family(self) -> GameFamily:
        return self.spec.family

    @property
    def externality_sign(self) -> int:
        return self.spec.externality_sign

    @property
    def name(self) -> str:
        return self.spec.name or self.spec.family.value

    @classmethod
    def from_spec(cls, spec: GameSpec) -> "Game":
        required, optional = _FAMILY_KEYS[spec.family]
        keys = set(spec.params)
        if missing := required - keys:
            raise GameDefinitionError(
                f"{spec.family.value} is missing parameters: {sorted(missing)}"
            )
        if unknown := keys - required - optional:
            raise GameDefinitionError(
                f"{spec.family.value} does not take parameters: {sorted(unknown)}"
            )
        n = spec.n
        p = spec.params
        coef: dict[str, np.ndarray]
        if spec.family in (
            GameFamily.QUADRATIC_PUBLIC_GOODS,
            GameFamily.CUSTOM_QUADRATIC,
        ):
            b = _vector(p, "b", n)
            if np.any(b <= 0):
                raise GameDefinitionError("Own curvature b_i must be positive")
            if spec.family == GameFamily.QUADRATIC_PUBLIC_GOODS:
                cross = _scalar(p, "gamma") * (np.ones((n, n)) - np.eye(n))
            else:
                cross = _matrix(p, "gamma", n)
            coef = {"a": _vector(p, "a", n), "b": b, "cross": cross}
        elif spec.family == GameFamily.LINEAR_COURNOT:
            p0, p1 = _scalar(p, "p0"), _scalar(p, "p1")
            if p0 <= 0 or p1 <= 0:
                raise GameDefinitionError("Demand parameters p0, p1 must be positive")
            d = _vector(p, "d", n, default=0.0)
            if np.any(d < 0):
                raise GameDefinitionError("Own cost curvature d_i must be nonnegative")
            coef = {
                "p0": np.asarray(p0),
                "p1": np.asarray(p1),
                "c": _vector(p, "c", n),
                "d": d,
            }
        else:
            beta, alpha = _scalar(p, "beta"), _scalar(p, "alpha")
            if not 0.0 < beta < 1.0:
                raise GameDefinitionError("Commons elasticity beta must lie in (0, 1)")
            if alpha <= 0:
                raise GameDefinitionError("Commons effort cost alpha must be positive")
            kappa = _vector(p, "kappa", n, default=0.0)
            if np.any(kappa < 0):
                raise GameDefinitionError("Own cost curvature kappa_i must be nonnegative")
            coef = {"beta": np.asarray(beta), "alpha": np.asarray(alpha), "kappa": kappa}
        return cls(spec=spec, coef=coef)

    def _check_width(self, X: np.ndarray) -> None:
        if X.shape[-1] != self.n:
            raise InputError(
                f"Profile has {X.shape[-1]} components, game has {self.n} players"
            )

    def payoffs(self, X: np.ndarray) -> np.ndarray:
        """All n payoffs for every profile in ``X[..., n]``."""
        X = np.asarray(X, dtype=float)
        self._check_width(X)
        k = self.coef
        if self.family in (
            GameFamily.QUADRATIC_PUBLIC_GOODS,
            GameFamily.CUSTOM_QUADRATIC,
        ):
            return k["a"] * X - 0.5 * k["b"] * X**2 + X @ k["cross"].T
        S = X.sum(axis=-1, keepdims=True)
        if self.family == GameFamily.LINEAR_COURNOT:
            return X * (k["p0"] - k["p1"] * S) - k["c"] * X - 0.5 * k["d"] * X**2
        # Commons: x_i * X^(beta-1) -> 0 as X -> 0
        positive = S > 0
        safe = np.where(positive, S, 1.0)
        harvest = np.where(positive, X * safe ** (k["beta"] - 1.0), 0.0)
        return harvest - k["alpha"] * X - 0.5 * k["kappa"] * X**2

    def gradient(self, x: np.ndarray) -> np.ndarray:
        """Row i is grad U_i(x)."""
        x = np.asarray(x, dtype=float)
        self._check_width(x)
        k = self.coef
        n = self.n
        if self.family in (
            GameFamily.QUADRATIC_PUBLIC_GOODS,
            GameFamily.CUSTOM_QUADRATIC,
        ):
            return np.diag(k["a"] - k["b"] * x) + k["cross"]
        S = float(x.sum())
        if self.family == GameFamily.LINEAR_COURNOT:
            G = np.tile((-k["p1"] * x)[:, None], (1, n))
            G[np.diag_indices(n)] += k["p0"] - k["p1"] * S - k["c"] - k["d"] * x
            return G
        if S <= 0:
            raise SingularGradientError(
                "Commons payoffs are not differentiable at the zero profile"
            )
        e = float(k["beta"]) - 1.0
        G = np.tile((e * x * S ** (e - 1.0))[:, None], (1, n))
        G[np.diag_indices(n)] += S**e - k["alpha"] - k["kappa"] * x
        return G


def load_game(path: str | Path) -> Game:
    path = Path(path)
    try:
        spec = GameSpec.model_validate_json(path.read_text())
    except OSError as exc:
        raise GameDefinitionError(f"Cannot read game spec '{path}': {exc}")
    except ValidationError as exc:
        raise GameDefinitionError(f"Invalid game spec '{path}': {exc}")
    return Game.from_spec(spec)


def bundled_specs() -> list[Path]:
    return sorted(SPECS_DIR.glob("*.json"))


def as_profile(model: PayoffModel, x: np.ndarray | list[float]) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.shape != (model.n,):
        raise InputError(f"Expected a profile of {model.n} strategies, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("Profile must be finite")
    if np.any(arr < 0):
        raise InputError("Strategies must be nonnegative")
    return arr


def payoff(game: PayoffModel, x: np.ndarray | list[float], i: int) -> float:
    if not 0 <= i < game.n:
        raise InputError(f"Player index {i} out of range for {game.n} players")
    return float(game.payoffs(as_profile(game, x))[i])


def gradient(game: PayoffModel, x: np.ndarray | list[float]) -> np.ndarray:
    return game.gradient(as_profile(game, x))


def finite_difference_gradient(
    game: PayoffModel, x: np.ndarray, h: float | None = None
) -> np.ndarray:
    """Central differences of all payoffs, same layout as ``gradient``."""
    h = settings.FD_STEP if h is None else h
    n = game.n
    steps = h * np.eye(n)
    upper = game.payoffs(x + steps)  # row k: profile shifted along k
    lower = game.payoffs(x - steps)
    return ((upper - lower) / (2 * h)).T


def hessians(game: PayoffModel, x: np.ndarray, h: float | None = None) -> np.ndarray:
    """Finite-difference Hessians, H[i] is the Hessian of U_i at x."""
    h = settings.FD_STEP if h is None else h
    n = game.n
    H = np.empty((n, n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        H[:, :, k] = (game.gradient(x + e) - game.gradient(x - e)) / (2 * h)
    return 0.5 * (H + H.transpose(0, 2, 1))
