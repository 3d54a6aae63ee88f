from typing import Any

import numpy as np


class KantianError(Exception):
    """Base class for every error raised by the equilibrium toolkit."""


class InputError(KantianError, ValueError):
    pass


class GameDefinitionError(InputError):
    pass


class GameValidationError(InputError):
    def __init__(self, message: str, report: Any) -> None:
        super().__init__(message)
        self.report = report


class SingularGradientError(KantianError):
    pass


class NonConvergenceError(KantianError):
    def __init__(self, message: str, last_iterate: np.ndarray, iterations: int) -> None:
        super().__init__(message)
        self.last_iterate = last_iterate
        self.iterations = iterations


class NonUnimodalError(KantianError):
    def __init__(self, message: str, golden: float, grid: float) -> None:
        super().__init__(message)
        self.golden = golden
        self.grid = grid


class NonInteriorError(KantianError):
    def __init__(self, message: str, x: np.ndarray, m: np.ndarray) -> None:
        super().__init__(message)
        self.x = x
        self.m = m


class NotEfficientError(KantianError):
    def __init__(self, message: str, x: np.ndarray, residual: float | None = None) -> None:
        super().__init__(message)
        self.x = x
        self.residual = residual


class DegenerateRootError(KantianError):
    def __init__(self, message: str, x: np.ndarray) -> None:
        super().__init__(message)
        self.x = x


class NoInteriorShiftDirectionError(KantianError):
    def __init__(self, message: str, x: np.ndarray, basis: list[np.ndarray]) -> None:
        super().__init__(message)
        self.x = x
        self.basis = basis


class ShiftVerificationError(KantianError):
    def __init__(self, message: str, plan: Any) -> None:
        super().__init__(message)
        self.plan = plan


class EmptyAdmissibleSetError(KantianError):
    pass


class VerticalTangentError(KantianError):
    pass
