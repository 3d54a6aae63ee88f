from typing import Literal

from pydantic import Field, HttpUrl, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing_extensions import Self


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        # Use top level .env file (one level above ./backend/)
        env_file="../.env",
        env_ignore_empty=True,
        extra="ignore",
    )
    PROJECT_NAME: str = "Kantian Frontier"
    API_V1_STR: str = "/api/v1"
    ENVIRONMENT: Literal["local", "staging", "production"] = "local"
    SENTRY_DSN: HttpUrl | None = None
    LOG_LEVEL: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"

    # Numerical kernels
    TOL_GRAD: float = Field(default=1e-9, gt=0)
    TOL_STEP: float = Field(default=1e-12, gt=0)
    MAX_ITER: int = Field(default=500, ge=1)
    GRID_POINTS: int = Field(default=300001, ge=3)
    SEED: int = 0
    RANK_TOL: float = Field(default=1e-8, gt=0)
    FD_STEP: float = Field(default=1e-5, gt=0)

    # Equilibrium and efficiency checks
    RESIDUAL_TOL: float = Field(default=1e-8, gt=0)
    CERT_TOL: float = Field(default=1e-6, gt=0)
    MULTIPLIER_FLOOR: float = Field(default=1e-6, gt=0)
    ARGMAX_DELTA: float = Field(default=1e-3, gt=0)
    A_HI: float = 3.0

    # Frontier and shifting
    THETA: float = 0.5
    DEDUP_SPACING: float = Field(default=1e-6, gt=0)
    VALIDATION_SAMPLES: int = Field(default=50, ge=1)
    VALIDATION_FRONTIER_POINTS: int = Field(default=5, ge=0)
    MAX_PLAYERS: int = Field(default=64, ge=2)

    CSV_SIGNIFICANT_DIGITS: int = Field(default=12, ge=1, le=17)

    @model_validator(mode="after")
    def _check_shift_defaults(self) -> Self:
        if not 0.0 < self.THETA < 1.0:
            raise ValueError(f"THETA must lie in (0, 1), got {self.THETA}")
        if self.A_HI <= 1.0:
            raise ValueError(f"A_HI must exceed 1, got {self.A_HI}")
        return self


settings = Settings()
