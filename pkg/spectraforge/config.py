"""
Configuration management module using Pydantic Settings.

This module provides type-safe configuration for tolerances, solver budgets and
output options, with environment variable overrides (prefix ``SPECTRAFORGE_``).
"""

from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Application settings with environment variable support.

    Every tolerance-taking operation in the package falls back to these values
    when it is called with ``None``.
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="SPECTRAFORGE_",
        case_sensitive=False,
        extra="ignore"
    )

    # Numerical tolerances
    feasibility_tol: float = Field(
        default=1e-8,
        gt=0.0,
        le=1e-2,
        description="Membership tolerance for PSD violation and scaled constraint residuals"
    )
    psd_tol: float = Field(
        default=1e-9,
        gt=0.0,
        le=1e-2,
        description="Relative tolerance for PSD preconditions of power functions"
    )
    asymmetry_tol: float = Field(
        default=1e-8,
        gt=0.0,
        le=1e-2,
        description="Largest accepted ||M - M*||_F / ||M||_F for Hermitian inputs"
    )
    recon_tol_factor: float = Field(
        default=1e-10,
        gt=0.0,
        le=1e-4,
        description="Reconstruction tolerance factor, scaled by ||M||_F * n"
    )
    witness_norm: float = Field(
        default=0.5,
        gt=0.0,
        le=1.0,
        description="Operator norm of the X factor in returned perturbation witnesses"
    )
    witness_floor_factor: float = Field(
        default=1e-12,
        gt=0.0,
        le=1e-3,
        description="Witnesses with ||H||_F below this factor times ||P||_F are rejected"
    )
    diag_zero_factor: float = Field(
        default=1e-12,
        gt=0.0,
        le=1e-3,
        description="Diagonal entries below this factor times the largest one count as zero"
    )
    null_space_rcond: float = Field(
        default=1e-10,
        gt=0.0,
        le=1e-4,
        description="Singular values of L at or below this factor times the largest span the witness null space"
    )
    witness_max_halvings: int = Field(
        default=20,
        ge=0,
        le=60,
        description="Times a witness that fails its feasibility recheck is halved before the next null vector is tried"
    )

    # Randomness
    default_seed: int = Field(
        default=0,
        ge=0,
        description="Base seed for random generation and solver restarts"
    )

    # Low-rank lambda_1 ascent
    lambda1_restarts: int = Field(
        default=8,
        ge=1,
        le=1000,
        description="Number of random restarts for the lambda_1 ascent"
    )
    lambda1_max_iters: int = Field(
        default=400,
        ge=1,
        le=100000,
        description="Ascent iterations per restart"
    )
    lambda1_step_scale: float = Field(
        default=0.5,
        gt=0.0,
        description="Step rule constant c in c / sqrt(iteration)"
    )
    restoration_block: int = Field(
        default=10,
        ge=1,
        le=1000,
        description="Ascent iterations between feasibility restorations"
    )
    restoration_max_iters: int = Field(
        default=60,
        ge=1,
        le=10000,
        description="Gauss-Newton iterations allowed per feasibility restoration"
    )

    # Rank-2 entropy minimization
    entropy_restarts: int = Field(
        default=16,
        ge=1,
        le=1000,
        description="Multi-start count for the entropy minimization"
    )
    penalty_rounds: int = Field(
        default=8,
        ge=1,
        le=50,
        description="Outer penalty rounds (weight doubles each round)"
    )
    penalty_initial: float = Field(
        default=10.0,
        gt=0.0,
        description="Initial quadratic penalty weight"
    )
    entropy_max_iters: int = Field(
        default=500,
        ge=1,
        le=100000,
        description="BFGS iterations per penalty round of the entropy minimization"
    )
    entropy_snap_distance: float = Field(
        default=1e-6,
        gt=0.0,
        le=1e-2,
        description="Mixing weights within this distance of 0 or 1 are snapped before the final polish"
    )

    # Oracle comparison suite
    oracle_instances: int = Field(
        default=1000,
        ge=1,
        description="Random instances in the oracle comparison suite"
    )
    oracle_max_dim: int = Field(
        default=8,
        ge=2,
        le=64,
        description="Largest ambient dimension sampled by the oracle comparison suite"
    )
    workers: int = Field(
        default=1,
        ge=1,
        le=64,
        description="Thread pool size for independent restarts and oracle instances"
    )

    # Logging Configuration
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        default="WARNING",
        description="Logging level"
    )
    log_format: Literal["structured", "simple"] = Field(
        default="structured",
        description="Log format type"
    )

    # Output Settings
    output_indent: int = Field(
        default=2,
        ge=0,
        le=8,
        description="JSON indentation for reports"
    )

    @field_validator("penalty_initial")
    @classmethod
    def validate_penalty_initial(cls, v: float) -> float:
        """Keep the initial penalty weight in a range where doubling stays finite."""
        if v > 1e8:
            raise ValueError(f"Initial penalty weight ({v}) is too large")
        return v

    def tolerance_table(self) -> dict:
        """Return the default tolerance table reported by ``--version``."""
        return {
            "feasibility_tol": self.feasibility_tol,
            "psd_tol": self.psd_tol,
            "asymmetry_tol": self.asymmetry_tol,
            "recon_tol_factor": self.recon_tol_factor,
            "witness_norm": self.witness_norm,
            "witness_floor_factor": self.witness_floor_factor,
            "diag_zero_factor": self.diag_zero_factor,
            "null_space_rcond": self.null_space_rcond,
            "rank_threshold": "n * eps * sigma_max",
        }


# Global settings instance
settings = Settings()


def get_settings() -> Settings:
    """
    Get the current settings instance.

    Returns:
        Settings: The global settings instance
    """
    return settings
