"""
Settings for the real subbundle lab.

Tolerances and run knobs live in pydantic models so that overrides coming
from the command line or a run-config file are validated, and unknown keys
are rejected instead of silently ignored.

Author: Ruslan Magana Vsevolodovna
Website: ruslanmv.com
License: Apache 2.0
"""

import os
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

THREADS_ENV_VAR = "REAL_SUBBUNDLE_LAB_THREADS"


class Tolerances(BaseModel):
    """
    Numerical tolerance set shared by every module.

    All values are dimensionless. ``equality`` is the componentwise relative
    tolerance for point equality; the rest are thresholds of individual
    numerical decisions.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    equality: float = Field(default=1e-9, gt=0.0, le=1e-4)
    svd_threshold: float = Field(default=1e-8, gt=0.0, lt=1.0)
    decision_gap: float = Field(default=1e2, ge=1.0)
    jitter: float = Field(default=1e-6, gt=0.0, lt=1e-2)
    ambiguity_ratio: float = Field(default=10.0, gt=1.0)
    near_factor: float = Field(default=1e3, gt=1.0)
    smoothness: float = Field(default=1e-6, gt=0.0)
    residual: float = Field(default=1e-9, gt=0.0)
    real_root: float = Field(default=1e3, gt=0.0)

    def with_overrides(self, overrides: Dict[str, float]) -> "Tolerances":
        """
        Return a copy with some tolerances replaced.

        Args:
            overrides: Mapping from tolerance name to its new value

        Returns:
            Tolerances: Validated copy

        Raises:
            pydantic.ValidationError: On unknown names or out-of-range values
        """
        return Tolerances.model_validate({**self.model_dump(), **overrides})


class LabSettings(BaseModel):
    """Run-wide settings: tolerances plus sampling and parallelism knobs."""

    model_config = ConfigDict(extra="forbid")

    tolerances: Tolerances = Field(default_factory=Tolerances)
    threads: int = Field(default=1, ge=1)
    sample_radius: float = Field(default=5.0, gt=0.0)
    min_trials: int = Field(default=1000, ge=1)
    newstead_points: int = Field(default=500, ge=1)
    newstead_plane_budget: int = Field(default=50, ge=1)
    connectivity_factor: float = Field(default=2.0, gt=1.0)

    @field_validator("threads", mode="before")
    @classmethod
    def _blank_threads(cls, value: Any) -> Any:
        if isinstance(value, str) and not value.strip():
            return 1
        return value


def load_settings(**overrides: Any) -> LabSettings:
    """
    Build settings from the environment (and ``.env``), then apply overrides.

    Args:
        **overrides: Field values taking precedence over the environment

    Returns:
        LabSettings: Validated settings

    Raises:
        pydantic.ValidationError: If a value is invalid
    """
    load_dotenv()
    values: Dict[str, Any] = {}
    threads = os.environ.get(THREADS_ENV_VAR)
    if threads is not None:
        values["threads"] = threads
    values.update(overrides)
    return LabSettings.model_validate(values)


_active: Optional[LabSettings] = None


def get_settings() -> LabSettings:
    """Return the active settings, loading them on first use."""
    global _active
    if _active is None:
        _active = load_settings()
    return _active


def use_settings(settings: Optional[LabSettings]) -> None:
    """
    Replace the active settings.

    Args:
        settings: New settings, or None to reload from the environment lazily
    """
    global _active
    _active = settings


__all__ = [
    "THREADS_ENV_VAR",
    "LabSettings",
    "Tolerances",
    "ValidationError",
    "get_settings",
    "load_settings",
    "use_settings",
]
