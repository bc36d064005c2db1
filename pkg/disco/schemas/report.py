"""Command report schemas."""

from datetime import datetime, timezone
from enum import IntEnum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator


class ExitCode(IntEnum):
    """Process exit statuses of the command line."""

    OK = 0
    FAILURE = 1
    INPUT_ERROR = 2
    NO_SOLUTION = 3
    RESOURCE_GUARD = 4


class RunReport(BaseModel):
    """Outcome, timings and counters of one command."""

    command: str = Field(..., description="Command name")
    success: bool = Field(True, description="Whether the command completed")
    exit_code: int = Field(ExitCode.OK, description="Process exit status")
    phases: Dict[str, float] = Field(
        default_factory=dict, description="Wall-clock seconds per phase"
    )
    counters: Dict[str, int] = Field(
        default_factory=dict, description="Facts, properties, rules, programs"
    )
    total_time: float = Field(0.0, ge=0.0, description="Wall-clock seconds overall")
    solution: Optional[List[str]] = Field(None, description="Learned rules")
    cost: Optional[int] = Field(None, ge=0, description="Literal count of the solution")
    details: Dict[str, Any] = Field(
        default_factory=dict, description="Command-specific results"
    )
    error: Optional[str] = Field(None, description="Failure message")
    timestamp: str = Field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(),
        description="Completion time (UTC, ISO 8601)",
    )

    @field_validator("counters")
    def validate_counters(cls, v: Dict[str, int]) -> Dict[str, int]:
        """Counters count things."""
        for name, value in v.items():
            if value < 0:
                raise ValueError(f"counter {name} is negative")
        return v

    @field_validator("phases")
    def validate_phases(cls, v: Dict[str, float]) -> Dict[str, float]:
        """Durations are non-negative."""
        for name, value in v.items():
            if value < 0:
                raise ValueError(f"phase {name} has a negative duration")
        return v
