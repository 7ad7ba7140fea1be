"""Define the configurable parameters shared by the search and sweep graphs."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields

try:
    from typing_extensions import Any, Optional, Type, TypeVar
except ImportError:
    from typing import Any, Optional, Type, TypeVar

from langchain_core.runnables import RunnableConfig, ensure_config

WORKERS_ENV = "LYAPGA_WORKERS"


def _default_workers() -> int:
    return int(os.environ.get(WORKERS_ENV, "1"))


@dataclass(kw_only=True)
class BaseConfiguration:
    """Configuration common to every graph.

    This class defines how candidate costs are computed and how much detail is
    kept about failing grid points.
    """

    workers: int = field(
        default_factory=_default_workers,
        metadata={
            "description": "Number of threads used to evaluate population costs. "
                           "Results never depend on this value."
        },
    )

    violation_limit: int = field(
        default=100,
        metadata={
            "description": "Maximum number of violating grid points kept in serialized reports; "
                           "at least 1."
        },
    )

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        if self.violation_limit < 1:
            raise ValueError(f"violation_limit must be at least 1, got {self.violation_limit}")

    @classmethod
    def from_runnable_config(
            cls: Type[T], config: Optional[RunnableConfig] = None
    ) -> T:
        """Create a configuration instance from a RunnableConfig object.

        Args:
            cls (Type[T]): The class itself.
            config (Optional[RunnableConfig]): The configuration object to use.

        Returns:
            T: An instance of the configuration with the specified values.
        """
        config = ensure_config(config)
        configurable = config.get("configurable") or {}
        _fields = {f.name for f in fields(cls) if f.init}
        return cls(**{k: v for k, v in configurable.items() if k in _fields})

    def to_configurable(self) -> dict[str, Any]:
        """Return the field values as a ``configurable`` mapping."""
        return {f.name: getattr(self, f.name) for f in fields(self) if f.init}


T = TypeVar("T", bound=BaseConfiguration)
