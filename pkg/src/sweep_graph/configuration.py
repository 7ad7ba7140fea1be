"""Define the configurable parameters for the experiment sweep."""

from __future__ import annotations

from dataclasses import dataclass, field

from shared.configuration import BaseConfiguration


@dataclass(kw_only=True)
class SweepConfiguration(BaseConfiguration):
    """The configuration for a sweep over GA and region parameters."""

    bin_width: int = field(
        default=200,
        metadata={"description": "Width in generations of each success bin D1..Dk."},
    )

    bin_count: int = field(
        default=5,
        metadata={"description": "Number of success bins."},
    )

    max_concurrency: int = field(
        default=4,
        metadata={"description": "Number of (cell, seed) runs executed at once."},
    )

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.bin_width < 1:
            raise ValueError(f"bin_width must be at least 1, got {self.bin_width}")
        if self.bin_count < 1:
            raise ValueError(f"bin_count must be at least 1, got {self.bin_count}")
        if self.max_concurrency < 1:
            raise ValueError(f"max_concurrency must be at least 1, got {self.max_concurrency}")
