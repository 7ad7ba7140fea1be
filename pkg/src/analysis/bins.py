"""Histogram of successful runs by the generation they succeeded in."""

from dataclasses import dataclass

try:
    from typing_extensions import Iterable
except ImportError:
    from typing import Iterable

BIN_HEADER = ("bin", "successes")


@dataclass(frozen=True)
class BinCount:
    """Successes whose generation lies in (lower, upper]."""

    label: str
    lower: int
    upper: int
    successes: int


def bin_successes(
        generations: Iterable[int], bin_width: int = 200, bin_count: int = 5
) -> list[BinCount]:
    """Count successes per generation bin D1..Dk.

    Bin Dk covers ((k-1)·width, k·width]; generations beyond the last bin are
    not counted.
    """
    if bin_width < 1 or bin_count < 1:
        raise ValueError(f"Need positive bin_width and bin_count, got {bin_width}, {bin_count}")
    counts = [0] * bin_count
    for generation in generations:
        if generation <= 0:
            continue
        index = (generation - 1) // bin_width
        if index < bin_count:
            counts[index] += 1
    return [
        BinCount(f"D{k + 1}", k * bin_width, (k + 1) * bin_width, counts[k])
        for k in range(bin_count)
    ]
