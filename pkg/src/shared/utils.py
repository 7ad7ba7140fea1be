"""Shared utility functions used in the project.

Functions:
    atomic_write_text: Write a file through a temporary sibling and a rename.
    write_csv: Write rows as CSV atomically.
    configure_logging: Set up root logging for command-line use.
"""
import csv
import io
import logging
import os
import tempfile
from pathlib import Path

try:
    from typing_extensions import Iterable, Optional, Sequence, Union
except ImportError:
    from typing import Iterable, Optional, Sequence, Union

logger = logging.getLogger(__name__)

LOG_LEVEL_ENV = "LYAPGA_LOG_LEVEL"

PathLike = Union[str, os.PathLike]


def atomic_write_text(path: PathLike, text: str) -> Path:
    """Write text to path so readers never see a partial file.

    Args:
        path (PathLike): Destination file; parent directories are created.
        text (str): Content to write.

    Returns:
        Path: The destination path.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(temp_name, target)
    except BaseException:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise
    logger.debug("Wrote %s", target)
    return target


def write_csv(
        path: PathLike, header: Sequence[str], rows: Iterable[Sequence[object]]
) -> Path:
    """Write a header and rows as CSV, atomically."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return atomic_write_text(path, buffer.getvalue())


def configure_logging(level: Optional[str] = None) -> None:
    """Configure root logging from an explicit level or the environment.

    Args:
        level (Optional[str]): Level name; falls back to ``LYAPGA_LOG_LEVEL``
            and then to WARNING.
    """
    name = (level or os.environ.get(LOG_LEVEL_ENV) or "WARNING").upper()
    numeric = logging.getLevelName(name)
    if not isinstance(numeric, int):
        logger.warning("Unknown log level %r. Proceeding with WARNING.", name)
        numeric = logging.WARNING
    logging.basicConfig(
        level=numeric,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
