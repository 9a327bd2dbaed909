"""Access to the bundled sample price series."""

from importlib import resources
from pathlib import Path

__all__ = ["snapshot_path"]


def snapshot_path() -> Path:
    """Path of the bundled daily Bitcoin spot/futures price snapshot.

    The published reference estimates live in a ``_reference.json``
    sidecar next to the CSV and are picked up automatically by the
    estimation pipeline; ``SNAPSHOT.md`` in the same directory documents
    how the series was constructed.
    """
    return Path(str(resources.files(__package__).joinpath("data", "btc_snapshot.csv")))
