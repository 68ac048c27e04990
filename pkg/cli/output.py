"""
Result files. Every file is written to a temporary sibling first and then
renamed over the target, so a partial file never appears under its final name.
"""

import logging
import os
import tempfile
from pathlib import Path

logger = logging.getLogger(__name__)


def write_atomic(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    logger.info(f"Wrote {path}")
    return path


def write_sweep(out_dir: Path, result) -> list[Path]:
    """trials.csv, aggregate.csv and their JSON mirrors under out_dir."""
    out_dir = Path(out_dir)
    return [
        write_atomic(out_dir / "trials.csv", result.trial_csv()),
        write_atomic(out_dir / "aggregate.csv", result.aggregate_csv()),
        write_atomic(out_dir / "trials.json", result.trial_json()),
        write_atomic(out_dir / "aggregate.json", result.aggregate_json()),
    ]
