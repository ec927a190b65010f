import os
import json
import logging
from datetime import datetime

import pandas as pd

FLOAT_FORMAT = "%.12g"
GENERATOR = "dualres 0.1"

_logger = logging.getLogger(__name__)


def full_path(*parts):
    base = os.path.dirname(__file__)
    return os.path.join(base, *parts)


def ensure_dir(path: str):
    if path:
        os.makedirs(path, exist_ok=True)


def _write_csv(path: str, frame: pd.DataFrame):
    frame.to_csv(path, float_format=FLOAT_FORMAT, lineterminator="\n", index=False)


def write_csv_atomic(path: str, frame: pd.DataFrame) -> str:
    """Write a dataset as CSV through a temp file and rename.

    Readers never see a half-written dataset. Falls back to a direct write
    if the rename step fails.
    """
    ensure_dir(os.path.dirname(path))
    tmp_path = f"{path}.tmp"
    try:
        _write_csv(tmp_path, frame)
        os.replace(tmp_path, path)  # atomic on POSIX
        _logger.debug(f"Dataset write OK: {path} ({len(frame)} rows)")
    except OSError as e:
        _logger.warning(f"Atomic write failed for {path}: {e}. Falling back to normal write.")
        _write_csv(path, frame)
    return path


def write_json_atomic(path: str, data):
    try:
        ensure_dir(os.path.dirname(path))
        tmp_path = f"{path}.tmp"
        with open(tmp_path, 'w', encoding='utf-8') as f:
            json.dump(data, f, ensure_ascii=False, indent=2, sort_keys=True)
            f.write("\n")
        os.replace(tmp_path, path)
        _logger.debug(f"Metadata write OK: {path}")
    except (OSError, TypeError, ValueError) as e:
        _logger.warning(f"Failed to write metadata {path}: {e}")


def metadata_path(csv_path: str) -> str:
    root, _ = os.path.splitext(csv_path)
    return f"{root}.meta.json"


def write_dataset(path: str, frame: pd.DataFrame, metadata: dict | None = None) -> str:
    """CSV dataset plus an optional ``<name>.meta.json`` sidecar."""
    write_csv_atomic(path, frame)
    if metadata is not None:
        write_json_atomic(metadata_path(path), {"generator": GENERATOR, "columns": list(frame.columns), **metadata})
    return path


def _now_ts() -> str:
    return datetime.now().strftime("%Y-%m-%d %H:%M:%S")


def append_log_line(log_file: str, message: str) -> None:
    """Append a single timestamped line to the run log; never raises."""
    try:
        ensure_dir(os.path.dirname(log_file))
        with open(log_file, "a", encoding="utf-8") as lf:
            lf.write(f"[{_now_ts()}] {message}\n")
    except Exception:
        # the run log must not break the command
        pass
