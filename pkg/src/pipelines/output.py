"""
CSV and JSON emission of experiment tables.

CSV tables carry a header line and pandas' shortest round-trip float
formatting; run metadata goes to a `<out>.meta.json` sidecar. JSON output
wraps the rows and the metadata in one document. Nothing written here
depends on wall-clock time.
"""

import json
import logging
import math
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .. import __version__

logger = logging.getLogger(__name__)


def run_metadata(command: str, config_metadata: Dict[str, Any], **extra: Any) -> Dict[str, Any]:
    metadata = {"command": command, "version": __version__, "config": config_metadata}
    metadata.update(extra)
    return metadata


def _record(row: Any) -> Dict[str, Any]:
    if hasattr(row, "as_record"):
        return row.as_record()
    if is_dataclass(row):
        return asdict(row)
    return dict(row)


def to_frame(rows: Iterable[Any], columns: Optional[Sequence[str]] = None) -> pd.DataFrame:
    records = [_record(row) for row in rows]
    return pd.DataFrame.from_records(records, columns=list(columns) if columns else None)


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, Path):
        return str(value)
    return value


def render_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, lineterminator="\n")


def render_json(frame: pd.DataFrame, metadata: Dict[str, Any]) -> str:
    rows = frame.astype(object).where(frame.notna(), None).to_dict(orient="records")
    document = {"metadata": metadata, "rows": rows}
    return json.dumps(_jsonable(document), indent=2, sort_keys=False) + "\n"


def write_table(
    rows: Iterable[Any],
    out: Optional[Union[str, Path]],
    fmt: str = "csv",
    metadata: Optional[Dict[str, Any]] = None,
    columns: Optional[Sequence[str]] = None,
) -> str:
    """
    Render a table and write it to `out` (when given).

    Returns:
        The rendered CSV or JSON text
    """
    frame = to_frame(rows, columns)
    metadata = metadata or {}
    if fmt == "csv":
        text = render_csv(frame)
    elif fmt == "json":
        text = render_json(frame, metadata)
    else:
        raise ValueError(f"Unsupported output format: {fmt}")

    if out is not None:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        if fmt == "csv" and metadata:
            sidecar = path.with_name(path.name + ".meta.json")
            sidecar.write_text(json.dumps(_jsonable(metadata), indent=2) + "\n")
        logger.info(f"Wrote {len(frame)} rows to {path}")
    return text


def companion_path(out: Optional[Union[str, Path]], suffix: str) -> Optional[Path]:
    """`<out>.<suffix>` next to the main table, None without an output path"""
    if out is None:
        return None
    path = Path(out)
    return path.with_name(f"{path.name}.{suffix}")
