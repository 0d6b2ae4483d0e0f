import logging
import os
from pathlib import Path
from typing import Dict, Optional, Union

from dotenv import dotenv_values, load_dotenv

load_dotenv()

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
LOG_LEVELS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")


def setup_logging(level: Optional[str] = None) -> None:
    """Configure root logging once; level from argument or KNN_LAB_LOG_LEVEL"""
    level = (level or os.getenv("KNN_LAB_LOG_LEVEL", "INFO")).upper()
    if level not in LOG_LEVELS:
        raise ValueError(f"Unsupported log level: {level}")
    logging.basicConfig(level=level, format=LOG_FORMAT)


def default_threads() -> int:
    """Worker count from KNN_LAB_THREADS (default 1)"""
    raw = os.getenv("KNN_LAB_THREADS", "1")
    try:
        threads = int(raw)
    except ValueError as e:
        raise ValueError(f"KNN_LAB_THREADS must be an integer, got {raw!r}") from e
    return max(1, threads)


def load_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """
    Read a flat key=value experiment file.

    Keys may use dashes or underscores (`master-seed` == `master_seed`);
    lines starting with # are comments.

    Raises:
        FileNotFoundError: If the file does not exist
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Config file not found: {path}")
    values = dotenv_values(path)
    return {
        key.strip().replace("-", "_"): value
        for key, value in values.items()
        if value is not None and value != ""
    }
