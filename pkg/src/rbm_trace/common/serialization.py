import json
import os
from typing import Any, Dict, List, Sequence, Union

import numpy as np
import pandas as pd

from .exc import RbmTraceError

PathLike = Union[str, "os.PathLike[str]"]


def _to_builtin(obj: Any) -> Any:
    """Recursively convert numpy scalars/arrays and tuples into JSON-friendly builtins."""
    if isinstance(obj, dict):
        return {str(k): _to_builtin(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_builtin(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _to_builtin(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def canonical_json(obj: Any) -> str:
    """Deterministic JSON text: sorted keys, no whitespace variance, floats in ``repr`` precision.

    Args:
        obj (Any): The object to encode. Numpy values are converted to builtins first.

    Returns:
        str: The encoded document.
    """
    return json.dumps(_to_builtin(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


def write_json(path: PathLike, obj: Any, indent: int = 2) -> str:
    try:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(_to_builtin(obj), f, indent=indent, sort_keys=True, allow_nan=False)
            f.write("\n")
    except OSError as e:
        raise RbmTraceError(f"Failed to write JSON file {os.path.abspath(path)}: {e}") from e
    return str(path)


def read_json(path: PathLike) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise RbmTraceError(f"Failed to read JSON file {os.path.abspath(path)}: {e}") from e


def write_csv(path: PathLike, columns: Sequence[str], rows: Union[List[Sequence[Any]], Dict[str, Any]]) -> str:
    """Write a CSV with a fixed header. An empty ``rows`` produces a header-only file.

    Args:
        path (PathLike): Destination file.
        columns (Sequence[str]): Column names, in order.
        rows (Union[List[Sequence[Any]], Dict[str, Any]]): Either row tuples, or a mapping of column name to a column
            array (faster for long numeric columns).

    Returns:
        str: The path written.
    """
    if isinstance(rows, dict):
        df = pd.DataFrame({c: rows[c] for c in columns}, columns=list(columns))
    else:
        df = pd.DataFrame(list(rows), columns=list(columns))
    try:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        df.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    except OSError as e:
        raise RbmTraceError(f"Failed to write CSV file {os.path.abspath(path)}: {e}") from e
    return str(path)
