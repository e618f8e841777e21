"""Grid parsing and table output of the command-line interface."""
from typing import Any, Dict, Iterable, List, Optional, Sequence

import json
import math
import sys

import numpy as np

from ncphase.errors import ValidationError

FORMATS = ("csv", "json")


def parse_grid(text: str) -> np.ndarray:
    """Parses a grid given as ``start:stop:Nlin``, ``start:stop:Nlog`` or a comma list.

    Linear grids include both ends; log grids are geometric and need positive ends.

    Raises:
        ValidationError("Invalid grid"): If the text cannot be parsed.

    Examples:
        >>> parse_grid("0.1:10:3log")
        >>> array([ 0.1,  1. , 10. ])
    """
    text = text.strip()
    try:
        if ":" not in text:
            return np.array([float(val) for val in text.split(",") if val.strip()], dtype=float)

        start, stop, count = text.split(":")
        start, stop = float(start), float(stop)
        kind = "lin"
        for suffix in ("lin", "log"):
            if count.endswith(suffix):
                kind, count = suffix, count[: -len(suffix)]
        num = int(count)
    except ValueError:
        raise ValidationError(f"Invalid grid {text}")

    if num < 1 or not (math.isfinite(start) and math.isfinite(stop)):
        raise ValidationError(f"Invalid grid {text}")
    if kind == "log":
        if start <= 0 or stop <= 0:
            raise ValidationError(f"Invalid grid {text}, log grids need positive ends")
        return np.geomspace(start, stop, num)
    return np.linspace(start, stop, num)


def parse_vector(text: str, size: int, name: str) -> List[float]:
    """Parses a comma-separated vector of ``size`` numbers."""
    try:
        vals = [float(val) for val in text.split(",")]
    except ValueError:
        raise ValidationError(f"Invalid {name} {text}")
    if len(vals) != size or not all(math.isfinite(val) for val in vals):
        raise ValidationError(f"Invalid {name} {text}, {size} finite numbers expected")
    return vals


def format_cell(val: Any) -> str:
    if val is None:
        return ""
    if isinstance(val, (float, np.floating)):
        return "%.17g" % val
    if hasattr(val, "value"):
        return str(val.value)
    return str(val)


def _json_cell(val: Any) -> Any:
    if isinstance(val, np.floating):
        return float(val)
    if isinstance(val, np.integer):
        return int(val)
    if hasattr(val, "value"):
        return val.value
    return val


def render(header: Sequence[str], rows: Iterable[Sequence], fmt: str = "csv", comments: Sequence[str] = ()) -> str:
    """Renders rows as CSV or as a JSON list of row objects.

    CSV floats are written with 17 significant digits; comments become
    ``# ...`` lines before the header and are omitted from JSON.
    """
    if fmt not in FORMATS:
        raise ValidationError(f"Invalid format {fmt}")
    if fmt == "json":
        items: List[Dict] = [dict(zip(header, (_json_cell(val) for val in row))) for row in rows]
        return json.dumps(items, indent=2) + "\n"

    lines = [f"# {comment}" for comment in comments]
    lines.append(",".join(header))
    lines.extend(",".join(format_cell(val) for val in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_table(header: Sequence[str], rows: Iterable[Sequence], output: Optional[str] = None, fmt: str = "csv", comments: Sequence[str] = ()) -> None:
    """Writes a table to ``output`` or to standard output."""
    text = render(header, rows, fmt, comments)
    if output:
        with open(output, "w", encoding="utf-8", newline="") as file:
            file.write(text)
    else:
        sys.stdout.write(text)
