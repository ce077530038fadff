"""CSV/JSON emitters with a fixed serialization contract.

All floats are written with 17 significant digits, files are UTF-8 with LF
endings, and every file starts with comment lines recording the tool
version and run configuration, so identical configurations produce
byte-identical output.
"""

from __future__ import annotations

import json
from typing import Iterable, Optional, Sequence


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence], comment: Optional[str] = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v) for v in row) + "\n")


def _round_floats(obj):
    if isinstance(obj, float):
        return float(f"{obj:.17g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def write_json(path, obj, comment: Optional[str] = None) -> None:
    """JSON body preceded by ``#`` comment lines (strip them before json.loads)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        json.dump(_round_floats(obj), fh, indent=2, sort_keys=False)
        fh.write("\n")


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        body = "".join(line for line in fh if not line.lstrip().startswith("#"))
    return json.loads(body)
