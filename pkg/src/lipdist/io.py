"""JSON space/map files and CSV/JSON result tables.

Space file layout (``format_version`` 1)::

    {"format_version": 1, "kind": "space", "name": ..., "labels": [...],
     "dist": [d01, d02, ..., d0n, d12, ...],    # upper triangle, row-major
     "coords": [[x, y], ...],                   # optional
     "provenance": {...}}                       # optional

Map files carry ``source``/``target`` space names and ``perm``.
Floats are written in shortest round-trip form, so parsing restores
every distance bit for bit.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path

import numpy as np

from .metric import FiniteMetricSpace, PointMap

__all__ = [
    "FORMAT_VERSION",
    "FileFormatError",
    "space_to_dict",
    "space_from_dict",
    "dump_space",
    "load_space",
    "map_to_dict",
    "map_from_dict",
    "dump_map",
    "load_map",
    "fmt_float",
    "csv_text",
    "json_text",
]

FORMAT_VERSION = 1


class FileFormatError(ValueError):
    pass


def space_to_dict(space: FiniteMetricSpace) -> dict:
    iu, ju = np.triu_indices(space.n, 1)
    out = {
        "format_version": FORMAT_VERSION,
        "kind": "space",
        "name": space.name,
        "labels": list(space.labels),
        "dist": [float(v) for v in space.dist[iu, ju]],
    }
    if space.coords is not None:
        out["coords"] = [[float(x), float(y)] for x, y in space.coords]
    if space.provenance:
        out["provenance"] = dict(space.provenance)
    return out


def space_from_dict(data: dict) -> FiniteMetricSpace:
    _check_header(data, "space")
    try:
        labels = list(data["labels"])
        flat = data["dist"]
        name = data["name"]
    except KeyError as exc:
        raise FileFormatError(f"space file is missing field {exc.args[0]!r}") from None
    n = len(labels)
    if len(flat) != n * (n - 1) // 2:
        raise FileFormatError(
            f"{n} labels need {n * (n - 1) // 2} upper-triangle distances, got {len(flat)}"
        )
    dist = np.zeros((n, n))
    iu, ju = np.triu_indices(n, 1)
    dist[iu, ju] = np.asarray(flat, dtype=np.float64)
    dist[ju, iu] = dist[iu, ju]
    coords = data.get("coords")
    return FiniteMetricSpace(name, tuple(labels), dist,
                             None if coords is None else np.asarray(coords, dtype=np.float64),
                             data.get("provenance"))


def map_to_dict(f: PointMap) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "map",
        "source": f.source.name,
        "target": f.target.name,
        "perm": list(f.perm),
    }


def map_from_dict(data: dict, source: FiniteMetricSpace, target: FiniteMetricSpace) -> PointMap:
    _check_header(data, "map")
    if data.get("source") != source.name or data.get("target") != target.name:
        raise FileFormatError(
            f"map is {data.get('source')!r} -> {data.get('target')!r}, "
            f"but spaces are {source.name!r} -> {target.name!r}"
        )
    return PointMap(source, target, tuple(data["perm"]))


def _check_header(data, kind):
    if not isinstance(data, dict):
        raise FileFormatError("expected a JSON object")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise FileFormatError(f"unsupported format_version {version!r}")
    if data.get("kind", kind) != kind:
        raise FileFormatError(f"expected a {kind} file, got {data.get('kind')!r}")


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def dump_space(space: FiniteMetricSpace, path) -> None:
    Path(path).write_text(json_text(space_to_dict(space)))


def load_space(path) -> FiniteMetricSpace:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: not valid JSON ({exc})") from None
    return space_from_dict(data)


def dump_map(f: PointMap, path) -> None:
    Path(path).write_text(json_text(map_to_dict(f)))


def load_map(path, source: FiniteMetricSpace, target: FiniteMetricSpace) -> PointMap:
    return map_from_dict(json.loads(Path(path).read_text()), source, target)


def fmt_float(x) -> str:
    """17 significant digits; empty for ``None``, ``inf`` spelled out."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if math.isinf(x):
        return "inf"
    return format(float(x), ".17g")


def csv_text(columns, rows, caption: str | None = None) -> str:
    buf = _io.StringIO()
    if caption:
        buf.write(f"# {caption}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt_float(v) for v in (row[c] for c in columns)])
    return buf.getvalue()
