"""Self-describing JSON matrix documents.

Example::

    {"n": 1, "hbar": 1.0, "kind": "covariance", "ordering": "xp",
     "entries": [[1.0, 0.0], [0.0, 1.0]], "center": [0.0, 0.0]}

``kind`` is one of ``covariance``, ``symplectic``, ``ellipsoid_shape`` or
``marginal``. Full phase space kinds carry ``2n x 2n`` entries. A
``marginal`` carries an ``n x n`` covariance and a mandatory plane
``plane_A``/``plane_B``; an ``ellipsoid_shape`` with ``n x n`` entries is an
ellipsoid on the plane given by ``plane_A``/``plane_B`` (``l_X`` when
omitted). ``ordering`` must be present and equal to ``"xp"``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DocumentError

__all__ = [
    "MatrixDocument",
    "KINDS",
    "parse_document",
    "load_document",
    "parse_matrix",
    "to_jsonable",
    "dumps",
]

KINDS = ("covariance", "symplectic", "ellipsoid_shape", "marginal")
_FIELDS = {"n", "hbar", "kind", "ordering", "entries", "center", "plane_A", "plane_B"}


@dataclass(frozen=True, eq=False)
class MatrixDocument:
    n: int
    hbar: float
    kind: str
    entries: np.ndarray
    center: np.ndarray = None
    plane_A: np.ndarray = None
    plane_B: np.ndarray = None
    source: str = "<document>"

    @property
    def is_subspace(self) -> bool:
        """True when the entries are ``n x n`` (marginal or plane ellipsoid)."""
        return self.entries.shape[0] == self.n

    @property
    def has_plane(self) -> bool:
        return self.plane_A is not None

    def to_dict(self) -> dict:
        d = {
            "n": self.n,
            "hbar": self.hbar,
            "kind": self.kind,
            "ordering": "xp",
            "entries": to_jsonable(self.entries),
        }
        if self.center is not None:
            d["center"] = to_jsonable(self.center)
        if self.plane_A is not None:
            d["plane_A"] = to_jsonable(self.plane_A)
            d["plane_B"] = to_jsonable(self.plane_B)
        return d


def _fail(source, msg):
    raise DocumentError(f"{source}: {msg}")


def parse_matrix(value, rows, cols, field, source="<document>", allow_flat=True) -> np.ndarray:
    """Validate a nested (or flat row-major) list of numbers as a ``rows x cols`` array."""
    if not isinstance(value, list):
        _fail(source, f"field '{field}': expected a list, got {type(value).__name__}")
    if allow_flat and value and all(_is_number(v) for v in value):
        if len(value) != rows * cols:
            _fail(source, f"field '{field}': flat list has {len(value)} numbers, expected {rows * cols}")
        value = [value[i * cols : (i + 1) * cols] for i in range(rows)]
    if len(value) != rows:
        _fail(source, f"field '{field}': expected {rows} rows, got {len(value)}")
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != cols:
            got = len(row) if isinstance(row, list) else type(row).__name__
            _fail(source, f"field '{field}' row {i}: expected {cols} numbers, got {got}")
        for j, v in enumerate(row):
            if not _is_number(v):
                _fail(source, f"field '{field}' entry [{i}][{j}]: not a finite number ({v!r})")
    return np.array(value, dtype=float)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _side(entries):
    """Side of a square matrix given as nested rows or as a flat list."""
    if not isinstance(entries, list) or not entries:
        return -1
    if all(_is_number(v) for v in entries):
        r = math.isqrt(len(entries))
        return r if r * r == len(entries) else -1
    return len(entries)


def _vector(value, length, field, source):
    if not isinstance(value, list) or len(value) != length or not all(_is_number(v) for v in value):
        _fail(source, f"field '{field}': expected a list of {length} finite numbers")
    return np.array(value, dtype=float)


def parse_document(text: str, source: str = "<document>") -> MatrixDocument:
    """Parse and validate a document; raises :class:`DocumentError` with a located message."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        _fail(source, f"line {exc.lineno} column {exc.colno}: invalid JSON ({exc.msg})")
    if not isinstance(raw, dict):
        _fail(source, "top level must be a JSON object")
    unknown = sorted(set(raw) - _FIELDS)
    if unknown:
        _fail(source, f"unknown field(s): {', '.join(unknown)}")
    for key in ("n", "hbar", "kind", "ordering", "entries"):
        if key not in raw:
            _fail(source, f"missing mandatory field '{key}'")
    if raw["ordering"] != "xp":
        _fail(source, f"field 'ordering': only \"xp\" is supported, got {raw['ordering']!r}")
    n = raw["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        _fail(source, f"field 'n': expected a positive integer, got {n!r}")
    hbar = raw["hbar"]
    if not _is_number(hbar) or hbar <= 0:
        _fail(source, f"field 'hbar': expected a positive number, got {hbar!r}")
    kind = raw["kind"]
    if kind not in KINDS:
        _fail(source, f"field 'kind': expected one of {', '.join(KINDS)}, got {kind!r}")

    entries = raw["entries"]
    if kind == "marginal":
        side = n
    elif kind == "ellipsoid_shape":
        side = _side(entries)
        if side not in (n, 2 * n):
            _fail(source, f"field 'entries': ellipsoid shape must be {n}x{n} or {2 * n}x{2 * n}")
    else:
        side = 2 * n
    M = parse_matrix(entries, side, side, "entries", source)

    subspace = side == n
    center = None
    if "center" in raw:
        center = _vector(raw["center"], n if subspace else 2 * n, "center", source)
    plane_A = plane_B = None
    if ("plane_A" in raw) != ("plane_B" in raw):
        _fail(source, "fields 'plane_A' and 'plane_B' must be given together")
    if "plane_A" in raw:
        plane_A = parse_matrix(raw["plane_A"], n, n, "plane_A", source)
        plane_B = parse_matrix(raw["plane_B"], n, n, "plane_B", source)
    if kind == "marginal" and plane_A is None:
        _fail(source, "a marginal document needs 'plane_A' and 'plane_B'")
    return MatrixDocument(n, float(hbar), kind, M, center, plane_A, plane_B, source)


def load_document(path) -> MatrixDocument:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DocumentError(f"{path}: cannot read file ({exc.strerror})") from exc
    return parse_document(text, str(path))


def to_jsonable(obj):
    """Convert arrays and numpy scalars to plain Python containers."""
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        # avoid "-0.0" so reports do not depend on the sign of roundoff zeros
        return 0.0 if v == 0 else v
    return obj


def dumps(obj) -> str:
    """Deterministic JSON text; floats use the shortest round-trip representation."""
    return json.dumps(to_jsonable(obj), indent=2, allow_nan=False) + "\n"
