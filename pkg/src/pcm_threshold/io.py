"""Flat-file formats: PCM text files, curve and table CSVs, provenance sidecars, config files."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .consistency import ConsistencyConfig
from .errors import DomainError, FormatError
from .pcm import Pcm
from .pipeline import SweepCurve, SweepPoint, ThresholdRow, ThresholdTable

CURVE_HEADER = ("delta", "delta_max_pct", "i_min")
TABLE_HEADER = ("delta_pct", "threshold")
DIAGONAL_TOL = 1e-9


def _fmt(x: float) -> str:
    return f"{x:.9f}"


def parse_pcm_text(text: str, source: str = "<text>") -> Pcm:
    rows = [line.split() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    n = len(rows)
    if n == 0:
        raise FormatError(f"{source}: no matrix rows")
    if any(len(r) != n for r in rows):
        raise FormatError(f"{source}: matrix is not square ({n} rows, row lengths {[len(r) for r in rows]})")
    try:
        m = np.array([[float(x) for x in r] for r in rows])
    except ValueError as exc:
        raise FormatError(f"{source}: {exc}") from None
    if not np.all(np.isfinite(m)) or np.any(m <= 0):
        raise DomainError(f"{source}: all entries must be positive")
    diag = np.diag(m)
    if np.any(np.abs(diag - 1.0) > DIAGONAL_TOL):
        raise FormatError(f"{source}: diagonal entries must be 1, got {diag.tolist()}")
    np.fill_diagonal(m, 1.0)
    return Pcm(m)


def parse_pcm_file(path) -> Pcm:
    """Read ``n`` lines of ``n`` whitespace-separated positive decimals.

    Reciprocity is not enforced; check ``Pcm.reciprocal`` on the result.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(f"cannot read PCM file {path}: {exc.strerror}") from None
    return parse_pcm_text(text, str(path))


def format_pcm(pcm: Pcm) -> str:
    return "".join(" ".join(repr(float(x)) for x in row) + "\n" for row in pcm.entries)


def provenance_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".provenance.json")


def _write_json(path: Path, data: dict):
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _open_for_write(path: Path):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return path.open("w", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from None


def write_curve_csv(curve: SweepCurve, path) -> None:
    path = Path(path)
    with _open_for_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CURVE_HEADER)
        for p in curve.points:
            writer.writerow([_fmt(p.delta), _fmt(p.delta_max_pct), _fmt(p.i_min)])
    if curve.provenance:
        _write_json(provenance_path(path), curve.provenance)


def read_curve_csv(path) -> SweepCurve:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != CURVE_HEADER:
            raise FormatError(f"{path}: expected header {','.join(CURVE_HEADER)}, got {','.join(header)}")
        points = [SweepPoint(*(float(x) for x in row)) for row in reader if row]
    meta = provenance_path(path)
    provenance = json.loads(meta.read_text()) if meta.exists() else {}
    return SweepCurve(points, provenance)


def write_table_csv(table: ThresholdTable, path, extra_provenance: dict | None = None) -> None:
    path = Path(path)
    with _open_for_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TABLE_HEADER)
        writer.writerow(["floor", _fmt(table.floor_threshold)])
        for r in table.rows:
            writer.writerow([_fmt(r.delta_requirement_pct), _fmt(r.threshold)])
    meta = {
        "consistency": table.consistency.tag,
        "clamped_requirements_pct": [r.delta_requirement_pct for r in table.rows if r.clamped],
    }
    meta.update(extra_provenance or {})
    _write_json(provenance_path(path), meta)


def read_table_csv(path) -> ThresholdTable:
    """Load a table; without a provenance sidecar the default index configuration is assumed."""
    path = Path(path)
    meta_path = provenance_path(path)
    meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
    clamped = set(meta.get("clamped_requirements_pct", []))
    floor = None
    rows = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != TABLE_HEADER:
            raise FormatError(f"{path}: expected header {','.join(TABLE_HEADER)}, got {','.join(header)}")
        for row in reader:
            if not row:
                continue
            if len(row) != 2:
                raise FormatError(f"{path}: expected 2 columns, got {row}")
            if row[0].strip() == "floor":
                floor = float(row[1])
            else:
                d = float(row[0])
                rows.append(ThresholdRow(d, float(row[1]), d in clamped))
    if not rows:
        raise FormatError(f"{path}: table has no rows")
    if floor is None:
        floor = rows[0].threshold
    return ThresholdTable(rows, floor, ConsistencyConfig.from_tag(meta.get("consistency", "identity")))


def read_config_file(path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment. Keys are normalized to dashes."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise FormatError(f"cannot read config file {path}: {exc.strerror}") from None
    out = {}
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise FormatError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        out[key.strip().replace("_", "-")] = value.strip()
    return out
