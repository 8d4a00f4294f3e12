"""Plain-text persistence: curve and series CSV files, manifests, configs.

Floats are written with 17 significant digits, so every value round-trips
exactly. Configs and manifests are flat ``section.key = value`` files.
"""

from __future__ import annotations

import csv
import math
import os
from pathlib import Path

import numpy as np

from . import diagnostics as diag
from . import geometry as geo

SNAPSHOT_DIR = "snapshots"
RESCALED_DIR = "rescaled"
SERIES_FILE = "series.csv"
MANIFEST_FILE = "manifest.txt"
LIMIT_FILE = "limit.csv"
RESCALED_COLUMNS = ("x", "w_tilde", "w_tilde_prime", "H_tilde")


def fmt(value):
    """17-significant-digit text of a float (ints and strings pass through)."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def time_tag(t):
    return f"t_{t:.12f}"


def write_table(path, columns, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_table(path):
    """Header and rows of a CSV file; numeric cells become floats."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    out = []
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise ValueError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        out.append([_number(v) for v in row])
    return header, out


def _number(text):
    try:
        return float(text)
    except ValueError:
        return text


def write_curve(path, curve):
    write_table(path, ("x1", "x2"), curve.nodes)


def read_curve(path):
    header, rows = read_table(path)
    if header != ["x1", "x2"]:
        raise ValueError(f"{path}: expected header x1,x2, got {','.join(header)}")
    return geo.GeneratingCurve(np.array(rows, dtype=float))


def write_series(path, records):
    write_table(path, diag.SERIES_COLUMNS, (r.row() for r in records))


def read_series(path):
    header, rows = read_table(path)
    if tuple(header) != diag.SERIES_COLUMNS:
        raise ValueError(f"{path}: unexpected columns {','.join(header)}")
    return [diag.DiagnosticsRecord.from_row(r) for r in rows]


def write_snapshots(out, records, limit=None):
    """``snapshots/t_<time>.csv`` per record (and ``limit.csv`` if given)."""
    d = Path(out) / SNAPSHOT_DIR
    d.mkdir(parents=True, exist_ok=True)
    for r in records:
        write_curve(d / f"{time_tag(r.t)}.csv", r.curve)
    if limit is not None:
        write_curve(d / LIMIT_FILE, limit)


def list_snapshots(out):
    """Time-ordered ``(t, path)`` pairs of the stored snapshots."""
    d = Path(out) / SNAPSHOT_DIR
    items = []
    for p in d.glob("t_*.csv"):
        try:
            items.append((float(p.stem[2:]), p))
        except ValueError:
            continue
    return sorted(items)


def write_rescaled(path, rescaled, h_tilde):
    write_table(
        path,
        RESCALED_COLUMNS,
        zip(rescaled.x, rescaled.w_tilde, rescaled.w_prime, h_tilde),
    )


def write_keyvalue(path, items, header=None):
    """``key = value`` lines; ``items`` is a mapping or sequence of pairs."""
    if hasattr(items, "items"):
        items = items.items()
    lines = [f"# {h}" for h in (header or [])]
    lines += [f"{k} = {fmt(v)}" for k, v in items]
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text("\n".join(lines) + "\n")


class ConfigError(ValueError):
    """Malformed config; carries the file, line and field when known."""

    def __init__(self, message, source=None, line=None, field=None):
        self.source, self.line, self.field = source, line, field
        where = ":".join(str(p) for p in (source, line) if p is not None)
        prefix = f"{where}: " if where else ""
        tag = f"[{field}] " if field else ""
        super().__init__(f"{prefix}{tag}{message}")


def parse_keyvalue(text, source=None):
    """Parse flat ``section.key = value`` text into ``{key: (value, line)}``.

    Blank lines and ``#`` comments are skipped. Duplicate keys are errors.
    """
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", source, lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or any(c.isspace() for c in key):
            raise ConfigError(f"bad key {key!r}", source, lineno)
        if key in out:
            raise ConfigError("duplicate key", source, lineno, key)
        out[key] = (value, lineno)
    return out


def read_keyvalue(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read: {exc.strerror or exc}", str(path)) from exc
    return parse_keyvalue(text, str(path))


def read_manifest(path):
    """Manifest values with numbers converted to float and booleans to bool."""
    out = {}
    for k, (v, _) in read_keyvalue(path).items():
        if v in ("true", "false"):
            out[k] = v == "true"
        else:
            out[k] = _number(v)
    return out


def env_threads(default=None):
    """Parallelism cap from ``IMCF_THREADS`` (falls back to the CPU count)."""
    cap = os.environ.get("IMCF_THREADS")
    n = default or os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ConfigError(f"IMCF_THREADS must be an integer, got {cap!r}") from None
    return n


