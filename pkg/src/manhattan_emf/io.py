"""Columnar record files, result emission (CSV/JSON) and dB helpers."""

from __future__ import annotations

import csv
import io as _io
import json
import math

import numpy as np


def to_db(x):
    return 10.0 * np.log10(x)


def from_db(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def dbm_to_watts(x_dbm):
    return from_db(np.asarray(x_dbm, dtype=float) - 30.0)


def watts_to_dbm(x):
    return to_db(x) + 30.0


# ---------------------------------------------------------------------------
# columnar text records: "# key=value" metadata, a header line, tab-separated rows


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_columns(path, columns, meta=None):
    names = list(columns)
    arrays = [np.asarray(columns[k]) for k in names]
    n = arrays[0].shape[0] if arrays else 0
    if any(a.shape[0] != n for a in arrays):
        raise ValueError("columns differ in length")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for k, v in (meta or {}).items():
            fh.write(f"# {k}={v}\n")
        fh.write("\t".join(names) + "\n")
        for i in range(n):
            fh.write("\t".join(_fmt(a[i]) for a in arrays) + "\n")


_BOOL_COLUMNS = {"los", "serving_is_los"}


def read_columns(path):
    """Inverse of :func:`write_columns`: (columns dict, metadata dict)."""
    meta, rows, names = {}, [], None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                k, _, v = line[1:].strip().partition("=")
                meta[k.strip()] = v.strip()
            elif names is None:
                names = line.split("\t")
            else:
                rows.append(line.split("\t"))
    if names is None:
        raise ValueError(f"{path}: no header line")
    cols = {}
    for j, k in enumerate(names):
        raw = [r[j] for r in rows]
        if k in _BOOL_COLUMNS:
            cols[k] = np.array([x == "1" for x in raw], dtype=bool)
            continue
        try:
            vals = np.array([int(x) for x in raw], dtype=int)
        except ValueError:
            try:
                vals = np.array([float(x) for x in raw], dtype=float)
            except ValueError:
                vals = np.array(raw)
        cols[k] = vals
    return cols, meta


# ---------------------------------------------------------------------------
# results


def format_number(x):
    """12 significant digits, locale independent."""
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def csv_text(header, rows):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format_number(v) for v in r])
    return buf.getvalue()


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(header, rows))


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, complex):
        return str(x)
    return x


def write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
