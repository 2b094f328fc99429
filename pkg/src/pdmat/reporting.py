"""Artifact writers: versioned CSV tables, fit JSON, hashed run manifests."""

from __future__ import annotations

import hashlib
import json
import math
import os

SCHEMA_VERSION = "pdmat-results-v1"


def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def write_csv(path, columns, rows, experiment: str):
    """Fixed-schema CSV: a version tag comment line, a header row, data rows.

    Missing cells are written empty; floats use shortest round-trip repr so
    identical runs produce identical bytes.
    """
    with open(path, "w") as fh:
        fh.write(f"# schema: {SCHEMA_VERSION} experiment: {experiment}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) if c in row and row[c] is not None
                              else "" for c in columns) + "\n")


def read_csv(path):
    with open(path) as fh:
        schema = fh.readline().strip()
        columns = fh.readline().strip().split(",")
        rows = []
        for line in fh:
            cells = line.rstrip("\n").split(",")
            rows.append(dict(zip(columns, cells)))
    return schema, columns, rows


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
    if hasattr(obj, "__dataclass_fields__"):
        return {k: _jsonable(getattr(obj, k)) for k in obj.__dataclass_fields__}
    return obj


def write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(outdir, experiment: str, config: dict, passes: dict,
                   status: str, code_version: str, warnings=(), notes=()):
    """Run manifest with a content hash for every other artifact file."""
    files = {}
    for name in sorted(os.listdir(outdir)):
        if name == "manifest.json" or not os.path.isfile(os.path.join(outdir, name)):
            continue
        files[name] = sha256_file(os.path.join(outdir, name))
    payload = {
        "experiment": experiment,
        "config": _jsonable(config),
        "code_version": code_version,
        "files": files,
        "passes": _jsonable(passes),
        "status": status,
        "warnings": list(warnings),
        "notes": list(notes),
    }
    write_json(os.path.join(outdir, "manifest.json"), payload)
    return payload


def read_manifest(outdir) -> dict:
    path = os.path.join(outdir, "manifest.json")
    if not os.path.exists(path):
        raise FileNotFoundError(f"no manifest.json in {outdir}")
    with open(path) as fh:
        return json.load(fh)


def write_loglog_dat(path, xs, ys, label: str):
    """Two-column log10 data file for external plotting."""
    with open(path, "w") as fh:
        fh.write(f"# {label}: log10(x) log10(y)\n")
        for x, y in zip(xs, ys):
            if x > 0 and y > 0:
                fh.write(f"{math.log10(x)!r} {math.log10(y)!r}\n")
