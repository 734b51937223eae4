"""Serialized outputs: raw field dumps, ladder CSVs, deterministic JSON.

Field dump format: one JSON header line (dim, nx, nt, length) terminated
by a newline, followed by the raw values as little-endian 64-bit floats
in row-major order, time layer outermost.  Floats in CSV/JSON are
rendered with 17 significant digits so identical runs produce identical
bytes.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .diagnostics import LadderReport, RungRecord
from .errors import ConfigurationError, GridError
from .geometry import Field, SpaceTimeGrid, SpatialField

FLOAT_FMT = "{:.17g}"


def fmt_value(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return FLOAT_FMT.format(float(x))


def write_field(path, f: Field):
    header = {"dim": f.grid.dim, "nx": f.grid.nx, "nt": f.grid.nt,
              "length": f.grid.length, "kind": "field"}
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def write_spatial_field(path, f: SpatialField):
    header = {"dim": f.grid.dim, "nx": f.grid.nx, "nt": f.grid.nt,
              "length": f.grid.length, "kind": "spatial"}
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def _read_dump(path):
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode())
        raw = fh.read()
    return header, np.frombuffer(raw, dtype="<f8")


def _check_header(header, grid: SpaceTimeGrid):
    if (header["dim"], header["nx"], header["nt"]) != (grid.dim, grid.nx, grid.nt):
        raise GridError(f"dump header {header} does not match grid "
                        f"(dim={grid.dim}, nx={grid.nx}, nt={grid.nt})")


def read_field(path, grid: SpaceTimeGrid) -> Field:
    header, flat = _read_dump(path)
    _check_header(header, grid)
    return Field(grid, flat.reshape(grid.shape).copy())


def read_spatial_field(path, grid: SpaceTimeGrid) -> SpatialField:
    header, flat = _read_dump(path)
    _check_header(header, grid)
    return SpatialField(grid, flat.reshape(grid.spatial_shape).copy())


def write_ladder_csv(path, report: LadderReport):
    cols = RungRecord.columns()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for rung in report.rungs:
            w.writerow([fmt_value(v) for v in rung.row()])


def read_ladder_csv(path) -> list:
    """Rows of a ladder CSV as dicts of floats (ints kept integral)."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = []
        for row in reader:
            parsed = {}
            for key, val in row.items():
                parsed[key] = int(val) if key in ("newton_iters", "energy_formal") \
                    else float(val)
            rows.append(parsed)
    return rows


def write_json(path, obj):
    """Deterministic JSON: sorted keys, native float repr (round-trips exactly)."""
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
