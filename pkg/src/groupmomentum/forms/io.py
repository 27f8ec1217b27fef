"""Import and export of grid forms.

Two formats are supported:

* CSV, node-major: a metadata row (axis sizes, lengths, periodicity, degree,
  multi-index order), a column header, then one row per node with the node
  indices followed by one value per component.
* A compact binary block: magic ``GMDF``, a little-endian header with the
  dimensions, then the component array as little-endian 64-bit floats.

Two-dimensional slices can be dumped as plain CSV matrices for external viewers.
"""

from __future__ import annotations

import csv
import itertools
import struct
from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import ShapeMismatch
from .grid import DiscreteFormField, Grid, multi_indices

MAGIC = b"GMDF"
VERSION = 1


def _check_real_scalar(f: DiscreteFormField) -> None:
    if f.value_shape:
        raise ShapeMismatch("only scalar-valued forms can be exported")
    if f.is_complex:
        raise ShapeMismatch("complex forms must be exported as real and imaginary parts")


def _index_label(idx: tuple[int, ...]) -> str:
    return "".join(str(i) for i in idx) if idx else "-"


def write_csv(f: DiscreteFormField, path: str | Path) -> None:
    """Write a form as node-major CSV."""
    _check_real_scalar(f)
    grid = f.grid
    labels = [_index_label(idx) for idx in f.indices]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["shape=" + "x".join(map(str, grid.shape)),
                    "lengths=" + ";".join(repr(x) for x in grid.lengths),
                    "periodic=" + "".join("1" if p else "0" for p in grid.periodic),
                    f"degree={f.degree}",
                    "indices=" + ";".join(labels)])
        w.writerow([f"i{k}" for k in range(grid.dim)] + [f"c{lab}" for lab in labels])
        flat = f.data.reshape(len(labels), -1)
        for n, node in enumerate(itertools.product(*(range(s) for s in grid.shape))):
            w.writerow(list(node) + [repr(float(v)) for v in flat[:, n]])


def read_csv(path: str | Path) -> DiscreteFormField:
    """Read a form written by :func:`write_csv`."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise ShapeMismatch("CSV form file is truncated")
    meta = dict(item.split("=", 1) for item in rows[0])
    try:
        shape = tuple(int(s) for s in meta["shape"].split("x"))
        lengths = tuple(float(s) for s in meta["lengths"].split(";"))
        periodic = tuple(c == "1" for c in meta["periodic"])
        degree = int(meta["degree"])
    except (KeyError, ValueError) as exc:
        raise ShapeMismatch(f"malformed CSV metadata: {exc}") from exc
    grid = Grid(shape, lengths, periodic)
    labels = [_index_label(idx) for idx in multi_indices(grid.dim, degree)]
    if meta.get("indices", "") != ";".join(labels):
        raise ShapeMismatch("CSV multi-index order does not match the canonical order")
    body = np.array(rows[2:], dtype=float)
    if body.shape != (int(np.prod(shape)), grid.dim + len(labels)):
        raise ShapeMismatch(f"CSV body has shape {body.shape}")
    data = body[:, grid.dim:].T.reshape((len(labels),) + shape)
    return DiscreteFormField(grid, degree, data)


def to_bytes(f: DiscreteFormField) -> bytes:
    """Serialize a form to the binary block format."""
    _check_real_scalar(f)
    grid = f.grid
    header = MAGIC + struct.pack("<III", VERSION, grid.dim, f.degree)
    header += struct.pack(f"<{grid.dim}Q", *grid.shape)
    header += struct.pack(f"<{grid.dim}d", *grid.lengths)
    header += struct.pack(f"<{grid.dim}B", *(1 if p else 0 for p in grid.periodic))
    return header + np.ascontiguousarray(f.data, dtype="<f8").tobytes()


def from_bytes(blob: bytes) -> DiscreteFormField:
    """Inverse of :func:`to_bytes`."""
    if blob[:4] != MAGIC:
        raise ShapeMismatch("not a grid-form block")
    version, dim, degree = struct.unpack_from("<III", blob, 4)
    if version != VERSION:
        raise ShapeMismatch(f"unsupported block version {version}")
    off = 16
    shape = struct.unpack_from(f"<{dim}Q", blob, off)
    off += 8 * dim
    lengths = struct.unpack_from(f"<{dim}d", blob, off)
    off += 8 * dim
    periodic = struct.unpack_from(f"<{dim}B", blob, off)
    off += dim
    grid = Grid(shape, lengths, tuple(bool(p) for p in periodic))
    count = len(multi_indices(dim, degree))
    expected = count * int(np.prod(shape)) * 8
    if len(blob) - off != expected:
        raise ShapeMismatch(f"block carries {len(blob) - off} data bytes, expected {expected}")
    data = np.frombuffer(blob, dtype="<f8", offset=off).reshape((count,) + tuple(shape))
    return DiscreteFormField(grid, degree, data.astype(float))


def write_binary(f: DiscreteFormField, path: str | Path) -> None:
    Path(path).write_bytes(to_bytes(f))


def read_binary(path: str | Path) -> DiscreteFormField:
    return from_bytes(Path(path).read_bytes())


def slice_2d(f: DiscreteFormField, component: Sequence[int], axes: tuple[int, int],
             fixed: dict[int, int] | None = None) -> np.ndarray:
    """A 2-D cross-section of one component with the remaining axes held at given nodes."""
    _check_real_scalar(f)
    fixed = fixed or {}
    arr = f.component(tuple(component))
    index = []
    for k in range(f.dim):
        if k in axes:
            index.append(slice(None))
        else:
            index.append(int(fixed.get(k, 0)))
    out = arr[tuple(index)]
    return out if axes[0] < axes[1] else out.T


def write_slice(f: DiscreteFormField, path: str | Path, component: Sequence[int],
                axes: tuple[int, int] = (0, 1), fixed: dict[int, int] | None = None) -> np.ndarray:
    """Dump :func:`slice_2d` as a CSV matrix (rows along ``axes[0]``)."""
    out = slice_2d(f, component, axes, fixed)
    np.savetxt(path, out, delimiter=",", fmt="%.17g")
    return out
