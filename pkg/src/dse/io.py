"""CSV and config-file formats used by the command line.

All CSV files are UTF-8 with LF line endings, a mandatory header row and
floats written with 17 significant digits, so values round-trip exactly.

points.csv   ``x0[,x1,...]`` (cartesian) or ``theta,phi`` (spherical)
field.csv    ``re0,im0[,re1,im1,...]``
coeffs.csv   ``flat_index,k0[,k1,...],re0,im0,...`` (Fourier; ``k`` are
             per-axis mode indices) or ``flat_index,l,m,re0,im0,...``
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from dse.core import CoeffVector, ModeSpec, PointSet, unflatten_mode_index_array
from dse.errors import ConfigError, ShapeError
from dse.spherical import sh_index_from_flat


def _fmt(v):
    return f"{v:.17g}"


def _write(target, header, rows):
    """Write to a path, or to an already open text stream."""
    if hasattr(target, "write"):
        writer = csv.writer(target, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return
    with open(target, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _read(path):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ShapeError(f"{path} is empty; a header row is required") from None
        rows = [r for r in reader if r]
    return header, rows


def write_points(path, points: PointSet) -> None:
    if points.geometry == "spherical":
        header = ["theta", "phi"]
    else:
        header = [f"x{d}" for d in range(points.dim)]
    _write(path, header, ([_fmt(v) for v in row] for row in points.coords))


def read_points(path) -> PointSet:
    header, rows = _read(path)
    data = np.array([[float(v) for v in r] for r in rows], dtype=np.float64).reshape(len(rows), len(header))
    if header == ["theta", "phi"]:
        return PointSet.spherical(data[:, 0], data[:, 1])
    if header != [f"x{d}" for d in range(len(header))]:
        raise ConfigError(f"{path}: unrecognised points header {header}")
    return PointSet.cartesian(data)


def write_field(path, values) -> None:
    values = np.asarray(values, dtype=np.complex128)
    if values.ndim == 1:
        values = values[:, None]
    header = [f"{part}{c}" for c in range(values.shape[1]) for part in ("re", "im")]
    rows = ([_fmt(x) for v in row for x in (v.real, v.imag)] for row in values)
    _write(path, header, rows)


def _complex_columns(header, rows, start):
    names = header[start:]
    if len(names) % 2 or any(names[2 * c] != f"re{c}" or names[2 * c + 1] != f"im{c}"
                             for c in range(len(names) // 2)):
        raise ConfigError(f"expected re0,im0,... columns, got {names}")
    data = np.array([[float(v) for v in r[start:]] for r in rows], dtype=np.float64)
    data = data.reshape(len(rows), len(names))
    return data[:, 0::2] + 1j * data[:, 1::2]


def read_field(path) -> np.ndarray:
    header, rows = _read(path)
    return _complex_columns(header, rows, 0)


def write_coeffs(path, coeffs: CoeffVector) -> None:
    spec = coeffs.mode_spec
    values = coeffs.values
    m_total = values.shape[0]
    if spec.kind == "spherical":
        index_header = ["l", "m"]
        index_rows = [(ix.l, ix.m) for ix in map(sh_index_from_flat, range(m_total))]
    else:
        index_header = [f"k{d}" for d in range(spec.dim)]
        index_rows = unflatten_mode_index_array(np.arange(m_total), spec.modes_per_dim).tolist()
    header = ["flat_index"] + index_header + [f"{p}{c}" for c in range(values.shape[1]) for p in ("re", "im")]
    rows = (
        [str(j)] + [str(i) for i in index_rows[j]] + [_fmt(x) for v in values[j] for x in (v.real, v.imag)]
        for j in range(m_total)
    )
    _write(path, header, rows)


def read_coeffs(path, mode_spec: ModeSpec | None = None) -> CoeffVector:
    header, rows = _read(path)
    spherical = header[:3] == ["flat_index", "l", "m"]
    if spherical:
        start = 3
    else:
        start = 1
        while start < len(header) and header[start].startswith("k"):
            start += 1
    values = _complex_columns(header, rows, start)
    order = np.array([int(r[0]) for r in rows])
    values = values[np.argsort(order)]
    if mode_spec is None:
        if spherical:
            l_max = int(round(np.sqrt(len(rows))))
            mode_spec = ModeSpec.spherical(l_max)
        else:
            idx = np.array([[int(v) for v in r[1:start]] for r in rows])
            mode_spec = ModeSpec.fourier(tuple(int(v) + 1 for v in idx.max(axis=0)), start - 1)
    return CoeffVector(values, mode_spec)


# key=value run configs -----------------------------------------------------

def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"config line {lineno}: empty key")
        out[key.replace("-", "_")] = value
    return out


def read_config(path) -> dict:
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def format_config(command: str, values: dict) -> str:
    lines = [f"# dse {command}"]
    for key in sorted(values):
        value = values[key]
        if value is None or value is False:
            continue
        lines.append(f"{key} = {'true' if value is True else value}")
    return "\n".join(lines) + "\n"
