"""Report serialization: JSON/CSV with 17 significant digits, atomic writes."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from schromax.grid import GridSpec, SpectralFunction

SCHEMA_VERSION = "schromax-report/1"


def _fmt(v: float) -> str:
    return format(v, ".17g")


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return _plain(obj.to_dict())
    return str(obj)


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats printed as ``%.17g``; non-finite floats become null."""
    obj = _plain(obj) if _level == 0 else obj
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, float):
        return _fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        body = ",\n".join(inner + dumps(v, indent, _level + 1) for v in obj)
        return "[\n" + body + "\n" + pad + "]"
    if not obj:
        return "{}"
    body = ",\n".join(f"{inner}{json.dumps(k)}: {dumps(v, indent, _level + 1)}" for k, v in obj.items())
    return "{\n" + body + "\n" + pad + "}"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_atomic(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_plot_data(directory, name: str, xs, ys) -> Path:
    rows = ((float(x), float(y)) for x, y in zip(xs, ys))
    text = "".join(f"{_fmt(x)} {_fmt(y)}\n" for x, y in rows)
    return write_atomic(Path(directory) / f"{name}.dat", text)


def spectrum_csv(F: SpectralFunction, nonzero_only: bool = True) -> str:
    """Coefficients as ``xi[_j], re, im`` rows in fftshift order."""
    spec = F.spec
    xi = np.fft.fftshift(spec.axis_frequencies())
    coeffs = np.fft.fftshift(F.coefficients)
    mesh = np.meshgrid(*([xi] * spec.n), indexing="ij")
    cols = [m.ravel() for m in mesh]
    vals = coeffs.ravel()
    keep = vals != 0 if nonzero_only else np.ones(vals.size, bool)
    header = ["xi"] if spec.n == 1 else [f"xi{j + 1}" for j in range(spec.n)]
    rows = (
        [*(float(c[i]) for c in cols), float(vals[i].real), float(vals[i].imag)]
        for i in np.flatnonzero(keep)
    )
    return csv_text(header + ["re", "im"], rows)


def read_spectrum_csv(path, grid: GridSpec) -> SpectralFunction:
    """Inverse of :func:`spectrum_csv`; frequencies must sit on ``grid``."""
    coeffs = np.zeros(grid.shape, dtype=complex)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) != grid.n + 2:
            raise ValueError(f"{path}: expected {grid.n} frequency columns plus re, im")
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            xi = [float(v) for v in row[: grid.n]]
            idx = []
            for v in xi:
                k = round(v / grid.dxi)
                if abs(k * grid.dxi - v) > 1e-9 * max(1.0, abs(v)) or not -grid.N // 2 <= k < grid.N // 2:
                    raise ValueError(f"{path}:{lineno}: frequency {v} is not on the grid")
                idx.append(k % grid.N)
            coeffs[tuple(idx)] = complex(float(row[grid.n]), float(row[grid.n + 1]))
    return SpectralFunction(grid, coeffs)
