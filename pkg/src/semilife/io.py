"""Frame, state-dump, and series file formats.

Frames are binary PGM (P5, maxval 255) with pixel = round-half-up of
a*255, row-major top to bottom. State dumps come in two lossless
flavors: a text format with 17-significant-digit decimals and a raw
little-endian binary format; load(dump(u)) is bitwise identical to u in
both. Liveness series are CSV with header ``generation,mean_a,std_a``
and 17-significant-digit decimals.
"""

from __future__ import annotations

import numpy as np

from .analysis import LivenessSeries
from .core import Precision, Universe

__all__ = [
    "export_frame",
    "dump_state",
    "load_state",
    "write_series_csv",
    "read_series_csv",
]

_TEXT_MAGIC = "semilife-state text"
_BINARY_MAGIC = b"semilife-state binary\n"


def export_frame(u: Universe, path) -> None:
    """Write a binary PGM frame: pixel = floor(a*255 + 0.5) (round half up)."""
    pixels = np.floor(u.a.astype(np.float64) * 255.0 + 0.5).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{u.width} {u.height}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())


def dump_state(u: Universe, path, format: str = "text") -> None:
    """Lossless dump of dimensions, precision and amplitudes."""
    if format == "text":
        with open(path, "w", encoding="ascii") as fh:
            fh.write(f"{_TEXT_MAGIC}\n")
            fh.write(f"{u.width} {u.height} {u.precision.value}\n")
            flat = u.a.ravel()
            for v in flat:
                fh.write(f"{float(v):.17g}\n")
    elif format == "binary":
        le = "<f4" if u.precision is Precision.SINGLE else "<f8"
        with open(path, "wb") as fh:
            fh.write(_BINARY_MAGIC)
            fh.write(f"{u.width} {u.height} {u.precision.value}\n".encode("ascii"))
            fh.write(np.ascontiguousarray(u.a, dtype=le).tobytes())
    else:
        raise ValueError(f"unknown dump format {format!r}; expected 'text' or 'binary'")


def _parse_dims(header: str, path, lineno: int):
    parts = header.split()
    if len(parts) != 3:
        raise ValueError(f"{path}:{lineno}: expected 'width height precision', got {header!r}")
    try:
        width, height = int(parts[0]), int(parts[1])
    except ValueError:
        raise ValueError(f"{path}:{lineno}: non-integer dimensions in {header!r}") from None
    if width < 1 or height < 1:
        raise ValueError(f"{path}:{lineno}: dimensions must be positive, got {width}x{height}")
    return width, height, Precision.parse(parts[2])


def load_state(path) -> Universe:
    """Read either dump flavor back into a Universe (format auto-detected)."""
    with open(path, "rb") as fh:
        head = fh.read(len(_BINARY_MAGIC))
        if head == _BINARY_MAGIC:
            header = fh.readline().decode("ascii").strip()
            width, height, precision = _parse_dims(header, path, 2)
            le = "<f4" if precision is Precision.SINGLE else "<f8"
            raw = fh.read()
            expected = width * height * np.dtype(le).itemsize
            if len(raw) != expected:
                raise ValueError(
                    f"{path}: truncated binary dump: {len(raw)} payload bytes, expected {expected}"
                )
            arr = np.frombuffer(raw, dtype=le).reshape(height, width).astype(precision.dtype)
            return Universe(arr, copy=False)

    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != _TEXT_MAGIC:
        raise ValueError(f"{path}:1: not a semilife state dump")
    if len(lines) < 2:
        raise ValueError(f"{path}:2: missing dimension header")
    width, height, precision = _parse_dims(lines[1], path, 2)
    expected = width * height
    values = []
    for lineno, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: malformed amplitude {line!r}") from None
        if len(values) > expected:
            raise ValueError(f"{path}:{lineno}: more than {expected} amplitudes")
    if len(values) != expected:
        raise ValueError(
            f"{path}: truncated dump: {len(values)} amplitudes, {expected - len(values)} cells missing"
        )
    arr = np.array(values, dtype=precision.dtype).reshape(height, width)
    return Universe(arr, copy=False)


def write_series_csv(series: LivenessSeries, path) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write("generation,mean_a,std_a\n")
        for g, m, s in zip(series.generations, series.mean_a, series.std_a):
            fh.write(f"{g},{m:.17g},{s:.17g}\n")


def read_series_csv(path) -> LivenessSeries:
    series = LivenessSeries()
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != "generation,mean_a,std_a":
            raise ValueError(f"{path}:1: unexpected series header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.strip().split(",")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 columns, got {line!r}")
            series.append(int(parts[0]), float(parts[1]), float(parts[2]))
    return series
