"""Standalone reader for the simulator's binary grid files.

Deliberately independent of the simulation package: the figure scripts
consume only documented external interfaces (this binary format, the CSV
traces, and the JSON manifests).

Format (little-endian):
    magic   4 bytes  b"CPCG"
    version u32      1
    rank    u32      number of axes
    per axis: start f64, spacing f64, count u64
    values: rank-dimensional row-major array of (re f64, im f64) pairs
"""

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"CPCG"
VERSION = 1


class GridFileError(ValueError):
    pass


@dataclass(frozen=True)
class GridAxis:
    start: float
    spacing: float
    count: int

    def points(self) -> np.ndarray:
        return self.start + self.spacing * np.arange(self.count)

    @property
    def stop(self) -> float:
        return self.start + (self.count - 1) * self.spacing


def read_grid(path):
    """Return (axes, values): a list of GridAxis and a complex ndarray."""
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != MAGIC:
            raise GridFileError(f"{path}: not a grid file (magic {magic!r})")
        version, rank = struct.unpack("<II", f.read(8))
        if version != VERSION:
            raise GridFileError(f"{path}: unsupported format version {version}")
        axes = []
        for _ in range(rank):
            start, spacing, count = struct.unpack("<ddQ", f.read(24))
            axes.append(GridAxis(start, spacing, int(count)))
        shape = tuple(ax.count for ax in axes)
        n = int(np.prod(shape))
        raw = np.frombuffer(f.read(16 * n), dtype="<f8")
        if raw.size != 2 * n:
            raise GridFileError(f"{path}: truncated data section")
    values = (raw[0::2] + 1j * raw[1::2]).reshape(shape)
    return axes, values
