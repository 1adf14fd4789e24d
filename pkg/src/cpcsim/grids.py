"""Grid containers, norms/overlaps, frame transforms, and grid file I/O.

The two-photon amplitude lives on a fixed uniform (eta, nu) comoving grid and
the ancilla amplitude on a uniform t_a grid.  Storing the 2D field in comoving
coordinates absorbs the advection terms exactly, so the propagator only ever
integrates the coupling terms.

Quadrature is trapezoidal (uniform weights, endpoints halved); fields are
expected to be negligible at the grid boundary, which run configuration
validates.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

GRID_MAGIC = b"CPCG"
GRID_FORMAT_VERSION = 1


class AxisMismatchError(ValueError):
    """Two grids that must share axes do not."""


@dataclass(frozen=True)
class Axis:
    """Uniformly spaced coordinate axis."""

    start: float
    spacing: float
    count: int

    def __post_init__(self):
        if not self.spacing > 0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")

    @property
    def stop(self) -> float:
        return self.start + (self.count - 1) * self.spacing

    def points(self) -> np.ndarray:
        return self.start + self.spacing * np.arange(self.count)

    def trapz_weights(self) -> np.ndarray:
        """Trapezoidal quadrature weights; a single cell gets weight=spacing."""
        w = np.full(self.count, self.spacing)
        if self.count > 1:
            w[0] *= 0.5
            w[-1] *= 0.5
        return w

    def index_of(self, x: float) -> int:
        """Nearest grid index for coordinate x (not range-checked)."""
        return int(round((x - self.start) / self.spacing))

    @staticmethod
    def from_range(start: float, stop: float, spacing: float) -> "Axis":
        count = int(round((stop - start) / spacing)) + 1
        return Axis(start=start, spacing=spacing, count=count)


def _check_same_axes(a: "ComplexGrid2D", b: "ComplexGrid2D"):
    if a.eta_axis != b.eta_axis or a.nu_axis != b.nu_axis:
        raise AxisMismatchError("grids do not share (eta, nu) axes")


@dataclass
class ComplexGrid2D:
    """Joint signal-idler amplitude sampled on the (eta, nu) comoving grid."""

    eta_axis: Axis
    nu_axis: Axis
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.eta_axis.count, self.nu_axis.count):
            raise ValueError(
                f"values shape {self.values.shape} does not match axes "
                f"({self.eta_axis.count}, {self.nu_axis.count})"
            )

    def copy(self) -> "ComplexGrid2D":
        return ComplexGrid2D(self.eta_axis, self.nu_axis, self.values.copy())

    def zeros_like(self) -> "ComplexGrid2D":
        return ComplexGrid2D(
            self.eta_axis, self.nu_axis, np.zeros_like(self.values)
        )

    def quad_weights(self) -> np.ndarray:
        return np.outer(
            self.eta_axis.trapz_weights(), self.nu_axis.trapz_weights()
        )

    def norm2(self) -> float:
        """Squared L2 norm with trapezoidal weights."""
        return float(
            np.sum(np.abs(self.values) ** 2 * self.quad_weights())
        )

    def normalized(self) -> "ComplexGrid2D":
        n2 = self.norm2()
        if n2 == 0.0:
            raise ZeroDivisionError("cannot normalize an all-zero grid")
        return ComplexGrid2D(
            self.eta_axis, self.nu_axis, self.values / np.sqrt(n2)
        )

    def centroid(self) -> tuple[float, float]:
        """Intensity (|psi|^2) centroid in (eta, nu) coordinates."""
        w = np.abs(self.values) ** 2 * self.quad_weights()
        total = w.sum()
        if total == 0.0:
            raise ValueError("centroid of an all-zero grid is undefined")
        eta = self.eta_axis.points()
        nu = self.nu_axis.points()
        return (
            float((w.sum(axis=1) @ eta) / total),
            float((w.sum(axis=0) @ nu) / total),
        )


@dataclass
class ComplexGrid1D:
    """Ancilla amplitude sampled on the t_a grid."""

    ta_axis: Axis
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.ta_axis.count,):
            raise ValueError(
                f"values shape {self.values.shape} does not match axis "
                f"({self.ta_axis.count},)"
            )

    def copy(self) -> "ComplexGrid1D":
        return ComplexGrid1D(self.ta_axis, self.values.copy())

    def norm2(self) -> float:
        return float(
            np.sum(np.abs(self.values) ** 2 * self.ta_axis.trapz_weights())
        )

    @staticmethod
    def zeros(axis: Axis) -> "ComplexGrid1D":
        return ComplexGrid1D(axis, np.zeros(axis.count, dtype=np.complex128))


@dataclass
class SimState:
    """Propagation state: z position plus both field amplitudes."""

    z: float
    psi_si: ComplexGrid2D
    psi_a: ComplexGrid1D

    def copy(self) -> "SimState":
        return SimState(self.z, self.psi_si.copy(), self.psi_a.copy())


def l2_norm2(state: SimState) -> tuple[float, float]:
    """Squared L2 norms (two-photon, ancilla) with grid quadrature weights."""
    return state.psi_si.norm2(), state.psi_a.norm2()


def overlap(a: ComplexGrid2D, b: ComplexGrid2D) -> complex:
    """Weighted inner product <a, b> = sum a * conj(b) * dEta * dNu."""
    _check_same_axes(a, b)
    return complex(np.sum(a.values * np.conj(b.values) * a.quad_weights()))


def comoving_to_lab(eta, nu, z, beta1s, beta1i):
    """(eta, nu) -> (t_s, t_i): t_s = eta + z*beta1s, t_i = nu + z*beta1i."""
    return eta + z * beta1s, nu + z * beta1i


def lab_to_comoving(t_s, t_i, z, beta1s, beta1i):
    """Exact inverse of :func:`comoving_to_lab`."""
    return t_s - z * beta1s, t_i - z * beta1i


def xi_coordinate(t_s, t_i, z, beta1, beta1s, beta1i):
    """Front coordinate xi = beta1 * (z - t_i/beta1i + t_s/beta1s)."""
    if beta1s == 0 or beta1i == 0:
        raise ZeroDivisionError("beta1s and beta1i must be nonzero")
    return beta1 * (z - t_i / beta1i + t_s / beta1s)


# --- binary grid format -------------------------------------------------
#
# little-endian; header = magic "CPCG", format version u32, rank u32, then
# per-axis (start f64, spacing f64, count u64), then row-major complex
# values as (re, im) f64 pairs.

def _write_header(fh, axes):
    fh.write(GRID_MAGIC)
    fh.write(struct.pack("<II", GRID_FORMAT_VERSION, len(axes)))
    for ax in axes:
        fh.write(struct.pack("<ddQ", ax.start, ax.spacing, ax.count))


def _read_header(fh):
    magic = fh.read(4)
    if magic != GRID_MAGIC:
        raise ValueError(f"not a grid file (magic {magic!r})")
    version, rank = struct.unpack("<II", fh.read(8))
    if version != GRID_FORMAT_VERSION:
        raise ValueError(f"unsupported grid format version {version}")
    axes = []
    for _ in range(rank):
        start, spacing, count = struct.unpack("<ddQ", fh.read(24))
        axes.append(Axis(start=start, spacing=spacing, count=int(count)))
    return axes


def _write_values(fh, values):
    flat = np.ascontiguousarray(values, dtype=np.complex128).ravel()
    pairs = np.empty(2 * flat.size, dtype="<f8")
    pairs[0::2] = flat.real
    pairs[1::2] = flat.imag
    fh.write(pairs.tobytes())


def _read_values(fh, shape):
    n = int(np.prod(shape))
    raw = np.frombuffer(fh.read(16 * n), dtype="<f8")
    if raw.size != 2 * n:
        raise ValueError("grid file truncated")
    return (raw[0::2] + 1j * raw[1::2]).reshape(shape)


def save_grid(path, grid):
    """Write a ComplexGrid1D or ComplexGrid2D to the binary grid format."""
    if isinstance(grid, ComplexGrid2D):
        axes = [grid.eta_axis, grid.nu_axis]
    elif isinstance(grid, ComplexGrid1D):
        axes = [grid.ta_axis]
    else:
        raise TypeError(f"unsupported grid type {type(grid)!r}")
    with open(path, "wb") as fh:
        _write_header(fh, axes)
        _write_values(fh, grid.values)


def load_grid(path):
    """Read a grid file; returns ComplexGrid1D or ComplexGrid2D by rank."""
    with open(path, "rb") as fh:
        axes = _read_header(fh)
        values = _read_values(fh, tuple(ax.count for ax in axes))
    if len(axes) == 2:
        return ComplexGrid2D(axes[0], axes[1], values)
    if len(axes) == 1:
        return ComplexGrid1D(axes[0], values)
    raise ValueError(f"unsupported grid rank {len(axes)}")
