"""Diagnostics of the two-photon field.

Gate fidelity against the input shape, the fourth-order coherence function
Gamma^(2,2) (pure-state shifted self-overlap), its diagonal width T^(4),
the slowness margin that controls distributive gate operation, the position
and width of the conversion front, and the Bell-type quadrant decomposition
of the (eta, nu) plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.signal import correlate

from .grids import Axis, ComplexGrid2D, overlap


@dataclass(frozen=True)
class CoherenceMap:
    """Gamma^(2,2)(tau_s, tau_i) over a shift window.

    Invariants: Gamma(0,0) is real and equals the squared norm of the state
    (1 for normalized input); Gamma(-tau_s, -tau_i) = conj Gamma(tau_s, tau_i).
    """

    tau_s_axis: Axis
    tau_i_axis: Axis
    values: np.ndarray

    def at_zero(self) -> complex:
        return complex(
            self.values[self.tau_s_axis.index_of(0.0), self.tau_i_axis.index_of(0.0)]
        )


def fidelity(current: ComplexGrid2D, input_grid: ComplexGrid2D) -> float:
    """F = 1/2 |1 - overlap(current / ||current||, input)|.

    F = 0 at the input, 1 after a perfect sign flip with preserved shape.
    A fully converted state (zero norm) yields F = 1/2 with overlap 0.
    """
    n2 = current.norm2()
    if n2 < 1e-30:
        ov = 0.0j
    else:
        ov = overlap(current, input_grid) / math.sqrt(n2)
    return 0.5 * abs(1.0 - ov)


def _integer_shift_overlaps(psi: ComplexGrid2D) -> np.ndarray:
    """C[m, n] = sum_jk conj(psi[j-m, k-n]) psi[j, k] dA over all lags.

    Uniform cell weights keep the Hermitian symmetry C[-m,-n] = conj C[m,n]
    exact in floating point; the difference from trapezoidal quadrature is
    negligible for fields that decay at the grid boundary.
    """
    dA = psi.eta_axis.spacing * psi.nu_axis.spacing
    return correlate(psi.values * dA, psi.values, mode="full", method="fft")


def gamma22(
    psi_si: ComplexGrid2D,
    sigma: float | None = None,
    half_window: float | None = None,
    spacing: float | None = None,
) -> CoherenceMap:
    """Fourth-order coherence of a pure two-photon state.

    Gamma(tau_s, tau_i) = integral of conj(Psi(eta - tau_s, nu - tau_i))
    * Psi(eta, nu).  Defaults: window +-10 sigma at spacing sigma/4.
    Off-grid shifts are evaluated by bilinear interpolation between the
    integer-lag overlaps, which is identical to shifting the field
    bilinearly before integrating.
    """
    if half_window is None:
        if sigma is None:
            raise ValueError("provide sigma or an explicit half_window")
        half_window = 10.0 * sigma
    if spacing is None:
        spacing = half_window / 40.0
    n_half = int(math.ceil(half_window / spacing))
    taus = spacing * np.arange(-n_half, n_half + 1)
    tau_s_axis = Axis(start=-n_half * spacing, spacing=spacing, count=2 * n_half + 1)
    tau_i_axis = tau_s_axis

    C = _integer_shift_overlaps(psi_si)
    m0 = psi_si.eta_axis.count - 1
    n0 = psi_si.nu_axis.count - 1

    u = taus / psi_si.eta_axis.spacing
    v = taus / psi_si.nu_axis.spacing
    iu = np.floor(u).astype(int)
    iv = np.floor(v).astype(int)
    fu = (u - iu)[:, None]
    fv = (v - iv)[None, :]
    I = m0 + iu[:, None]
    J = n0 + iv[None, :]
    vals = (
        (1 - fu) * (1 - fv) * C[I, J]
        + fu * (1 - fv) * C[I + 1, J]
        + (1 - fu) * fv * C[I, J + 1]
        + fu * fv * C[I + 1, J + 1]
    )
    return CoherenceMap(tau_s_axis, tau_i_axis, vals)


class SlownessReport(NamedTuple):
    """Margin m = 1 - min |Gamma|/Gamma(0,0) over |tau| <= sigma, plus the
    direct gradient criterion max(sigma |grad Psi| / |Psi|) over cells with
    |Psi| above 1% of peak."""

    margin: float
    gradient_ratio: float


def slowness_margin(psi_si: ComplexGrid2D, sigma: float) -> SlownessReport:
    """Quantifies how 'slow' a waveshape is on the kernel scale.

    m << 1 means the state is effectively constant over the response time
    and will be processed distributively by the gate.
    """
    cmap = gamma22(psi_si, half_window=sigma, spacing=sigma / 4)
    g0 = abs(cmap.at_zero())
    margin = 1.0 - float(np.abs(cmap.values).min()) / g0

    vals = psi_si.values
    mag = np.abs(vals)
    peak = mag.max()
    d_eta = np.gradient(vals, psi_si.eta_axis.spacing, axis=0)
    d_nu = np.gradient(vals, psi_si.nu_axis.spacing, axis=1)
    grad = np.sqrt(np.abs(d_eta) ** 2 + np.abs(d_nu) ** 2)
    mask = mag > 0.01 * peak
    ratio = float((sigma * grad[mask] / mag[mask]).max()) if mask.any() else 0.0
    return SlownessReport(margin=margin, gradient_ratio=ratio)


class CoherenceTime(NamedTuple):
    value: float
    capped: bool  # True when the half-maximum lies outside the map window


def coherence_time_T4(cmap: CoherenceMap) -> CoherenceTime:
    """Half-width at half maximum of |Gamma| along the diagonal tau_s = tau_i.

    The diagonal distance is measured in tau units (so the HWHM of a width-
    tau_g Gaussian product state is 1.1774 tau_g).  Linear interpolation
    between diagonal samples; if |Gamma| never drops below half maximum
    inside the window the window bound is returned with capped=True.
    """
    if cmap.tau_s_axis != cmap.tau_i_axis:
        raise ValueError("diagonal width requires identical tau axes")
    diag = np.abs(np.diagonal(cmap.values))
    i0 = cmap.tau_s_axis.index_of(0.0)
    taus = cmap.tau_s_axis.points()
    half = diag[i0] / 2.0
    for i in range(i0, len(diag) - 1):
        if diag[i + 1] < half <= diag[i]:
            f = (diag[i] - half) / (diag[i] - diag[i + 1])
            return CoherenceTime(value=taus[i] + f * (taus[i + 1] - taus[i]), capped=False)
    return CoherenceTime(value=taus[-1], capped=True)


def front_position(increment: ComplexGrid2D) -> float:
    """Mass-weighted mean of (nu - eta) over |increment|^2.

    The coupling increment is localized to the conversion front, so this
    tracks the front locus as it sweeps through the waveshape.
    """
    return front_stats(increment)[0]


def front_stats(increment: ComplexGrid2D) -> tuple[float, float]:
    """(mean, std) of nu - eta weighted by |increment|^2."""
    w = np.abs(increment.values) ** 2
    mass = w.sum()
    if mass < 1e-300:
        raise ValueError("all-zero increment has no front position")
    diff = increment.nu_axis.points()[None, :] - increment.eta_axis.points()[:, None]
    mean = float((w * diff).sum() / mass)
    var = float((w * (diff - mean) ** 2).sum() / mass)
    return mean, math.sqrt(max(var, 0.0))


@dataclass(frozen=True)
class QuadrantReport:
    """Population and mean-phase decomposition over the four quadrants of
    the (eta, nu) plane split at the intensity centroid.

    Keys are (eta sign, nu sign).  `dominant_pair` holds the two keys of the
    larger diagonal pair ((+,+)/(-,-) or (+,-)/(-,+)); `phases` are the
    amplitude-weighted mean phases of those two quadrants.
    """

    populations: dict
    dominant_pair: tuple
    phases: tuple

    def pair_population(self) -> float:
        return sum(self.populations[k] for k in self.dominant_pair)

    def phase_difference(self) -> float:
        d = abs(self.phases[0] - self.phases[1])
        return min(d, 2 * math.pi - d)


def quadrant_populations(psi_si: ComplexGrid2D) -> QuadrantReport:
    vals = psi_si.values
    w = psi_si.quad_weights()
    dens = (vals.real**2 + vals.imag**2) * w
    total = dens.sum()
    if total < 1e-300:
        zero = {k: 0.0 for k in ((+1, +1), (+1, -1), (-1, +1), (-1, -1))}
        return QuadrantReport(zero, ((+1, +1), (-1, -1)), (0.0, 0.0))

    c_eta, c_nu = psi_si.centroid()

    def side_weights(points, center, spacing, sign):
        # Cells sitting exactly on the dividing line are shared half/half so
        # that an odd grid with a point at the centroid stays symmetric.
        on_line = np.abs(points - center) < 1e-9 * spacing
        matches = (points > center) if sign > 0 else (points < center)
        return np.where(on_line, 0.5, matches.astype(float))

    amp_weighted = vals * np.abs(vals) * w
    pops = {}
    moments = {}
    for se in (+1, -1):
        we = side_weights(psi_si.eta_axis.points(), c_eta,
                          psi_si.eta_axis.spacing, se)
        for sn in (+1, -1):
            wn = side_weights(psi_si.nu_axis.points(), c_nu,
                              psi_si.nu_axis.spacing, sn)
            cell = we[:, None] * wn[None, :]
            pops[(se, sn)] = float((dens * cell).sum())
            moments[(se, sn)] = complex((amp_weighted * cell).sum())

    diag = pops[(+1, +1)] + pops[(-1, -1)]
    anti = pops[(+1, -1)] + pops[(-1, +1)]
    pair = ((+1, +1), (-1, -1)) if diag >= anti else ((+1, -1), (-1, +1))
    phases = tuple(float(np.angle(moments[k])) for k in pair)
    return QuadrantReport(pops, pair, phases)
