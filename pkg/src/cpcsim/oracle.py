"""Analytic and low-dimensional reductions used for calibration and checks.

The conversion experienced by one small patch of the two-photon amplitude is
a harmonic oscillator whose frequency is gated by the front coupling factor
K(xi):

    d^2 psi / d xi^2 + (gamma^2 / sigma) K(xi - xi0) psi = 0

A perfect sign gate is exactly half an oscillation: psi runs from +1 to -1
with zero slope at both ends.  Three coupling estimates with increasing
faithfulness are provided:

  gamma_wkb       closed-form WKB seed (total phase pi through K)
  calibrate_gamma_oscillator   residual-minimizing shooting on the oscillator
  refine_gamma_full     golden-section scan of the full 2D simulation

The oscillator equation drops order-one geometric factors of the full
dynamics, so the full-simulation value differs from the oscillator value by
a constant factor; both ship in the default configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .grids import Axis


@dataclass
class OscillatorTrajectory:
    """Solution samples of the gated-oscillator equation."""

    xi_axis: Axis
    delta_psi: np.ndarray
    delta_psi_prime: np.ndarray
    gamma: float
    sigma: float


def _default_coupling(sigma: float):
    def K(xi):
        return np.exp(-(np.asarray(xi, dtype=float) ** 2) / (4.0 * sigma**2))

    return K


def solve_gated_oscillator(
    gamma: float,
    sigma: float,
    xi_span: tuple[float, float] | None = None,
    n_steps: int = 4000,
    coupling=None,
) -> OscillatorTrajectory:
    """Integrate the gated oscillator with RK4 from psi=1, psi'=0 at the left edge.

    ``coupling`` overrides the Gaussian K (test hook, e.g. K = 1 for the
    constant-frequency oscillator).  The span must extend well past the
    region where K is non-negligible.
    """
    if xi_span is None:
        xi_span = (-10.0 * sigma, 10.0 * sigma)
    lo, hi = xi_span
    if hi - lo < 16.0 * sigma:
        raise ValueError(
            f"xi span {xi_span} too small; need >= 8 sigma on both sides"
        )
    K = coupling if coupling is not None else _default_coupling(sigma)
    h = (hi - lo) / n_steps
    rate2 = gamma**2 / sigma

    def rhs(xi, y):
        # y = (psi, psi'); psi'' = -rate2 * K(xi) * psi
        return np.array([y[1], -rate2 * K(xi) * y[0]], dtype=complex)

    y = np.array([1.0, 0.0], dtype=complex)
    psi = np.empty(n_steps + 1, dtype=complex)
    dpsi = np.empty(n_steps + 1, dtype=complex)
    psi[0], dpsi[0] = y
    xi = lo
    for n in range(n_steps):
        k1 = rhs(xi, y)
        k2 = rhs(xi + h / 2, y + h / 2 * k1)
        k3 = rhs(xi + h / 2, y + h / 2 * k2)
        k4 = rhs(xi + h, y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        xi = lo + (n + 1) * h
        psi[n + 1], dpsi[n + 1] = y
    return OscillatorTrajectory(
        xi_axis=Axis(start=lo, spacing=h, count=n_steps + 1),
        delta_psi=psi,
        delta_psi_prime=dpsi,
        gamma=gamma,
        sigma=sigma,
    )


def gamma_wkb(sigma: float) -> float:
    """WKB seed: total oscillator phase pi through the Gaussian coupling window.

    integral of gamma sqrt(K/sigma) dxi = (gamma/sqrt(sigma)) * 2 sigma sqrt(2 pi)
    = pi  =>  gamma = pi / (2 sqrt(2 pi sigma)).
    """
    return math.pi / (2.0 * math.sqrt(2.0 * math.pi * sigma))


def half_flip_residual(traj: OscillatorTrajectory) -> float:
    """How far the trajectory endpoint is from a perfect sign flip."""
    end = traj.delta_psi[-1]
    slope = traj.delta_psi_prime[-1]
    return float(abs(end + 1.0) ** 2 + traj.sigma * abs(slope) ** 2)


def calibrate_gamma_oscillator(sigma: float) -> tuple[float, float]:
    """Coupling that makes the gated oscillator perform exactly half a cycle.

    Returns (gamma_star, residual).  Bracketed 1D minimization of the
    endpoint residual, seeded by the WKB value.
    """
    seed = gamma_wkb(sigma)

    def objective(gamma):
        return half_flip_residual(solve_gated_oscillator(gamma, sigma))

    # The residual is multimodal in gamma (one valley per extra half
    # oscillation), so bracket the global valley with a coarse scan before
    # handing over to the local minimizer.
    scan = np.linspace(0.25 * seed, 4.0 * seed, 61)
    values = [objective(g) for g in scan]
    i = int(np.argmin(values))
    lo = scan[max(i - 1, 0)]
    hi = scan[min(i + 1, len(scan) - 1)]
    result = optimize.minimize_scalar(
        objective, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10}
    )
    if not result.success:
        raise RuntimeError(f"gamma bracket search failed: {result.message}")
    return float(result.x), float(result.fun)


def rabi_closed_form(gamma_eff: float, z: float) -> tuple[complex, complex]:
    """Two-level conversion cycle: (cos(g z), -i sin(g z)).

    |c_si|^2 + |c_a|^2 = 1 exactly; g z = pi is one full cycle and the sign
    flip, g z = pi/2 full conversion to the ancilla.
    """
    return (
        complex(math.cos(gamma_eff * z)),
        complex(0.0, -math.sin(gamma_eff * z)),
    )


def local_rabi_rate(gamma: float, sigma: float) -> float:
    """Peak conversion rate seen by one grid point of the full simulation.

    The Gaussian kernel quadratures concentrate the coupling into an
    effective oscillator with peak frequency gamma / sqrt(2 sqrt(pi) sigma)
    (per unit z); used to bound the phase advanced per integrator step.
    """
    return gamma / math.sqrt(2.0 * math.sqrt(math.pi) * sigma)


def refine_gamma_full(base_config, bracket=None, xtol=1e-3):
    """Golden-section refinement of gamma against the full S1 simulation.

    Maximizes the final-distance fidelity of an S1 run under ``base_config``
    (its gamma field is ignored).  Expensive: each probe is a full run.
    """
    from dataclasses import replace

    from .propagator import run
    from .waveshapes import build_preset

    if bracket is None:
        seed = calibrate_gamma_oscillator(base_config.kernel.sigma)[0]
        bracket = (1.5 * seed, 6.0 * seed)

    state = {}

    def objective(gamma):
        cfg = replace(base_config, gamma=float(gamma))
        inp = build_preset("S1", cfg.eta_axis, cfg.nu_axis)
        rec = run(inp, cfg)
        f = rec.fidelity_trace[-1]
        state[float(gamma)] = f
        return -f

    result = optimize.minimize_scalar(
        objective, bounds=bracket, method="bounded", options={"xatol": xtol}
    )
    return float(result.x), float(-result.fun), state
