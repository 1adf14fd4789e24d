"""Laboratory-unit conversions for the conversion-gate model.

Maps measurable waveguide parameters (nonlinear index, pump intensity and
wavelength, effective area, group-velocity mismatch, pulse duration,
response time) to the dimensionless simulation parameters sigma/tau and
normalized gamma, and back.

Conventions: the interaction length z0 = tau / |beta1| sets the z unit; in
the normalized frame beta1 -> +-1 and gamma carries a factor tau^{3/2} /
beta1^2 that makes it dimensionless (the field rescalings Psi_a ->
Psi_a / sqrt(z0), Psi_si -> Psi_si / z0 are absorbed).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy.constants import c as C_LIGHT
from scipy.constants import hbar as HBAR

# FWHM of sech(t/tau)^2-intensity pulse = 2 arccosh(sqrt(2)) * tau.
FWHM_TO_SECH = 2.0 * math.acosh(math.sqrt(2.0))

DEFAULT_LAMBDA_P = 800e-9  # assumed pump wavelength (not a measured input)


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory inputs, SI units except where noted.

    n2 in cm^2/W and I_p in W/cm^2 (the customary nonlinear-optics units);
    both are converted to SI internally.  tau_fwhm is the intensity FWHM of
    the sech pulse; sigma_phys the nonlinear response time.
    """

    n2: float  # cm^2/W
    I_p: float  # W/cm^2
    S: float  # m^2
    beta1: float  # s/m
    tau_fwhm: float  # s
    sigma_phys: float  # s
    lambda_p: float = DEFAULT_LAMBDA_P  # m

    def __post_init__(self):
        for name in ("n2", "I_p", "S", "tau_fwhm", "sigma_phys", "lambda_p"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.beta1 == 0:
            raise ValueError("beta1 must be nonzero")

    @property
    def omega_p(self) -> float:
        return 2.0 * math.pi * C_LIGHT / self.lambda_p

    @property
    def tau_sech(self) -> float:
        """Sech width parameter tau from the intensity FWHM."""
        return self.tau_fwhm / FWHM_TO_SECH


def gamma_physical(p: PhysicalParams) -> float:
    """gamma = hbar omega_p^2 n2 Phi_p / (c S), Phi_p = sqrt(I_p / hbar omega_p).

    All quantities in SI; the result has units 1/(m sqrt(s)), matching the
    sqrt(photon-flux) normalization of the pump amplitude.
    """
    n2_si = p.n2 * 1e-4  # cm^2/W -> m^2/W
    ip_si = p.I_p * 1e4  # W/cm^2 -> W/m^2
    phi_p = math.sqrt(ip_si / (HBAR * p.omega_p))
    return HBAR * p.omega_p**2 * n2_si * phi_p / (C_LIGHT * p.S)


def z0_interaction_length(tau: float, beta1: float) -> float:
    """Distance over which the front crosses the pulse: z0 = tau / |beta1|."""
    if tau <= 0 or beta1 == 0:
        raise ValueError("tau must be positive and beta1 nonzero")
    return tau / abs(beta1)


@dataclass(frozen=True)
class NormalizedParams:
    """Dimensionless fragment of a simulation configuration."""

    sigma: float  # sigma_phys / tau
    gamma: float  # gamma_physical * tau^{3/2} / beta1^2
    z0: float  # meters per simulation z unit
    tau: float  # seconds per simulation time unit
    lambda_p_assumed: bool = False


def normalize(p: PhysicalParams, use_fwhm: bool = True) -> NormalizedParams:
    """Emit the dimensionless parameters driving the simulation.

    With use_fwhm=True tau_fwhm is converted to the sech parameter first;
    otherwise tau_fwhm is taken as the sech parameter directly (both
    readings of a stated pulse duration are plausible, so both are exposed).
    """
    tau = p.tau_sech if use_fwhm else p.tau_fwhm
    sigma = p.sigma_phys / tau
    if sigma > 0.5:
        warnings.warn(
            f"sigma/tau = {sigma:.3g} > 0.5: response kernel wider than the "
            "pulse, outside the slow-waveshape regime",
            stacklevel=2,
        )
    gamma_norm = gamma_physical(p) * tau**1.5 / p.beta1**2
    return NormalizedParams(
        sigma=sigma,
        gamma=gamma_norm,
        z0=z0_interaction_length(tau, p.beta1),
        tau=tau,
        lambda_p_assumed=(p.lambda_p == DEFAULT_LAMBDA_P),
    )


def denormalize(n: NormalizedParams, p_template: PhysicalParams) -> PhysicalParams:
    """Invert normalize() given the fields that normalization discards.

    The template supplies n2, S and lambda_p (which do not survive the
    normalization independently); tau, sigma_phys, beta1 and I_p are
    reconstructed from the dimensionless fragment.
    """
    tau = n.tau
    sigma_phys = n.sigma * tau
    beta1 = math.copysign(tau / n.z0, p_template.beta1)
    gamma_phys = n.gamma * beta1**2 / tau**1.5
    # invert gamma_physical for I_p
    n2_si = p_template.n2 * 1e-4
    omega_p = 2.0 * math.pi * C_LIGHT / p_template.lambda_p
    phi_p = gamma_phys * C_LIGHT * p_template.S / (HBAR * omega_p**2 * n2_si)
    ip_si = phi_p**2 * HBAR * omega_p
    return PhysicalParams(
        n2=p_template.n2,
        I_p=ip_si * 1e-4,
        S=p_template.S,
        beta1=beta1,
        tau_fwhm=tau * FWHM_TO_SECH,
        sigma_phys=sigma_phys,
        lambda_p=p_template.lambda_p,
    )
