"""Biased operation: Fermi supply function and energy-integrated noise.

Energies passed to :func:`supply_density` are longitudinal energies in the
tip, measured from the tip band edge. The bias shifts the test-mass bands
rigidly by ``e*Phi`` (the whole drop sits across the vacuum gap, whose tilt
is neglected), so a tip electron at ``E'`` meets the barrier structure at
``E = E' + e*Phi``. The integrals below run over that structure energy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .decoherence import total_transmission
from .errors import DomainError
from .model import E_CHARGE, HBAR, K_B, NumericsConfig, OscillatorParams, PotentialProfile
from .noise import transmission_and_slope
from .quadrature import integrate
from .scattering import Resonance, find_peaks
from .sensitivity import SensitivityResult


@dataclass(frozen=True)
class SupplyParams:
    E_F: float
    Phi: float
    theta_e: float
    S: float
    m: float

    @property
    def prefactor(self) -> float:
        """``m S k_B theta_e / (2 pi^2 hbar^3)``, per J per s after dividing out e*dt."""
        return self.m * self.S * K_B * self.theta_e / (2.0 * math.pi ** 2 * HBAR ** 3)


def supply_density(E, params: SupplyParams):
    """Incident electrons per unit energy per unit time at tip energy ``E``."""
    E = np.asarray(E, dtype=float)
    if np.any(E < 0):
        raise DomainError("supply density needs E >= 0")
    if not (params.theta_e > 0 and params.S > 0):
        raise DomainError("theta_e and S must be > 0")
    kT = K_B * params.theta_e
    x1 = (params.E_F - E) / kT
    x2 = (params.E_F - E - E_CHARGE * params.Phi) / kT
    out = params.prefactor * (np.logaddexp(0.0, x1) - np.logaddexp(0.0, x2))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SupplySpectrum:
    energies: np.ndarray
    density_rate: np.ndarray
    params: SupplyParams


def supply_spectrum(energies, params: SupplyParams) -> SupplySpectrum:
    energies = np.asarray(energies, dtype=float)
    return SupplySpectrum(energies, np.asarray(supply_density(energies, params)), params)


@dataclass(frozen=True)
class BiasedNoiseIntegrals:
    """``dlambda^2 = A/dt`` and ``dpi^2 = B*dt``; ``I_T`` the tunnelling current."""

    A: float
    B: float
    I_T: float
    product_over_hbar: float
    I_incident: float = float("nan")
    rel_error: float = 0.0

    def delta_lambda_sq(self, dt: float) -> float:
        return self.A / dt

    def delta_pi_sq(self, dt: float) -> float:
        return self.B * dt


def _resonance_breaks(resonances: Sequence[Resonance], lo, hi, numerics: NumericsConfig):
    pts = []
    for res in resonances:
        half = numerics.resonance_window_fwhm * res.fwhm
        a, b = max(lo, res.E_res - half), min(hi, res.E_res + half)
        if b > a:
            pts.extend(np.linspace(a, b, numerics.resonance_panels + 1))
    return pts


def noise_integrals(profile: PotentialProfile, gamma: float, density, lo: float, hi: float,
                    numerics: NumericsConfig = NumericsConfig(),
                    breakpoints: Sequence[float] = (),
                    resonances: Sequence[Resonance] = ()) -> BiasedNoiseIntegrals:
    """Integrate an arbitrary incident density ``density(E)`` (1/(J s)) over ``[lo, hi]``."""
    V0 = profile.regions[0][1]
    m = profile.mass
    if not 0 < lo < hi < V0:
        raise DomainError("integration window must satisfy 0 < lo < hi < V0")

    def integrand(E):
        n = density(E)
        T, dT = transmission_and_slope(profile, E, numerics, gamma)
        return np.stack([n * T * (1.0 - T), n * np.abs(dT), n * T * 2.0 * m * (V0 - E), n * T, n])

    pts = [lo, hi] + [p for p in breakpoints if lo < p < hi]
    pts += _resonance_breaks(resonances, lo, hi, numerics)
    vals, errs = integrate(integrand, pts, rtol=numerics.quadrature_rel_tol,
                           max_panels=numerics.max_panels, initial_split=4)
    shot, slope, kick, trans, incident = vals
    if not (slope > 0 and trans > 0):
        raise DomainError("no transmitted electrons in the integration window")
    A = shot / slope ** 2
    B = kick
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = float(np.nanmax(np.where(vals != 0, errs / np.abs(vals), 0.0)))
    return BiasedNoiseIntegrals(A=A, B=B, I_T=E_CHARGE * trans, product_over_hbar=math.sqrt(A * B) / HBAR,
                                I_incident=E_CHARGE * incident, rel_error=rel)


def transmission_peaks(profile: PotentialProfile, gamma: float, numerics: NumericsConfig):
    """Peaks of the (possibly damped) transmission inside the numerics scan window."""
    tops = [v for v in profile.potentials if v > 0]
    hi = min([numerics.scan_max] + [0.999999 * v for v in tops])
    return find_peaks(lambda E: total_transmission(profile, E, gamma), numerics.scan_min, hi, numerics)


def integration_window(params: SupplyParams, numerics: NumericsConfig):
    shift = E_CHARGE * params.Phi
    if numerics.energy_cutoff is not None:
        hi = numerics.energy_cutoff
    else:
        hi = params.E_F + shift + numerics.cutoff_thermal_widths * K_B * params.theta_e
    return shift, hi


def biased_integrals(profile: PotentialProfile, gamma: float, params: SupplyParams,
                     numerics: NumericsConfig = NumericsConfig(),
                     resonances: Optional[Sequence[Resonance]] = None) -> BiasedNoiseIntegrals:
    """Noise integrals and tunnelling current for a Fermi sea at bias ``params.Phi``.

    ``resonances`` (structure-frame energies) get forced panels; computed
    from ``profile`` and ``gamma`` when not supplied.
    """
    if not params.Phi > 0:
        raise DomainError("biased integrals need Phi > 0 (no current at zero bias)")
    if resonances is None:
        resonances = transmission_peaks(profile, gamma, numerics)
    shift, hi = integration_window(params, numerics)
    lo = shift
    kT = K_B * params.theta_e
    edges = []
    for edge in (params.E_F, params.E_F - shift):  # tip-frame Fermi edges of the supply
        if edge > 0:
            edges.extend(edge + shift + d * kT for d in (-3.0, 0.0, 3.0))
    density = lambda E: supply_density(np.maximum(E - shift, 0.0), params)
    return noise_integrals(profile, gamma, density, lo, hi, numerics, edges, resonances)


def optimal_sensitivity_biased(integrals: BiasedNoiseIntegrals, osc: OscillatorParams,
                               threshold: float = 0.1) -> SensitivityResult:
    """Optimum over the sampling time ``dt`` of ``A/(2dt) + dt*(B/(2M^2w^2) + k theta/(M w Q))``."""
    A, B = integrals.A, integrals.B
    if not (A > 0 and B > 0):
        raise DomainError("integrals must be positive")
    M, w = osc.M, osc.omega
    thermal = K_B * osc.theta_over_Q / (M * w)
    ratio = 2.0 * K_B * osc.theta_over_Q * M * w / B
    xi = math.sqrt(A * B) / (M * w) * math.sqrt(1.0 + ratio)
    dt_opt = math.sqrt((0.5 * A) / (B / (2.0 * M ** 2 * w ** 2) + thermal))
    return SensitivityResult(xi_opt_sq=xi, thermal_ratio=ratio, at_quantum_limit=ratio < threshold, dt_opt=dt_opt)


def effective_displacement_sq_biased(dt: float, integrals: BiasedNoiseIntegrals, osc: OscillatorParams) -> float:
    if not dt > 0:
        raise DomainError("dt must be > 0")
    M, w = osc.M, osc.omega
    return (integrals.A / (2.0 * dt)
            + dt * (integrals.B / (2.0 * M ** 2 * w ** 2) + K_B * osc.theta_over_Q / (M * w)))
