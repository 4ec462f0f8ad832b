"""Single-electron noise figures: shot-noise position uncertainty and momentum kick."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .decoherence import total_transmission
from .errors import DomainError
from .model import HBAR, NumericsConfig, PotentialProfile
from .scattering import transmission_derivative

DEGENERATE_T = 0.99


def position_uncertainty(T, dTdl):
    """``sqrt(T (1 - T)) / |dT/dl|`` for a single incident electron."""
    T = np.asarray(T, dtype=float)
    dTdl = np.asarray(dTdl, dtype=float)
    if np.any((T <= 0) | (T >= 1)):
        raise DomainError("position uncertainty undefined for T in {0, 1}")
    if np.any(dTdl == 0):
        raise DomainError("insensitive operating point: dT/dl = 0")
    out = np.sqrt(T * (1.0 - T)) / np.abs(dTdl)
    return float(out) if out.ndim == 0 else out


def momentum_kick(E, V0, m, T):
    """Momentum spread imparted per incident electron, ``sqrt(T * 2m(V0 - E))``.

    Each tunnelling electron carries ``hbar*kappa`` across the gap; it does so
    with probability ``T``.
    """
    E = np.asarray(E, dtype=float)
    T = np.asarray(T, dtype=float)
    if np.any(E >= V0):
        raise DomainError("momentum kick model needs E < V0 (evanescent gap)")
    if np.any((T < 0) | (T > 1)):
        raise DomainError("transmission must lie in [0, 1]")
    out = np.sqrt(T * 2.0 * m * (V0 - E))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class NoiseFigures:
    E: float
    T: float
    dTdl: float
    delta_l: float
    delta_p: float
    product_over_hbar: float
    delta_pT_sq: float
    degenerate: bool = False  # T > 0.99: uncertainty formulas unreliable


def transmission_and_slope(profile: PotentialProfile, E, numerics: NumericsConfig, gamma: float = 1.0):
    """``T_tot`` and its gap derivative, both vectorized over ``E``."""
    T_func = lambda p, e: total_transmission(p, e, gamma)
    T = T_func(profile, E)
    dT = transmission_derivative(profile, E, numerics.deriv_step, T_func)
    return T, dT


def noise_figures(profile: PotentialProfile, E: float, numerics: NumericsConfig = NumericsConfig(),
                  gamma: float = 1.0) -> NoiseFigures:
    T, dT = transmission_and_slope(profile, E, numerics, gamma)
    degenerate = T > DEGENERATE_T
    if degenerate:
        warnings.warn(f"T = {T:.4f} > {DEGENERATE_T}: noise figures degenerate", RuntimeWarning, stacklevel=2)
    V0 = profile.regions[0][1]
    dl = position_uncertainty(T, dT)
    dp = momentum_kick(E, V0, profile.mass, T)
    return NoiseFigures(
        E=float(E), T=float(T), dTdl=float(dT), delta_l=dl, delta_p=dp,
        product_over_hbar=dl * dp / HBAR, delta_pT_sq=dp * dp / T, degenerate=bool(degenerate),
    )
