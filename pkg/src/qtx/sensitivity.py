"""Monoenergetic transducer: electron counting, energy budget and the optimum.

With ``a = dl**2 / 2`` and ``b = dp**2/(2 M**2 w**2) + k_B theta e/(M w Q I)``
the effective displacement is ``a/N + b N``; its minimum ``2 sqrt(a b)`` sits
at ``N = sqrt(a/b)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError
from .model import E_CHARGE, K_B, OscillatorParams


@dataclass(frozen=True)
class SensitivityResult:
    xi_opt_sq: float
    thermal_ratio: float
    at_quantum_limit: bool
    N_opt: Optional[float] = None
    dt_opt: Optional[float] = None


def _positive(**kw):
    for k, v in kw.items():
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"{k} must be finite and > 0 (got {v!r})")


def incident_count(I: float, dt: float) -> float:
    _positive(I=I, dt=dt)
    return I * dt / E_CHARGE


def energy_increase(N: float, delta_l: float, delta_p: float, osc: OscillatorParams, dt: float) -> float:
    """Energy pumped into the oscillator during ``dt``: back-action + shot noise + bath."""
    _positive(N=N, dt=dt)
    momentum = N * delta_p ** 2 / (2.0 * osc.M)
    position = 0.5 * osc.M * osc.omega ** 2 * delta_l ** 2 / N
    thermal = K_B * osc.theta_over_Q * osc.omega * dt
    return momentum + position + thermal


def _coefficients(delta_l, delta_p, osc, I):
    a = 0.5 * delta_l ** 2
    b = (delta_p ** 2 / (2.0 * osc.M ** 2 * osc.omega ** 2)
         + K_B * osc.theta_over_Q * E_CHARGE / (osc.M * osc.omega * I))
    return a, b


def effective_displacement_sq(N: float, delta_l: float, delta_p: float, osc: OscillatorParams, I: float) -> float:
    _positive(N=N, I=I)
    a, b = _coefficients(delta_l, delta_p, osc, I)
    return a / N + b * N


def optimal_sensitivity(delta_l: float, delta_p: float, osc: OscillatorParams, I: float,
                        threshold: float = 0.1) -> SensitivityResult:
    _positive(delta_l=delta_l, delta_p=delta_p, I=I)
    ratio = 2.0 * K_B * osc.theta_over_Q * osc.M * osc.omega * E_CHARGE / (delta_p ** 2 * I)
    xi = delta_l * delta_p / (osc.M * osc.omega) * math.sqrt(1.0 + ratio)
    a, b = _coefficients(delta_l, delta_p, osc, I)
    return SensitivityResult(xi_opt_sq=xi, thermal_ratio=ratio, at_quantum_limit=ratio < threshold,
                             N_opt=math.sqrt(a / b))


def quantum_limit_parameter(osc: OscillatorParams, delta_pT_sq: float, I_T: float) -> float:
    """Thermal-to-back-action ratio written with the tunnelling current."""
    _positive(delta_pT_sq=delta_pT_sq, I_T=I_T)
    return 2.0 * K_B * osc.theta_over_Q * osc.M * osc.omega * E_CHARGE / (delta_pT_sq * I_T)
