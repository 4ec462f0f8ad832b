"""Partial loss of coherence in the well.

The damping factor ``gamma`` multiplies the wave amplitude by ``sqrt(gamma)``
on every traversal of the well, so one round trip keeps ``gamma**2`` of the
intensity. Flux removed from the coherent channel is re-emitted at the same
energy, forward with probability ``T2/(T1+T2)`` and backward with
``T1/(T1+T2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, DomainError, NumericalError, OverDampedError
from .model import PotentialProfile
from .scattering import BarrierSMatrix, barrier_smatrix, split_double_barrier, transmission, wavevector


@dataclass(frozen=True)
class DecoherenceConfig:
    """Either ``gamma`` directly or an inelastic time ``tau_i`` (seconds).

    With ``tau_i``, gamma is derived at ``E_ref`` (joules), defaulting to
    the lowest resonance of the configured double barrier.
    """

    gamma: Optional[float] = None
    tau_i: Optional[float] = None
    E_ref: Optional[float] = None

    def __post_init__(self):
        if self.gamma is None and self.tau_i is None:
            object.__setattr__(self, "gamma", 1.0)
        if self.gamma is not None and self.tau_i is not None:
            raise ConfigError("decoherence invariant violated: give exactly one of gamma or tau_i")
        if self.gamma is not None and not 0 < self.gamma <= 1:
            raise ConfigError(f"decoherence invariant violated: 0 < gamma <= 1 (got {self.gamma!r})")
        if self.tau_i is not None and not self.tau_i > 0:
            raise ConfigError(f"decoherence invariant violated: tau_i must be > 0 (got {self.tau_i!r})")
        if self.E_ref is not None and not self.E_ref > 0:
            raise ConfigError("decoherence invariant violated: E_ref must be > 0")


def round_trip_time(well_w: float, E_ref: float, m: float) -> float:
    return 2.0 * well_w / math.sqrt(2.0 * E_ref / m)


def gamma_from_tau(tau_i: float, well_w: float, E_ref: float, m: float) -> float:
    """``gamma = 1 - t_rt / (2 tau_i)``."""
    if not tau_i > 0:
        raise DomainError("tau_i must be > 0")
    if math.isinf(tau_i):
        return 1.0
    t_rt = round_trip_time(well_w, E_ref, m)
    if t_rt >= 2.0 * tau_i:
        raise OverDampedError(
            f"round-trip time {t_rt:.3e} s >= 2*tau_i = {2 * tau_i:.3e} s; gamma would be <= 0")
    return 1.0 - t_rt / (2.0 * tau_i)


def tau_from_gamma(gamma: float, well_w: float, E_ref: float, m: float) -> float:
    """Inverse of :func:`gamma_from_tau`."""
    if gamma == 1.0:
        raise DomainError("gamma = 1 corresponds to an infinite inelastic time")
    if not 0 < gamma < 1:
        raise DomainError("need 0 < gamma < 1")
    return round_trip_time(well_w, E_ref, m) / (2.0 * (1.0 - gamma))


@dataclass(frozen=True)
class CompositeTransmission:
    E: float
    T_coh: float
    R_coh: float
    P_abs: float
    T_seq: float
    R_seq: float
    T_tot: float
    R_tot: float


def composite_transmission(s1: BarrierSMatrix, s2: BarrierSMatrix, well_w: float,
                           E, m: float, gamma: float) -> CompositeTransmission:
    """Damped Fabry-Perot sum plus sequential re-emission.

    Works elementwise when the S-matrices and ``E`` are arrays.
    """
    if not 0 < gamma <= 1:
        raise DomainError("need 0 < gamma <= 1")
    if np.any(np.asarray(s1.E) != np.asarray(s2.E)) or np.any(np.asarray(s1.E) != np.asarray(E)):
        raise DomainError("S-matrices must be evaluated at the same energy")
    kw = wavevector(E, 0.0, m)
    ph = np.exp(1j * kw * well_w)
    ph2 = ph * ph
    den = 1.0 - s1.r_rev * s2.r * gamma * ph2
    if np.any(np.abs(den) < 1e-14):
        raise NumericalError("Fabry-Perot denominator vanished; corrupted S-matrix input")
    u = s1.t / den  # forward amplitude at the left edge of the well
    t_coh = u * s2.t * math.sqrt(gamma) * ph
    r_coh = s1.r + s1.t_rev * s2.r * gamma * ph2 * u
    T_coh = np.abs(t_coh) ** 2
    R_coh = np.abs(r_coh) ** 2
    T1 = np.abs(s1.t) ** 2
    T2 = np.abs(s2.t) ** 2
    # intensity lost on the forward pass and on the reflected backward pass;
    # 1 - T_coh - R_coh would cancel to noise when R_coh ~ 1
    P_abs = (1.0 - gamma) * np.abs(u) ** 2 * (1.0 + gamma * np.abs(s2.r) ** 2)
    T_seq = P_abs * T2 / (T1 + T2)
    R_seq = P_abs - T_seq
    T_tot = T_coh + T_seq
    R_tot = R_coh + R_seq
    if np.ndim(E) == 0:
        vals = [float(np.asarray(x)) for x in (T_coh, R_coh, P_abs, T_seq, R_seq, T_tot, R_tot)]
        return CompositeTransmission(float(E), *vals)
    return CompositeTransmission(np.asarray(E, dtype=float), T_coh, R_coh, P_abs, T_seq, R_seq, T_tot, R_tot)


def total_transmission(profile: PotentialProfile, E, gamma: float = 1.0):
    """Transmission counted by the collector: coherent plus sequential.

    Reduces to the coherent transfer-matrix result for ``gamma == 1`` or
    for any profile without a well.
    """
    if gamma == 1.0 or not profile.is_double_barrier:
        return transmission(profile, E)
    (w1, v1), ww, (w2, v2) = split_double_barrier(profile)
    m = profile.mass
    Ea = np.asarray(E, dtype=float)
    s1 = barrier_smatrix(w1, v1, m, Ea)
    s2 = barrier_smatrix(w2, v2, m, Ea)
    return composite_transmission(s1, s2, ww, Ea, m, gamma).T_tot


def resolve_gamma(cfg: DecoherenceConfig, profile: PotentialProfile, E_ref: Optional[float] = None) -> float:
    """Numeric gamma for ``profile``; ``E_ref`` overrides ``cfg.E_ref``."""
    if cfg.gamma is not None:
        return cfg.gamma
    if not profile.is_double_barrier:
        return 1.0
    E_ref = E_ref if E_ref is not None else cfg.E_ref
    if E_ref is None:
        raise DomainError("tau_i given without a reference energy; pass the lowest resonance")
    _, ww, _ = split_double_barrier(profile)
    return gamma_from_tau(cfg.tau_i, ww, E_ref, profile.mass)
