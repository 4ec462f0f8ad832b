"""Stationary 1D scattering off piecewise-constant potentials.

Amplitudes in region ``j`` are referenced to that region's left edge::

    psi_j(x) = a_j exp(i k_j (x - x_j)) + b_j exp(-i k_j (x - x_j))

The left lead is referenced to the first interface (x = 0) and the right
lead to the last one (x = L), so ``t`` and ``r`` of a lone barrier are its
S-matrix elements at its physical edges.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import List

import numpy as np
from scipy.optimize import bisect

from .errors import DegenerateEnergyError, DomainError, StructureError
from .model import HBAR, NumericsConfig, PotentialProfile
from .optimize import golden_section_max


def wavevector(E, V, m):
    """Complex wavenumber ``sqrt(2m(E-V))/hbar``.

    Real and positive above ``V``; positive imaginary (decay constant
    ``kappa = |k|``) below. Exactly zero at ``E == V``.
    """
    E = np.asarray(E, dtype=float)
    if np.any(E <= 0):
        raise DomainError("energy must be > 0")
    if m <= 0:
        raise DomainError("mass must be > 0")
    d = 2.0 * m * (E - V)
    k = np.where(d >= 0, np.sqrt(np.abs(d)) + 0j, 1j * np.sqrt(np.abs(d))) / HBAR
    return k[()] if k.ndim == 0 else k


def _check_energies(profile: PotentialProfile, E):
    E = np.atleast_1d(np.asarray(E, dtype=float))
    if np.any(~np.isfinite(E)) or np.any(E <= 0):
        raise DomainError("energy must be finite and > 0")
    for v in set(profile.potentials) | {profile.lead_potential}:
        if np.any(E == v):
            raise DegenerateEnergyError(
                f"energy coincides with a region potential ({v!r} J); "
                "perturb E by one part in 1e9")
    return E


def _transfer(profile: PotentialProfile, E):
    """Accumulate the 2x2 transfer matrix; returns elements and per-region k.

    (a_R, b_R) = M (a_L, b_L). All elements are arrays over ``E``.
    """
    V = (profile.lead_potential,) + profile.potentials + (profile.lead_potential,)
    w = (0.0,) + profile.widths
    ks = [wavevector(E, v, profile.mass) * np.ones_like(E) for v in V]
    m00 = np.ones(E.shape, dtype=complex)
    m01 = np.zeros(E.shape, dtype=complex)
    m10 = np.zeros(E.shape, dtype=complex)
    m11 = np.ones(E.shape, dtype=complex)
    for j in range(len(V) - 1):
        k, kn = ks[j], ks[j + 1]
        s = k / kn
        p = np.exp(1j * k * w[j])
        q = np.exp(-1j * k * w[j])
        a00 = 0.5 * (1 + s) * p
        a01 = 0.5 * (1 - s) * q
        a10 = 0.5 * (1 - s) * p
        a11 = 0.5 * (1 + s) * q
        m00, m01, m10, m11 = (a00 * m00 + a01 * m10, a00 * m01 + a01 * m11,
                              a10 * m00 + a11 * m10, a10 * m01 + a11 * m11)
    return (m00, m01, m10, m11), ks


def amplitudes(profile: PotentialProfile, E):
    """Left-incidence ``(t, r)`` and right-incidence ``(t_rev, r_rev)``, vectorized."""
    E = _check_energies(profile, E)
    (m00, m01, m10, m11), _ = _transfer(profile, E)
    # det M = k_L / k_R = 1 for equal leads, so t = 1/M11; the textbook
    # M00 + M01 r loses ~all digits to cancellation in thick barriers
    r = -m10 / m11
    t = 1.0 / m11
    t_rev = t
    r_rev = m01 / m11
    return t, r, t_rev, r_rev


def transmission(profile: PotentialProfile, E):
    """Coherent transmission probability; array in, array out."""
    scalar = np.ndim(E) == 0
    t, _, _, _ = amplitudes(profile, E)
    T = np.abs(t) ** 2
    return float(T[0]) if scalar else T


@dataclass(frozen=True)
class ScatteringSolution:
    E: float
    T: float
    R: float
    t: complex
    r: complex
    region_amplitudes: tuple  # (a_j, b_j) for lead, regions..., lead
    wavevectors: tuple
    edges: tuple  # left edge x_j of every finite region and of the right lead

    def psi(self, x):
        """Reconstruct the wavefunction at positions ``x`` (metres)."""
        x = np.asarray(x, dtype=float)
        bounds = (0.0,) + self.edges
        idx = np.searchsorted(np.asarray(bounds), x, side="right")
        out = np.empty(x.shape, dtype=complex)
        for j, (a, b) in enumerate(self.region_amplitudes):
            sel = idx == j
            if not np.any(sel):
                continue
            x0 = 0.0 if j == 0 else bounds[j - 1]
            k = self.wavevectors[j]
            d = x[sel] - x0
            out[sel] = a * np.exp(1j * k * d) + b * np.exp(-1j * k * d)
        return out


def solve(profile: PotentialProfile, E: float) -> ScatteringSolution:
    """Full solution for unit amplitude incident from the left."""
    Ea = _check_energies(profile, E)
    if Ea.size != 1:
        raise DomainError("solve() takes a single energy; use transmission() for arrays")
    (m00, m01, m10, m11), ks = _transfer(profile, Ea)
    r = complex((-m10 / m11)[0])
    t = complex((1.0 / m11)[0])
    ks = [complex(k[0]) for k in ks]
    w = (0.0,) + profile.widths
    coeffs = [(1.0 + 0j, r)]
    a, b = coeffs[0]
    for j in range(len(ks) - 1):
        k, kn = ks[j], ks[j + 1]
        A = a * np.exp(1j * k * w[j])
        B = b * np.exp(-1j * k * w[j])
        s = k / kn
        a, b = 0.5 * ((1 + s) * A + (1 - s) * B), 0.5 * ((1 - s) * A + (1 + s) * B)
        coeffs.append((complex(a), complex(b)))
    # the last pair is the right lead: (t, ~0)
    coeffs[-1] = (t, 0j)
    edges = tuple(np.cumsum(profile.widths).tolist())
    T = abs(t) ** 2
    R = abs(r) ** 2
    return ScatteringSolution(float(Ea[0]), T, R, t, r, tuple(coeffs), tuple(ks), edges)


def transmission_derivative(profile: PotentialProfile, E, h: float, T_func=None):
    """Central difference of T with respect to the vacuum-gap width.

    Only the first region is stretched; well and second barrier stay put.
    ``T_func(profile, E)`` defaults to the coherent :func:`transmission`.
    """
    if not h > 0:
        raise DomainError("derivative step must be > 0")
    l = profile.gap
    if not l - h > 0:
        raise DomainError("gap_l - h must stay > 0")
    T_func = T_func or transmission
    Tp = T_func(profile.with_gap(l + h), E)
    Tm = T_func(profile.with_gap(l - h), E)
    return (Tp - Tm) / (2.0 * h)


@dataclass(frozen=True)
class BarrierSMatrix:
    E: float
    t: complex
    r: complex
    t_rev: complex
    r_rev: complex

    @property
    def T(self) -> float:
        return abs(self.t) ** 2


def barrier_smatrix(width: float, height: float, m: float, E) -> BarrierSMatrix:
    """S-matrix of one rectangular barrier, referenced to its edges.

    With an array ``E`` the fields are arrays.
    """
    if not width > 0:
        raise DomainError("barrier width must be > 0")
    prof = PotentialProfile(((width, height),), m)
    t, r, t_rev, r_rev = amplitudes(prof, E)
    if np.ndim(E) == 0:
        return BarrierSMatrix(float(E), complex(t[0]), complex(r[0]), complex(t_rev[0]), complex(r_rev[0]))
    return BarrierSMatrix(np.asarray(E, dtype=float), t, r, t_rev, r_rev)


def split_double_barrier(profile: PotentialProfile):
    """``((w1, V1), well_w, (w2, V2))`` of a double-barrier profile."""
    if not profile.is_double_barrier:
        raise StructureError("operation needs a double-barrier profile (barrier | well | barrier)")
    (w1, v1), (ww, _), (w2, v2) = profile.regions
    return (w1, v1), ww, (w2, v2)


@dataclass(frozen=True)
class Resonance:
    E_res: float
    T_peak: float
    fwhm: float


def _half_max_edge(func, E_peak, half, grid, step_sign, tol):
    """Walk the grid away from the peak until T < half, then bisect."""
    idx = np.searchsorted(grid, E_peak)
    j = idx if step_sign > 0 else idx - 1
    while 0 <= j < grid.size:
        if func(grid[j]) < half:
            a, b = sorted((E_peak, grid[j]))
            return bisect(lambda x: func(x) - half, a, b, xtol=tol, maxiter=500)
        j += step_sign
    return None


def find_peaks(func, E_min: float, E_max: float, numerics: NumericsConfig) -> List[Resonance]:
    """Grid scan + golden-section refinement + half-maximum bisection.

    ``func`` must accept arrays. Local maxima without a half-maximum
    crossing on both sides inside ``[E_min, E_max]`` are discarded; this
    filters round-off ripples in flat anti-resonance valleys.
    """
    if not 0 < E_min < E_max:
        raise DomainError("need 0 < E_min < E_max")
    grid = np.linspace(E_min, E_max, numerics.energy_grid_points)
    Tg = np.asarray(func(grid))
    cand = np.flatnonzero((Tg[1:-1] > Tg[:-2]) & (Tg[1:-1] >= Tg[2:])) + 1
    spacing = grid[1] - grid[0]
    tol = numerics.resonance_refine_tol
    scalar = lambda x: float(np.asarray(func(np.array([x])))[0])
    out = []
    for i in cand:
        E_pk, T_pk = golden_section_max(scalar, grid[i - 1], grid[i + 1], tol)
        half = 0.5 * T_pk
        left = _half_max_edge(scalar, E_pk, half, grid, -1, tol)
        right = _half_max_edge(scalar, E_pk, half, grid, +1, tol)
        if left is None or right is None:
            continue
        # a peak narrower than the grid can hide neighbours between samples
        if abs(E_pk - grid[i]) > spacing or right - left < 2 * spacing:
            warnings.warn("grid too coarse: resonance narrower than two grid spacings "
                          "or refined more than one spacing away", RuntimeWarning, stacklevel=2)
        out.append(Resonance(float(E_pk), float(T_pk), float(right - left)))
    out.sort(key=lambda r: r.E_res)
    # a broad peak can be reached from two neighbouring grid maxima
    merged = []
    for res in out:
        if merged and abs(res.E_res - merged[-1].E_res) < 0.5 * merged[-1].fwhm:
            if res.T_peak > merged[-1].T_peak:
                merged[-1] = res
            continue
        merged.append(res)
    return merged


def find_resonances(profile: PotentialProfile, E_min: float, E_max: float,
                    numerics: NumericsConfig = NumericsConfig()) -> List[Resonance]:
    """Transmission resonances of ``profile`` sorted by energy.

    Sub-barrier only: ``E_max`` must lie below every region potential.
    """
    tops = [v for v in profile.potentials if v > 0]
    if tops and not E_max < min(tops):
        raise DomainError("resonance scan must stay below the lowest barrier top")
    return find_peaks(lambda E: transmission(profile, E), E_min, E_max, numerics)


def escape_time(profile: PotentialProfile, res: Resonance) -> float:
    """Quasi-bound lifetime ``[2 w / v] * 2 / (T1 + T2)`` at ``res.E_res``."""
    (w1, v1), ww, (w2, v2) = split_double_barrier(profile)
    m = profile.mass
    T1 = barrier_smatrix(w1, v1, m, res.E_res).T
    T2 = barrier_smatrix(w2, v2, m, res.E_res).T
    v = math.sqrt(2.0 * res.E_res / m)
    return (2.0 * ww / v) * 2.0 / (T1 + T2)
