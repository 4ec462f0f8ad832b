"""Tabular datasets behind the CLI commands.

Each builder returns a :class:`Dataset` whose rows are ordered by the sweep
variable. ``nan`` marks a value that is undefined at that row (for example
``dl`` where ``T`` is 0 or 1); the CSV writer turns it into an empty field.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .config import Scenario
from .decoherence import gamma_from_tau, resolve_gamma, total_transmission
from .errors import DomainError, NumericalError
from .fermi import SupplyParams, biased_integrals, optimal_sensitivity_biased, transmission_peaks
from .model import E_CHARGE, EV, HBAR, PotentialProfile, build_profile
from .noise import transmission_and_slope
from .scattering import (Resonance, barrier_smatrix, escape_time, find_resonances,
                         split_double_barrier)
from .sensitivity import optimal_sensitivity

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepSpec:
    variable: str  # "energy" (J) or "bias" (V)
    min: float
    max: float
    points: int

    def __post_init__(self):
        if self.variable not in ("energy", "bias"):
            raise ValueError(f"unknown sweep variable {self.variable!r}")
        if not self.min < self.max:
            raise DomainError("sweep needs min < max")
        if self.points < 2:
            raise DomainError("sweep needs points >= 2")

    def grid(self, extra: Sequence[float] = ()) -> np.ndarray:
        """Uniform grid of exactly ``points`` nodes with ``extra`` abscissae snapped in.

        Each extra value inside the range replaces the nearest interior node
        not already taken; endpoints are never moved, so an extra value with
        no free interior node is dropped.
        """
        pts = np.linspace(self.min, self.max, self.points)
        taken = set()
        for x in sorted(set(extra)):
            if not self.min < x < self.max:
                continue
            free = [i for i in range(1, self.points - 1) if i not in taken]
            if not free:
                break
            i = min(free, key=lambda j: abs(pts[j] - x))
            pts[i] = x
            taken.add(i)
        return np.sort(pts)


@dataclass
class Dataset:
    columns: List[str]
    rows: List[tuple]

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow(["" if not math.isfinite(v) else f"{v:.8e}" for v in row])
        return buf.getvalue()


def thetaq_suffix(ratio: float) -> str:
    return f"_tq{ratio:g}K"


@dataclass(frozen=True)
class Devices:
    """The configured device, its single-barrier reference and the resolved gamma."""

    single: PotentialProfile
    double: Optional[PotentialProfile]
    gamma: float
    resonances: tuple

    @property
    def damped(self) -> bool:
        return self.double is not None and self.gamma < 1.0


def profile_resonances(profile: PotentialProfile, numerics) -> List[Resonance]:
    if not profile.is_double_barrier:
        return []
    top = min(v for v in profile.potentials if v > 0)
    hi = min(numerics.scan_max, top * (1 - 1e-6))
    return find_resonances(profile, numerics.scan_min, hi, numerics)


def devices(s: Scenario) -> Devices:
    full = build_profile(s.geometry, s.materials)
    single = build_profile(s.geometry.single(), s.materials)
    if not full.is_double_barrier:
        return Devices(single, None, 1.0, ())
    res = tuple(profile_resonances(full, s.numerics))
    E_ref = res[0].E_res if res else None
    gamma = resolve_gamma(s.decoherence, full, E_ref=E_ref)
    return Devices(single, full, gamma, res)


def _pointwise(func, E):
    """Vectorized ``func`` over ``E``, falling back to per-point with nan on domain errors."""
    try:
        return np.asarray(func(E), dtype=float)
    except DomainError:
        out = np.full(E.shape, np.nan)
        for i, e in enumerate(E):
            try:
                out[i] = func(e)
            except DomainError:
                pass
        return out


def energy_spec(s: Scenario, points=None, rng=None) -> SweepSpec:
    lo, hi = (rng[0] * EV, rng[1] * EV) if rng else s.sweep.energy_range
    return SweepSpec("energy", lo, hi, points or s.sweep.points)


def bias_spec(s: Scenario, points=None, rng=None) -> SweepSpec:
    lo, hi = rng if rng else s.sweep.bias_range
    return SweepSpec("bias", lo, hi, points or s.sweep.points)


def transmission_dataset(s: Scenario, spec: SweepSpec) -> Dataset:
    d = devices(s)
    E = spec.grid([r.E_res for r in d.resonances])
    cols = [E / EV, _pointwise(lambda e: total_transmission(d.single, e), E)]
    names = ["E_eV", "T_single"]
    if d.double is not None:
        names.append("T_double_coherent")
        cols.append(_pointwise(lambda e: total_transmission(d.double, e), E))
        if d.damped:
            names.append("T_double_gamma")
            cols.append(_pointwise(lambda e: total_transmission(d.double, e, d.gamma), E))
    return Dataset(names, list(zip(*(c.tolist() for c in cols))))


def _noise_arrays(profile, E, numerics, gamma=1.0):
    """``(T, dl, dp)`` arrays; nan wherever the single-electron figures are undefined."""
    T = np.full(E.shape, np.nan)
    dT = np.full(E.shape, np.nan)
    for i, e in enumerate(E):  # per point so a degenerate energy only blanks its own row
        try:
            T[i], dT[i] = transmission_and_slope(profile, e, numerics, gamma)
        except DomainError:
            pass
    V0 = profile.regions[0][1]
    ok_l = (T > 0) & (T < 1) & (dT != 0)
    ok_p = (E < V0) & np.isfinite(T)
    with np.errstate(invalid="ignore", divide="ignore"):
        dl = np.where(ok_l, np.sqrt(T * (1 - T)) / np.abs(dT), np.nan)
        dp = np.where(ok_p, np.sqrt(np.clip(T, 0, 1) * 2.0 * profile.mass * (V0 - E)), np.nan)
    return T, dl, dp


def _noise_arrays_fast(profile, E, numerics, gamma=1.0):
    try:
        T, dT = transmission_and_slope(profile, E, numerics, gamma)
    except DomainError:
        return _noise_arrays(profile, E, numerics, gamma)
    V0 = profile.regions[0][1]
    ok_l = (T > 0) & (T < 1) & (dT != 0)
    ok_p = E < V0
    with np.errstate(invalid="ignore", divide="ignore"):
        dl = np.where(ok_l, np.sqrt(T * (1 - T)) / np.abs(dT), np.nan)
        dp = np.where(ok_p, np.sqrt(T * 2.0 * profile.mass * (V0 - E)), np.nan)
    return T, dl, dp


def noise_dataset(s: Scenario, spec: SweepSpec) -> Dataset:
    d = devices(s)
    E = spec.grid([r.E_res for r in d.resonances])
    groups = [("single", d.single, 1.0)]
    if d.double is not None:
        groups.append(("double", d.double, 1.0))
        if d.damped:
            groups.append(("double_gamma", d.double, d.gamma))
    names, cols = ["E_eV"], [E / EV]
    parts = {tag: _noise_arrays_fast(prof, E, s.numerics, g) for tag, prof, g in groups}
    # coherent columns first, the damped triple appended after them
    for block in ([g for g in groups if g[0] != "double_gamma"], [g for g in groups if g[0] == "double_gamma"]):
        for tag, _, _ in block:
            names.append(f"dl_{tag}_m")
            cols.append(parts[tag][1])
        for tag, _, _ in block:
            names.append(f"dp_{tag}")
            cols.append(parts[tag][2])
        for tag, _, _ in block:
            names.append(f"product_{tag}_hbar")
            cols.append(parts[tag][1] * parts[tag][2] / HBAR)
    return Dataset(names, list(zip(*(c.tolist() for c in cols))))


def _xi_column(dl, dp, osc, I, threshold, want_n):
    xi = np.full(dl.shape, np.nan)
    n = np.full(dl.shape, np.nan)
    for i in range(dl.size):
        if np.isfinite(dl[i]) and np.isfinite(dp[i]) and dp[i] > 0:
            r = optimal_sensitivity(dl[i], dp[i], osc, I, threshold)
            xi[i], n[i] = r.xi_opt_sq, r.N_opt
    return xi, (n if want_n else None)


def sensitivity_dataset(s: Scenario, spec: SweepSpec, n_opt: bool = False) -> Dataset:
    if s.drive.mode != "monoenergetic":
        raise DomainError("sensitivity sweep needs a monoenergetic drive (drive.I_A)")
    d = devices(s)
    E = spec.grid([r.E_res for r in d.resonances])
    groups = [("single", d.single, 1.0)]
    if d.double is not None:
        groups.append(("double_coh", d.double, 1.0))
        if d.damped:
            groups.append(("double_gamma", d.double, d.gamma))
    noise = {tag: _noise_arrays_fast(p, E, s.numerics, g) for tag, p, g in groups}
    names, cols = ["E_eV"], [E / EV]
    thr = s.numerics.quantum_limit_threshold
    for ratio in s.sweep.theta_over_Q:
        osc = s.oscillator.with_theta_over_Q(ratio)
        sfx = thetaq_suffix(ratio)
        extra_names, extra_cols = [], []
        for tag, _, _ in groups:
            _, dl, dp = noise[tag]
            xi, n = _xi_column(dl, dp, osc, s.drive.I, thr, n_opt)
            names.append(f"xi2_{tag}_m2{sfx}")
            cols.append(xi)
            if n_opt:
                extra_names.append(f"N_opt_{tag}{sfx}")
                extra_cols.append(n)
        names += extra_names
        cols += extra_cols
    return Dataset(names, list(zip(*(c.tolist() for c in cols))))


def supply_params(s: Scenario, Phi: float, profile: PotentialProfile) -> SupplyParams:
    if s.drive.mode != "biased":
        raise DomainError("bias sweep needs a biased drive (drive.EF_eV, S_m2, Phi_V)")
    return SupplyParams(E_F=s.drive.E_F, Phi=Phi, theta_e=s.drive.theta_e, S=s.drive.S, m=profile.mass)


def alignment_biases(s: Scenario, resonances) -> List[float]:
    """Biases where a resonance meets the tip band bottom or the tip Fermi level."""
    out = []
    for r in resonances:
        out += [r.E_res / E_CHARGE, (r.E_res - s.drive.E_F) / E_CHARGE]
    return out


def bias_dataset(s: Scenario, spec: SweepSpec) -> Dataset:
    d = devices(s)
    if s.drive.mode != "biased":
        raise DomainError("bias sweep needs a biased drive (drive.EF_eV, S_m2, Phi_V)")
    Phi = spec.grid(alignment_biases(s, d.resonances))
    groups = [("single", d.single, 1.0, [])]
    if d.double is not None:
        res_coh = list(d.resonances)
        groups.append(("double_coh", d.double, 1.0, res_coh))
        if d.damped:
            groups.append(("double_gamma", d.double, d.gamma,
                           transmission_peaks(d.double, d.gamma, s.numerics)))
    ratios = s.sweep.theta_over_Q
    thr = s.numerics.quantum_limit_threshold
    names = ["Phi_V"]
    it_names = {"single": "IT_single_A", "double_coh": "IT_double_A", "double_gamma": "IT_double_gamma_A"}
    names += [it_names[g[0]] for g in groups]
    for ratio in ratios:
        names += [f"xi2_{g[0]}_m2{thetaq_suffix(ratio)}" for g in groups]
    names += [f"product_{g[0]}_hbar" for g in groups]
    rows = []
    skipped = 0
    for phi in Phi:
        it = {}
        xi = {}
        prod = {}
        try:
            for tag, prof, g, res in groups:
                if phi <= 0:
                    it[tag], prod[tag] = 0.0, math.nan
                    for ratio in ratios:
                        xi[tag, ratio] = math.nan
                    continue
                ints = biased_integrals(prof, g, supply_params(s, phi, prof), s.numerics, res)
                it[tag], prod[tag] = ints.I_T, ints.product_over_hbar
                for ratio in ratios:
                    r = optimal_sensitivity_biased(ints, s.oscillator.with_theta_over_Q(ratio), thr)
                    xi[tag, ratio] = r.xi_opt_sq
        except NumericalError as exc:
            log.warning("bias %.6g V skipped: %s", phi, exc)
            skipped += 1
            continue
        except DomainError as exc:
            log.warning("bias %.6g V has no defined figures: %s", phi, exc)
            it = {g[0]: it.get(g[0], math.nan) for g in groups}
            prod = {g[0]: math.nan for g in groups}
            xi = {(g[0], r): math.nan for g in groups for r in ratios}
        row = [float(phi)] + [it[g[0]] for g in groups]
        for ratio in ratios:
            row += [xi[g[0], ratio] for g in groups]
        row += [prod[g[0]] for g in groups]
        rows.append(tuple(row))
    if skipped and skipped == np.count_nonzero(Phi > 0):
        raise NumericalError(f"all {skipped} biased points failed; see the per-point messages above")
    return Dataset(names, rows)


RESONANCE_COLUMNS = ["E_res_eV", "fwhm_eV", "T_peak", "T1", "T2", "T_formula", "tau_esc_s"]


def resonance_dataset(s: Scenario) -> Dataset:
    """One row per coherent resonance of the configured double barrier (empty for a single barrier)."""
    d = devices(s)
    names = list(RESONANCE_COLUMNS)
    with_gamma = s.decoherence.tau_i is not None
    if with_gamma:
        names.append("gamma_from_tau")
    if d.double is None:
        return Dataset(names, [])
    (w1, v1), ww, (w2, v2) = split_double_barrier(d.double)
    m = d.double.mass
    rows = []
    for r in d.resonances:
        T1 = barrier_smatrix(w1, v1, m, r.E_res).T
        T2 = barrier_smatrix(w2, v2, m, r.E_res).T
        row = [r.E_res / EV, r.fwhm / EV, r.T_peak, T1, T2, 4 * T1 * T2 / (T1 + T2) ** 2,
               escape_time(d.double, r)]
        if with_gamma:
            E_ref = s.decoherence.E_ref if s.decoherence.E_ref is not None else r.E_res
            try:
                row.append(gamma_from_tau(s.decoherence.tau_i, ww, E_ref, m))
            except DomainError:
                row.append(math.nan)
        rows.append(tuple(row))
    return Dataset(names, rows)
