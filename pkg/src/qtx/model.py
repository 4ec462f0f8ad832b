"""Physical constants, device description and the piecewise-constant profile.

Everything here is in SI units. Conversions from the human-readable config
units (eV, Angstrom, ...) happen in :mod:`qtx.config`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from scipy import constants as _sc

from .errors import ConfigError


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = _sc.hbar
    m_e: float = _sc.m_e
    e: float = _sc.e
    k_B: float = _sc.k


CONST = PhysicalConstants()

HBAR = CONST.hbar
M_E = CONST.m_e
E_CHARGE = CONST.e
K_B = CONST.k_B

EV = E_CHARGE  # J per eV
ANGSTROM = 1e-10  # m


def _require(cond, message):
    if not cond:
        raise ConfigError(message)


@dataclass(frozen=True)
class DeviceGeometry:
    """Widths of the vacuum gap, the well and the second (solid) barrier.

    ``well_w == barrier2_w == 0`` is the single-barrier transducer.
    """

    gap_l: float
    well_w: float = 0.0
    barrier2_w: float = 0.0

    def __post_init__(self):
        _require(math.isfinite(self.gap_l) and self.gap_l > 0,
                 f"geometry invariant violated: gap_l must be > 0 (got {self.gap_l!r})")
        _require(math.isfinite(self.well_w) and self.well_w >= 0,
                 f"geometry invariant violated: well_w must be >= 0 (got {self.well_w!r})")
        _require(math.isfinite(self.barrier2_w) and self.barrier2_w >= 0,
                 f"geometry invariant violated: barrier2_w must be >= 0 (got {self.barrier2_w!r})")

    @property
    def is_single_barrier(self) -> bool:
        return self.barrier2_w == 0.0

    def single(self) -> "DeviceGeometry":
        """Same tip gap with the well and second barrier removed."""
        return DeviceGeometry(self.gap_l, 0.0, 0.0)


@dataclass(frozen=True)
class MaterialParams:
    V0: float
    V1: float
    mass_ratio: float

    def __post_init__(self):
        _require(math.isfinite(self.V0) and self.V0 > 0,
                 f"materials invariant violated: V0 must be > 0 (got {self.V0!r})")
        _require(math.isfinite(self.V1) and self.V1 >= 0,
                 f"materials invariant violated: V1 must be >= 0 (got {self.V1!r})")
        _require(math.isfinite(self.mass_ratio) and 0 < self.mass_ratio <= 1,
                 f"materials invariant violated: 0 < mass_ratio <= 1 (got {self.mass_ratio!r})")

    @property
    def mass(self) -> float:
        return self.mass_ratio * M_E


@dataclass(frozen=True)
class PotentialProfile:
    """Ordered finite regions between two zero-potential semi-infinite leads.

    ``regions`` is a tuple of ``(width, potential)`` pairs, widths in metres
    and potentials in joules. The first region is always the vacuum gap.
    """

    regions: tuple
    mass: float
    lead_potential: float = 0.0

    def __post_init__(self):
        if self.lead_potential != 0.0:
            raise ConfigError("lead potential must be 0 on both sides")
        if self.mass <= 0:
            raise ConfigError("effective mass must be > 0")
        for w, _ in self.regions:
            if not w > 0:
                raise ConfigError(f"region widths must be > 0 (got {w!r})")

    @property
    def widths(self):
        return tuple(w for w, _ in self.regions)

    @property
    def potentials(self):
        return tuple(v for _, v in self.regions)

    @property
    def length(self) -> float:
        return sum(self.widths)

    @property
    def gap(self) -> float:
        return self.regions[0][0]

    @property
    def is_double_barrier(self) -> bool:
        # barrier | zero-potential well | barrier
        return (len(self.regions) == 3 and self.regions[1][1] == 0.0
                and self.regions[0][1] > 0 and self.regions[2][1] > 0)

    def with_gap(self, gap: float) -> "PotentialProfile":
        """Profile with only the vacuum-gap width changed (tip displacement)."""
        if not gap > 0:
            raise ConfigError(f"gap width must stay > 0 (got {gap!r})")
        return replace(self, regions=((gap, self.regions[0][1]),) + tuple(self.regions[1:]))

    def reversed(self) -> "PotentialProfile":
        return replace(self, regions=tuple(reversed(self.regions)))


def build_profile(geometry: DeviceGeometry, materials: MaterialParams) -> PotentialProfile:
    """Lay out ``lead | gap(V0) | well(0) | barrier2(V1) | lead``.

    Zero-width regions are dropped. A well that is not closed by a second
    barrier merges into the right lead, so the result is a plain single
    barrier.
    """
    if not geometry.gap_l > 0:
        raise ConfigError("geometry invariant violated: gap_l must be > 0")
    if geometry.well_w < 0 or geometry.barrier2_w < 0:
        raise ConfigError("geometry invariant violated: widths must be >= 0")
    regions = [(geometry.gap_l, materials.V0)]
    if geometry.barrier2_w > 0:
        if geometry.well_w > 0:
            regions.append((geometry.well_w, 0.0))
        regions.append((geometry.barrier2_w, materials.V1))
    return PotentialProfile(tuple(regions), materials.mass)


@dataclass(frozen=True)
class OscillatorParams:
    """Test mass modelled as a damped harmonic oscillator in a thermal bath."""

    M: float
    omega: float
    Q: float
    theta: float = 0.0

    def __post_init__(self):
        for name in ("M", "omega", "Q"):
            v = getattr(self, name)
            _require(math.isfinite(v) and v > 0,
                     f"oscillator invariant violated: {name} must be > 0 (got {v!r})")
        _require(math.isfinite(self.theta) and self.theta >= 0,
                 f"oscillator invariant violated: theta must be >= 0 (got {self.theta!r})")

    @property
    def theta_over_Q(self) -> float:
        return self.theta / self.Q

    def with_theta_over_Q(self, ratio: float) -> "OscillatorParams":
        return replace(self, theta=ratio * self.Q)


@dataclass(frozen=True)
class DriveParams:
    """How electrons are supplied to the junction.

    ``monoenergetic``: incident current ``I`` at energy ``E``.
    ``biased``: Fermi sea with Fermi energy ``E_F``, transverse area ``S``,
    electron temperature ``theta_e`` and bias voltage ``Phi``.
    """

    mode: str
    I: Optional[float] = None
    E: Optional[float] = None
    E_F: Optional[float] = None
    S: Optional[float] = None
    theta_e: Optional[float] = None
    Phi: Optional[float] = None

    _MONO = ("I", "E")
    _BIASED = ("E_F", "S", "theta_e", "Phi")

    def __post_init__(self):
        if self.mode == "monoenergetic":
            need, other = self._MONO, self._BIASED
        elif self.mode == "biased":
            need, other = self._BIASED, self._MONO
        else:
            raise ConfigError(f"drive invariant violated: mode must be 'monoenergetic' or 'biased' (got {self.mode!r})")
        for name in need:
            v = getattr(self, name)
            _require(v is not None, f"drive invariant violated: {name} required for mode {self.mode}")
            if name == "Phi":
                _require(math.isfinite(v) and v >= 0, f"drive invariant violated: Phi must be >= 0 (got {v!r})")
            else:
                _require(math.isfinite(v) and v > 0, f"drive invariant violated: {name} must be > 0 (got {v!r})")
        for name in other:
            _require(getattr(self, name) is None,
                     f"drive invariant violated: {name} not allowed for mode {self.mode}")


@dataclass(frozen=True)
class NumericsConfig:
    deriv_step: float = 1e-3 * ANGSTROM
    energy_grid_points: int = 20000
    quadrature_rel_tol: float = 1e-7
    energy_cutoff: Optional[float] = None  # None: E_F + e*Phi + cutoff_thermal_widths*k_B*theta_e
    resonance_refine_tol: float = 1e-10 * EV
    scan_min: float = 0.01 * EV
    scan_max: float = 0.99 * EV
    resonance_panels: int = 8
    resonance_window_fwhm: float = 5.0
    cutoff_thermal_widths: float = 40.0
    quantum_limit_threshold: float = 0.1
    max_panels: int = 20000

    def __post_init__(self):
        _require(self.deriv_step > 0, "numerics invariant violated: deriv_step must be > 0")
        _require(self.energy_grid_points >= 3, "numerics invariant violated: energy_grid_points must be >= 3")
        for name in ("quadrature_rel_tol", "resonance_refine_tol", "resonance_window_fwhm",
                     "cutoff_thermal_widths", "quantum_limit_threshold"):
            _require(getattr(self, name) > 0, f"numerics invariant violated: {name} must be > 0")
        _require(self.resonance_panels >= 1, "numerics invariant violated: resonance_panels must be >= 1")
        _require(0 < self.scan_min < self.scan_max, "numerics invariant violated: 0 < scan_min < scan_max")
        _require(self.energy_cutoff is None or self.energy_cutoff > 0,
                 "numerics invariant violated: energy_cutoff must be > 0")

    def check_against(self, geometry: DeviceGeometry):
        _require(self.deriv_step < geometry.gap_l / 100,
                 "numerics invariant violated: deriv_step must be < gap_l / 100")
