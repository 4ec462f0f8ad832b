"""Scenario documents (YAML) <-> validated SI parameter bundles.

Config units: eV, Angstrom, K, A, V, m^2, kg, rad/s, s. Unknown keys are
rejected so a typo never silently falls back to a default.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .decoherence import DecoherenceConfig
from .errors import ConfigError
from .model import (ANGSTROM, EV, DeviceGeometry, DriveParams, MaterialParams, NumericsConfig,
                    OscillatorParams)

PRESETS = ("figure2", "figure3", "figure4")

# section -> key -> (required, scale to SI); scale None means "not a float"
SCHEMA = {
    "geometry": {"gap_A": (True, ANGSTROM), "well_A": (False, ANGSTROM), "barrier2_A": (False, ANGSTROM)},
    "materials": {"V0_eV": (True, EV), "V1_eV": (False, EV), "mass_ratio": (True, 1.0)},
    "oscillator": {"M_kg": (True, 1.0), "omega_rad_s": (True, 1.0), "Q": (True, 1.0), "theta_K": (False, 1.0)},
    "drive": {"mode": (True, None), "I_A": (False, 1.0), "E_eV": (False, EV), "EF_eV": (False, EV),
              "S_m2": (False, 1.0), "theta_e_K": (False, 1.0), "Phi_V": (False, 1.0)},
    "decoherence": {"gamma": (False, 1.0), "tau_i_s": (False, 1.0), "E_ref_eV": (False, EV)},
    "numerics": {"deriv_step_A": (False, ANGSTROM), "energy_grid_points": (False, None),
                 "quadrature_rel_tol": (False, 1.0), "energy_cutoff_eV": (False, EV),
                 "resonance_refine_tol_eV": (False, EV), "scan_eV": (False, None),
                 "resonance_panels": (False, None), "resonance_window_fwhm": (False, 1.0),
                 "cutoff_thermal_widths": (False, 1.0), "quantum_limit_threshold": (False, 1.0),
                 "max_panels": (False, None)},
    "sweep": {"energy_eV": (False, None), "bias_V": (False, None), "points": (False, None),
              "theta_over_Q_K": (False, None)},
}
REQUIRED_SECTIONS = ("geometry", "materials", "oscillator", "drive")
EXCLUSIVE = {("decoherence", "gamma"): ("decoherence", "tau_i_s"),
             ("decoherence", "tau_i_s"): ("decoherence", "gamma")}

DEFAULT_THETA_E_K = 4.2


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads exponent-only floats such as ``1e-9``."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
    |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
    |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
    |[-+]?\.(?:inf|Inf|INF)
    |\.(?:nan|NaN|NAN))$""", re.X),
    list("-+0123456789."))


@dataclass(frozen=True)
class SweepConfig:
    energy_range: tuple = (0.01 * EV, 0.99 * EV)
    bias_range: tuple = (0.0, 1.0)
    points: int = 400
    theta_over_Q: tuple = (0.0,)

    def __post_init__(self):
        for name, (lo, hi) in (("energy_eV", self.energy_range), ("bias_V", self.bias_range)):
            if not lo < hi:
                raise ConfigError(f"sweep invariant violated: {name} needs min < max")
        if self.points < 2:
            raise ConfigError("sweep invariant violated: points must be >= 2")
        if any(r < 0 for r in self.theta_over_Q):
            raise ConfigError("sweep invariant violated: theta_over_Q_K values must be >= 0")


@dataclass(frozen=True)
class Scenario:
    geometry: DeviceGeometry
    materials: MaterialParams
    oscillator: OscillatorParams
    drive: DriveParams
    numerics: NumericsConfig
    decoherence: DecoherenceConfig
    sweep: SweepConfig = field(default_factory=SweepConfig)

    def __iter__(self):
        # unpacks as the six-part parameter bundle
        return iter((self.geometry, self.materials, self.oscillator, self.drive,
                     self.numerics, self.decoherence))


def _key_lines(text):
    """Map ``(section, key)`` to the 1-based line where the key appears."""
    lines = {}
    try:
        root = yaml.compose(text, Loader=_Loader)
    except yaml.YAMLError:
        return lines
    if not isinstance(root, yaml.MappingNode):
        return lines
    for knode, vnode in root.value:
        lines[(knode.value,)] = knode.start_mark.line + 1
        if isinstance(vnode, yaml.MappingNode):
            for k2, _ in vnode.value:
                lines[(knode.value, k2.value)] = k2.start_mark.line + 1
    return lines


def parse_document(text: str) -> dict:
    try:
        doc = yaml.load(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError(f"parse error{where}: {problem}") from None
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("parse error: top level must be a mapping of sections")
    return doc


def _num(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise ConfigError(f"{where}: value must be finite")
    return v


def _int(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    return value


def _pair(value, where, scale=1.0):
    if not (isinstance(value, (list, tuple)) and len(value) == 2):
        raise ConfigError(f"{where}: expected [min, max]")
    return tuple(_num(v, where) * scale for v in value)


def validate_document(doc: dict, lines=None) -> Scenario:
    lines = lines or {}

    def at(*path):
        ln = lines.get(tuple(path))
        return ".".join(path) + (f" (line {ln})" if ln else "")

    for sec in doc:
        if sec not in SCHEMA:
            raise ConfigError(f"unknown section {at(sec)}; allowed: {', '.join(SCHEMA)}")
    for sec in REQUIRED_SECTIONS:
        if sec not in doc:
            raise ConfigError(f"missing required section '{sec}'")
    si = {}
    for sec, keys in SCHEMA.items():
        body = doc.get(sec) or {}
        if not isinstance(body, dict):
            raise ConfigError(f"{at(sec)}: section must be a mapping")
        for key in body:
            if key not in keys:
                raise ConfigError(f"unknown key {at(sec, key)}; allowed: {', '.join(keys)}")
        for key, (required, scale) in keys.items():
            if key not in body or body[key] is None:
                if required:
                    raise ConfigError(f"{sec}.{key}: required key missing")
                continue
            if scale is not None:
                si[(sec, key)] = _num(body[key], at(sec, key)) * scale
            else:
                si[(sec, key)] = body[key]

    g = lambda sec, key, default=None: si.get((sec, key), default)
    try:
        geometry = DeviceGeometry(g("geometry", "gap_A"), g("geometry", "well_A", 0.0),
                                  g("geometry", "barrier2_A", 0.0))
        materials = MaterialParams(g("materials", "V0_eV"), g("materials", "V1_eV", 0.0),
                                   g("materials", "mass_ratio"))
        oscillator = OscillatorParams(g("oscillator", "M_kg"), g("oscillator", "omega_rad_s"),
                                      g("oscillator", "Q"), g("oscillator", "theta_K", 0.0))
        mode = g("drive", "mode")
        if mode == "monoenergetic":
            drive = DriveParams(mode, I=g("drive", "I_A"), E=g("drive", "E_eV"),
                                E_F=g("drive", "EF_eV"), S=g("drive", "S_m2"),
                                theta_e=g("drive", "theta_e_K"), Phi=g("drive", "Phi_V"))
        else:
            drive = DriveParams(mode, I=g("drive", "I_A"), E=g("drive", "E_eV"),
                                E_F=g("drive", "EF_eV"), S=g("drive", "S_m2"),
                                theta_e=g("drive", "theta_e_K", DEFAULT_THETA_E_K), Phi=g("drive", "Phi_V"))
        decoherence = DecoherenceConfig(gamma=g("decoherence", "gamma"), tau_i=g("decoherence", "tau_i_s"),
                                        E_ref=g("decoherence", "E_ref_eV"))
        nk = {}
        for key, attr in (("deriv_step_A", "deriv_step"), ("quadrature_rel_tol", "quadrature_rel_tol"),
                          ("energy_cutoff_eV", "energy_cutoff"),
                          ("resonance_refine_tol_eV", "resonance_refine_tol"),
                          ("resonance_window_fwhm", "resonance_window_fwhm"),
                          ("cutoff_thermal_widths", "cutoff_thermal_widths"),
                          ("quantum_limit_threshold", "quantum_limit_threshold")):
            if ("numerics", key) in si:
                nk[attr] = si[("numerics", key)]
        for key in ("energy_grid_points", "resonance_panels", "max_panels"):
            if ("numerics", key) in si:
                nk[key] = _int(si[("numerics", key)], at("numerics", key))
        if ("numerics", "scan_eV") in si:
            nk["scan_min"], nk["scan_max"] = _pair(si[("numerics", "scan_eV")], at("numerics", "scan_eV"), EV)
        numerics = NumericsConfig(**nk)
        numerics.check_against(geometry)
        sk = {}
        if ("sweep", "energy_eV") in si:
            sk["energy_range"] = _pair(si[("sweep", "energy_eV")], at("sweep", "energy_eV"), EV)
        if ("sweep", "bias_V") in si:
            sk["bias_range"] = _pair(si[("sweep", "bias_V")], at("sweep", "bias_V"))
        if ("sweep", "points") in si:
            sk["points"] = _int(si[("sweep", "points")], at("sweep", "points"))
        if ("sweep", "theta_over_Q_K") in si:
            raw = si[("sweep", "theta_over_Q_K")]
            raw = raw if isinstance(raw, list) else [raw]
            sk["theta_over_Q"] = tuple(_num(v, at("sweep", "theta_over_Q_K")) for v in raw)
        else:
            sk["theta_over_Q"] = (oscillator.theta_over_Q,)
        sweep = SweepConfig(**sk)
    except TypeError as exc:  # missing required field inside a dataclass
        raise ConfigError(str(exc)) from None
    return Scenario(geometry, materials, oscillator, drive, numerics, decoherence, sweep)


def load_config(text: str) -> Scenario:
    """Parse and validate a scenario document."""
    return validate_document(parse_document(text), _key_lines(text))


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    return resources.files("qtx").joinpath("presets", f"{name}.yaml").read_text()


def read_source(source: str) -> str:
    """Text of a config file path, or of a preset when ``source`` names one."""
    path = Path(source)
    if path.is_file():
        return path.read_text()
    if source in PRESETS:
        return preset_text(source)
    raise ConfigError(f"config file not found and not a preset: {source!r}")


def apply_overrides(doc: dict, assignments) -> dict:
    """Apply ``section.key=value`` strings; values are parsed as YAML scalars/lists."""
    doc = {k: dict(v) if isinstance(v, dict) else v for k, v in doc.items()}
    for item in assignments:
        if "=" not in item:
            raise ConfigError(f"override {item!r} must look like section.key=value")
        path, raw = item.split("=", 1)
        parts = path.strip().split(".")
        if len(parts) != 2:
            raise ConfigError(f"override key {path!r} must be section.key")
        sec, key = parts
        if sec not in SCHEMA or key not in SCHEMA[sec]:
            raise ConfigError(f"unknown key {path!r} in override")
        try:
            value = yaml.load(raw, Loader=_Loader)
        except yaml.YAMLError:
            raise ConfigError(f"cannot parse override value {raw!r}") from None
        body = doc.setdefault(sec, {})
        if not isinstance(body, dict):
            raise ConfigError(f"section {sec} must be a mapping")
        other = EXCLUSIVE.get((sec, key))
        if other is not None:
            body.pop(other[1], None)
        body[key] = value
    return doc


def load_scenario(source: str, overrides=()) -> Scenario:
    text = read_source(source)
    if not overrides:
        return load_config(text)
    return validate_document(apply_overrides(parse_document(text), overrides))


def scenario_to_document(s: Scenario) -> dict:
    """Inverse of :func:`load_config`, back to config units."""
    doc = {
        "geometry": {"gap_A": s.geometry.gap_l / ANGSTROM, "well_A": s.geometry.well_w / ANGSTROM,
                     "barrier2_A": s.geometry.barrier2_w / ANGSTROM},
        "materials": {"V0_eV": s.materials.V0 / EV, "V1_eV": s.materials.V1 / EV,
                      "mass_ratio": s.materials.mass_ratio},
        "oscillator": {"M_kg": s.oscillator.M, "omega_rad_s": s.oscillator.omega, "Q": s.oscillator.Q,
                       "theta_K": s.oscillator.theta},
    }
    d = s.drive
    if d.mode == "monoenergetic":
        doc["drive"] = {"mode": d.mode, "I_A": d.I, "E_eV": d.E / EV}
    else:
        doc["drive"] = {"mode": d.mode, "EF_eV": d.E_F / EV, "S_m2": d.S, "theta_e_K": d.theta_e, "Phi_V": d.Phi}
    dec = s.decoherence
    doc["decoherence"] = {"gamma": dec.gamma} if dec.tau_i is None else {"tau_i_s": dec.tau_i}
    if dec.E_ref is not None:
        doc["decoherence"]["E_ref_eV"] = dec.E_ref / EV
    n = s.numerics
    doc["numerics"] = {
        "deriv_step_A": n.deriv_step / ANGSTROM, "energy_grid_points": n.energy_grid_points,
        "quadrature_rel_tol": n.quadrature_rel_tol,
        "resonance_refine_tol_eV": n.resonance_refine_tol / EV,
        "scan_eV": [n.scan_min / EV, n.scan_max / EV], "resonance_panels": n.resonance_panels,
        "resonance_window_fwhm": n.resonance_window_fwhm, "cutoff_thermal_widths": n.cutoff_thermal_widths,
        "quantum_limit_threshold": n.quantum_limit_threshold, "max_panels": n.max_panels,
    }
    if n.energy_cutoff is not None:
        doc["numerics"]["energy_cutoff_eV"] = n.energy_cutoff / EV
    w = s.sweep
    doc["sweep"] = {"energy_eV": [w.energy_range[0] / EV, w.energy_range[1] / EV],
                    "bias_V": list(w.bias_range), "points": w.points,
                    "theta_over_Q_K": list(w.theta_over_Q)}
    return doc
