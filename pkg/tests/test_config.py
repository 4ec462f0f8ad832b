import math

import pytest
import yaml
from hypothesis import given, settings, strategies as st

from qtx.config import (apply_overrides, load_config, load_scenario, preset_text,
                        scenario_to_document)
from qtx.errors import ConfigError
from qtx.model import EV, M_E

ANG = 1e-10


def test_figure2_preset_matches_caption(fig2):
    g, m, osc, drive, num, dec = fig2
    assert (g.gap_l, g.well_w, g.barrier2_w) == pytest.approx((20 * ANG, 50 * ANG, 20 * ANG))
    assert (m.V0, m.V1, m.mass_ratio) == pytest.approx((4 * EV, 1 * EV, 0.1))
    assert m.mass == pytest.approx(0.1 * M_E)
    assert dec.tau_i == 1e-13
    assert osc.M == 1e-10 and osc.omega == pytest.approx(2 * math.pi * 1e5)


def test_figure3_and_figure4_presets(fig3, fig4):
    assert fig3.drive.I == 1.0
    assert fig3.sweep.theta_over_Q == (0.0, 1e-5)
    assert fig3.decoherence.gamma == 0.95
    d = fig4.drive
    assert d.mode == "biased"
    assert (d.E_F, d.S, d.theta_e) == pytest.approx((0.02 * EV, 1e-9, 4.2))
    assert fig4.sweep.theta_over_Q == (0.0, 1e-5)


def _doc(**edits):
    doc = yaml.safe_load(preset_text("figure2"))
    for path, value in edits.items():
        sec, key = path.split("__")
        if value is None:
            doc[sec].pop(key)
        else:
            doc[sec][key] = value
    return yaml.safe_dump(doc)


def test_missing_v0_names_key():
    with pytest.raises(ConfigError, match="V0"):
        load_config(_doc(materials__V0_eV=None))


def test_negative_gap_names_geometry_invariant():
    with pytest.raises(ConfigError, match="geometry invariant violated: gap_l"):
        load_config(_doc(geometry__gap_A=-1.0))


def test_unknown_key_rejected_with_line():
    text = preset_text("figure2").replace("  V1_eV: 1.0", "  V1_eV: 1.0\n  V2_eV: 3.0")
    with pytest.raises(ConfigError, match=r"materials\.V2_eV \(line \d+\)"):
        load_config(text)


def test_unknown_section_rejected():
    with pytest.raises(ConfigError, match="unknown section"):
        load_config(preset_text("figure2") + "extras:\n  a: 1\n")


def test_parse_error_reports_line():
    with pytest.raises(ConfigError, match="parse error at line 3"):
        load_config("geometry:\n  gap_A: 20\n bad: [\n")


def test_non_numeric_value():
    with pytest.raises(ConfigError, match="expected a number"):
        load_config(_doc(geometry__gap_A="twenty"))


def test_gamma_and_tau_exclusive():
    with pytest.raises(ConfigError):
        load_config(_doc(decoherence__gamma=0.9))


def test_exponent_only_floats_are_numbers():
    s = load_config(preset_text("figure2").replace("Q: 1.0e+6", "Q: 1e6"))
    assert s.oscillator.Q == 1e6


def test_numerics_defaults_and_overrides():
    s = load_config(_doc())
    assert s.numerics.deriv_step == pytest.approx(1e-3 * ANG)
    assert s.numerics.energy_grid_points == 20000
    s = load_scenario("figure2", ["numerics.quadrature_rel_tol=1e-9", "numerics.scan_eV=[0.05, 0.5]"])
    assert s.numerics.quadrature_rel_tol == 1e-9
    assert s.numerics.scan_max == pytest.approx(0.5 * EV)


def test_set_override_switches_gamma_source():
    s = load_scenario("figure2", ["decoherence.gamma=0.9"])
    assert s.decoherence.gamma == 0.9 and s.decoherence.tau_i is None
    with pytest.raises(ConfigError, match="unknown key"):
        load_scenario("figure2", ["geometry.gap=3"])
    with pytest.raises(ConfigError, match="section.key=value"):
        apply_overrides({}, ["nonsense"])


def test_unknown_preset_or_file():
    with pytest.raises(ConfigError, match="not found"):
        load_scenario("figure9")


def test_config_file_path(tmp_path):
    p = tmp_path / "s.yaml"
    p.write_text(preset_text("figure4"))
    assert load_scenario(str(p)) == load_scenario("figure4")


@pytest.mark.parametrize("name", ["figure2", "figure3", "figure4"])
def test_dump_round_trip_is_exact_for_presets(name):
    s = load_scenario(name)
    again = load_config(yaml.safe_dump(scenario_to_document(s)))
    assert again == s


def _sig12(a, b):
    return a == b or abs(a - b) <= 1e-12 * max(abs(a), abs(b))


positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(gap=st.floats(1.0, 100.0), well=st.one_of(st.just(0.0), st.floats(0.1, 100.0)),
       b2=st.one_of(st.just(0.0), st.floats(0.1, 100.0)),
       v0=st.floats(0.5, 10.0), v1=st.one_of(st.just(0.0), st.floats(1e-6, 10.0)), mr=st.floats(0.01, 1.0),
       E=st.floats(0.001, 5.0), tau=positive)
def test_unit_round_trip_12_digits(gap, well, b2, v0, v1, mr, E, tau):
    doc = {
        "geometry": {"gap_A": gap, "well_A": well, "barrier2_A": b2},
        "materials": {"V0_eV": v0, "V1_eV": v1, "mass_ratio": mr},
        "oscillator": {"M_kg": 1e-10, "omega_rad_s": 6e5, "Q": 1e6, "theta_K": 4.2},
        "drive": {"mode": "monoenergetic", "I_A": 1.0, "E_eV": E},
        "decoherence": {"tau_i_s": tau * 1e-13},
    }
    out = scenario_to_document(load_config(yaml.safe_dump(doc)))
    for sec, body in doc.items():
        for key, v in body.items():
            if isinstance(v, float):
                assert _sig12(out[sec][key], v), (sec, key, v, out[sec][key])


def test_empty_document_missing_sections():
    with pytest.raises(ConfigError, match="missing required section 'geometry'"):
        load_config("")
