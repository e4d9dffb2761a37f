import copy
import json
import math

import pytest

from ccaqst import AnalysisError, ScenarioError
from ccaqst.scenario import (
    FIGURES,
    figure_presets,
    load_preset,
    parse_scenario,
    parse_scenario_dict,
    preset_document,
    preset_index,
)

BASE = {
    "n": 4,
    "coupling": {"scheme": "uniform", "j": 1.0},
    "omega": 0.5,
    "sent_state": {"kind": "fock", "level": 1},
    "rest_states": {"kind": "fock", "level": 0},
    "time_grid": {"start": 0, "end": 5, "points": 11},
}


def doc(**changes):
    out = copy.deepcopy(BASE)
    for key, value in changes.items():
        if value is None:
            out.pop(key, None)
        else:
            out[key] = value
    return out


def test_every_preset_parses():
    for figure in FIGURES:
        for entry in figure_presets(figure):
            sc = load_preset(entry["name"])
            assert sc.omega >= 0 and sc.n >= 2
            assert len(sc.rest_states) == sc.n - 1


def test_fig1_omega_from_rule():
    sc = load_preset("fig1_coherent")
    assert sc.omega == pytest.approx(2 * math.pi / 21.8, abs=1e-12)
    assert round(sc.omega, 3) == 0.288
    assert sc.sent_spec().kind == "coherent"


def test_fig1_rule_with_search():
    d = preset_document("fig1_coherent")
    d["omega_rule"] = {"kind": "uniform_pgst", "k": 1}
    sc = parse_scenario_dict(d)
    assert sc.omega == pytest.approx(0.2882, abs=2e-3)


def test_fig2_preset():
    sc = load_preset("fig2_beta20")
    assert sc.n == 8 and sc.omega == 1.0
    assert sc.coupling["scheme"] == "modulated"
    assert sc.rest_specs()[0].n_bar == pytest.approx(1 / math.expm1(20.0))


def test_fig2_frequencies():
    got = {float(name.split("beta")[1]): load_preset(name).omega
           for name in (e["name"] for e in figure_presets("fig2"))}
    assert got == {0.5: 17.0, 1.0: 9.0, 10.0: 5.0, 20.0: 1.0}


def test_fig3_pairs():
    entries = figure_presets("fig3")
    solid = [e for e in entries if e["style"] == "solid"]
    assert sorted(load_preset(e["name"]).omega for e in solid) == [0.076, 0.379, 1.29]
    for e in entries:
        if e["style"] == "dashed":
            twin = load_preset(e["pair"])
            mine = load_preset(e["name"])
            assert mine.coupling["scheme"] == "uniform" and twin.coupling["scheme"] == "ballistic"
            assert mine.omega == twin.omega and mine.rest_states == twin.rest_states


def test_index_taus():
    idx = preset_index()
    assert idx["fig1"]["tau"] == 21.8
    assert idx["fig2"]["tau"] == pytest.approx(math.pi / 2)
    assert idx["fig3"]["tau"] == 20.7


def test_single_point_grid_rejected():
    with pytest.raises(ScenarioError, match="time_grid"):
        parse_scenario_dict(doc(time_grid={"start": 0, "end": 5, "points": 1}))


@pytest.mark.parametrize(
    "changes, field",
    [
        ({"time_grid": {"start": 3, "end": 1, "points": 5}}, "time_grid"),
        ({"time_grid": {"start": -1, "end": 1, "points": 5}}, "time_grid"),
        ({"omega": -1.0}, "omega"),
        ({"omega": None}, "omega"),
        ({"omega_rule": {"kind": "modulated", "k": 0}}, "omega"),
        ({"n": 1}, "n"),
        ({"coupling": {"scheme": "zigzag"}}, "coupling"),
        ({"coupling": {"scheme": "custom", "values": [1, 2]}}, "coupling.values"),
        ({"coupling": {"scheme": "ballistic"}}, "coupling.j_end"),
        ({"coupling": {"scheme": "ballistic", "j_end": 1.5}}, "coupling"),
        ({"rest_states": [{"kind": "fock", "level": 0}]}, "rest_states"),
        ({"sent_state": {"kind": "thermal", "n_bar": 0.1}}, "sent_state"),
        ({"sent_state": {"kind": "fock", "coefficients": [0, 0]}}, "sent_state"),
        ({"sent_state": {"kind": "squeezed"}}, "sent_state"),
        ({"cutoff": 1}, "cutoff"),
        ({"tail_tol": 0}, "tail_tol"),
        ({"surprise": 1}, "<root>"),
    ],
)
def test_invalid_fields_are_named(changes, field):
    with pytest.raises(ScenarioError) as info:
        parse_scenario_dict(doc(**changes))
    assert info.value.field.startswith(field)


def test_negative_rule_omega():
    d = doc(omega=None, omega_rule={"kind": "modulated", "k": 0}, coupling={"scheme": "modulated", "k": 0}, n=8)
    with pytest.raises(ScenarioError, match="negative"):
        parse_scenario_dict(d)


def test_modulated_rule():
    d = doc(omega=None, omega_rule={"kind": "modulated", "k": 2}, coupling={"scheme": "modulated", "k": 0}, n=8)
    assert parse_scenario_dict(d).omega == 1.0


def test_unresolvable_rule():
    d = doc(n=40, omega=None, omega_rule={"kind": "uniform_pgst", "k": 1, "t_max": 2.0})
    with pytest.raises(AnalysisError):
        parse_scenario_dict(d)


def test_broadcast_rest_state():
    sc = parse_scenario_dict(doc())
    assert sc.rest_states == ({"kind": "fock", "level": 0},) * 3


def test_complex_coefficients():
    sc = parse_scenario_dict(doc(sent_state={"kind": "fock", "coefficients": [1, [0, 1]]}))
    spec = sc.sent_spec()
    assert spec.coefficients[1] == pytest.approx(1j / math.sqrt(2))


def test_thermal_frequency_models():
    rest = {"kind": "thermal", "beta": 2.0}
    local = parse_scenario_dict(doc(rest_states=rest, omega=0.5))
    unit = parse_scenario_dict(doc(rest_states=rest, omega=0.5, thermal_model="unit"))
    explicit = parse_scenario_dict(doc(rest_states=rest, omega=0.5, thermal_omega=3.0))
    assert local.rest_specs()[0].n_bar == pytest.approx(1 / math.expm1(1.0))
    assert unit.rest_specs()[0].n_bar == pytest.approx(1 / math.expm1(2.0))
    assert explicit.rest_specs()[0].n_bar == pytest.approx(1 / math.expm1(6.0))


def test_thermal_beta_needs_positive_frequency():
    with pytest.raises(ScenarioError, match="thermal_omega"):
        parse_scenario_dict(doc(rest_states={"kind": "thermal", "beta": 2.0}, omega=0.0))


def test_to_dict_roundtrip():
    for name in ("fig1_weighted", "fig2_beta0.5", "fig3_thermal_uniform"):
        sc = load_preset(name)
        again = parse_scenario_dict(json.loads(json.dumps(sc.to_dict())))
        assert again == sc
        assert again.omega_rule == sc.omega_rule


def test_parse_file_errors(tmp_path):
    with pytest.raises(ScenarioError, match="no such file"):
        parse_scenario(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ScenarioError, match="invalid JSON"):
        parse_scenario(bad)
    good = tmp_path / "good.json"
    good.write_text(json.dumps(BASE))
    assert parse_scenario(good).n == 4
