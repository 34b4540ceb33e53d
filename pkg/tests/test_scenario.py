import json
import random

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from dpofeedback.scenario import (PRESET_NAMES, ConflictingDelaySpec,
                                  GridSpec, MapSpec, ParseError, RunManifest,
                                  Scenario, ScenarioError, UnknownKey,
                                  VersionMismatch, load_manifest, load_preset,
                                  load_scenario, loads_scenario,
                                  save_manifest, save_scenario)

FIG3_TEXT = """\
[scenario]
schema_version = 1

[model]
gamma1 = 2.0
gamma2 = 2.0
gamma3 = 0.0
scale_S = 0.5
delta = 0
eps_at_threshold = true

[grid]
omega_min = -18.0
omega_max = 18.0
omega_points = 2001

[spectrum]
eta = 1e-6
compare_markovian = true
both_delta = true
"""


class TestLoad:
    def test_fig3_text(self):
        scn = loads_scenario(FIG3_TEXT)
        assert scn.model["gamma1"] == 2.0
        assert scn.model["scale_S"] == 0.5
        assert scn.model["delta"] == 0
        assert scn.compare_markovian
        assert scn.both_delta
        assert scn.grid.omega_points == 2001

    def test_pump_resolution_at_threshold(self):
        scn = loads_scenario(FIG3_TEXT)
        d = scn.resolve_pump()
        assert d["eps_abs"] == pytest.approx((1.0 - 1e-6) * 1.0)
        assert "eps_at_threshold" not in d

    def test_pump_resolution_above_threshold(self):
        text = FIG3_TEXT.replace("eps_at_threshold = true",
                                 "eps_above_threshold = 5.0")
        d = loads_scenario(text).resolve_pump()
        assert d["eps_abs"] == pytest.approx(6.0)

    def test_pump_must_be_specified_once(self):
        text = FIG3_TEXT + "\n"
        scn = loads_scenario(text.replace("eps_at_threshold = true",
                                          "gamma_f = 0.0"))
        with pytest.raises(ScenarioError):
            scn.resolve_pump()
        both = loads_scenario(
            text.replace("eps_at_threshold = true",
                         "eps_at_threshold = true\neps_abs = 0.5"))
        with pytest.raises(ScenarioError):
            both.resolve_pump()

    def test_model_params_validates(self):
        from dpofeedback.model import validate
        m = validate(loads_scenario(FIG3_TEXT).model_params())
        assert m.gamma1 == 2.0
        assert m.interference.kind == "destructive"

    def test_unknown_key(self):
        with pytest.raises(UnknownKey):
            loads_scenario(FIG3_TEXT.replace("gamma1", "gamm1"))

    def test_unknown_section(self):
        with pytest.raises(UnknownKey):
            loads_scenario(FIG3_TEXT + "\n[extras]\nfoo = 1\n")

    def test_conflicting_delay(self):
        with pytest.raises(ConflictingDelaySpec):
            loads_scenario(FIG3_TEXT.replace("delta = 0", "tau = 1.0"))

    def test_version_mismatch(self):
        with pytest.raises(VersionMismatch):
            loads_scenario(FIG3_TEXT.replace("schema_version = 1",
                                             "schema_version = 2"))

    def test_missing_version(self):
        body = FIG3_TEXT.split("[model]", 1)[1]
        with pytest.raises(VersionMismatch):
            loads_scenario("[model]" + body)

    def test_parse_error_bad_number(self):
        with pytest.raises(ParseError):
            loads_scenario(FIG3_TEXT.replace("gamma1 = 2.0",
                                             "gamma1 = fast"))

    def test_parse_error_bad_boolean(self):
        with pytest.raises(ParseError):
            loads_scenario(FIG3_TEXT.replace("both_delta = true",
                                             "both_delta = maybe"))

    def test_parse_error_malformed_ini(self):
        with pytest.raises(ParseError):
            loads_scenario("gamma1 = 2.0\n")  # key before any section

    def test_missing_file_is_oserror(self, tmp_path):
        with pytest.raises(OSError):
            load_scenario(tmp_path / "nope.ini")


class TestSave:
    def test_round_trip_identity(self, tmp_path):
        scn = loads_scenario(FIG3_TEXT)
        p1 = tmp_path / "a.ini"
        p2 = tmp_path / "b.ini"
        save_scenario(scn, p1)
        again = load_scenario(p1)
        save_scenario(again, p2)
        assert p1.read_text() == p2.read_text()
        assert again.model == scn.model
        assert again.grid == scn.grid

    def test_map_section_round_trip(self, tmp_path):
        scn = Scenario(model={"gamma1": 1.0, "gamma2": 2.5, "eps_abs": 0.5,
                              "tau": 1.0},
                       map_grid=MapSpec(g1tau_points=11, alpha_points=21))
        p = tmp_path / "m.ini"
        save_scenario(scn, p)
        again = load_scenario(p)
        assert again.map_grid == scn.map_grid


class TestManifest:
    def test_round_trip(self, tmp_path):
        man = RunManifest(subcommand="spectrum",
                          model={"gamma1": 2.0, "eps_abs": 0.999999},
                          grid=GridSpec(-18.0, 18.0, 2001).to_dict(),
                          compare_markovian=True,
                          outputs=("fig3.csv",))
        p = tmp_path / "run.json"
        save_manifest(man, p)
        assert load_manifest(p) == man

    def test_json_is_sorted_and_stable(self):
        man = RunManifest(subcommand="dde", model={"b": 1.0, "a": 2.0})
        j = man.to_json()
        assert j == RunManifest(subcommand="dde",
                                model={"a": 2.0, "b": 1.0}).to_json()
        keys = list(json.loads(j))
        assert keys == sorted(keys)

    def test_version_gate(self, tmp_path):
        p = tmp_path / "old.json"
        man = RunManifest(subcommand="spectrum", model={})
        p.write_text(man.to_json().replace('"schema_version": 1',
                                           '"schema_version": 0'))
        with pytest.raises(VersionMismatch):
            load_manifest(p)

    def test_corrupt_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(ParseError):
            load_manifest(p)

    # the manifest file is rewritten on every example, so reusing one
    # tmp_path across examples is safe
    @settings(max_examples=100, deadline=None,
              suppress_health_check=[HealthCheck.function_scoped_fixture])
    @given(st.dictionaries(st.sampled_from(["gamma1", "gamma2", "eps_abs",
                                            "tau", "phi"]),
                           st.floats(allow_nan=False, allow_infinity=False,
                                     width=32),
                           min_size=1),
           st.sampled_from(["spectrum", "stability", "dde"]),
           st.booleans(), st.booleans())
    def test_manifest_property(self, tmp_path, model, sub, markov, plot):
        man = RunManifest(subcommand=sub, model=model,
                          compare_markovian=markov, plot=plot)
        p = tmp_path / "m.json"
        save_manifest(man, p)
        back = load_manifest(p)
        assert back == man
        assert back.to_json() == man.to_json()


class TestPresets:
    def test_all_presets_load(self):
        for name in PRESET_NAMES:
            scn = load_preset(name)
            if scn.map_grid is None:
                # spectrum presets must resolve to a valid model
                from dpofeedback.model import validate
                validate(scn.model_params())

    def test_unknown_preset(self):
        with pytest.raises(ScenarioError):
            load_preset("fig99")

    def test_fig3_preset_contents(self):
        scn = load_preset("fig3")
        assert scn.model["gamma1"] == 2.0
        assert scn.both_delta
        assert scn.compare_markovian

    def test_map_presets_have_grids(self):
        a = load_preset("fig2a-map")
        b = load_preset("fig2b-map")
        assert a.map_grid.interference == "constructive"
        assert b.map_grid.interference == "destructive"
