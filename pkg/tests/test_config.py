from pathlib import Path

import pytest

import config
from channel.fading import LinkModel
from errors import ParseError, UnknownSchemeError, ValidationError
from experiment.records import Scheme

SHIPPED_CONFIG = Path(__file__).resolve().parent.parent / "configs" / "default.toml"


class TestDefaults:

    def test_empty_file(self):
        experiment, solver = config.parse_config_text("")
        assert experiment.power.p_a == pytest.approx(6.309573, rel=1e-6)
        assert experiment.power.sigma2 == pytest.approx(1e-5)
        assert experiment.m == 64
        assert experiment.schemes == tuple(Scheme)
        assert solver.bisection_eps == 1e-4
        assert experiment.verify.instances == experiment.verify.ao_instances == 1000

    def test_shipped_config_matches_defaults(self):
        experiment, solver = config.parse_config(SHIPPED_CONFIG)
        default_experiment, default_solver = config.parse_config_text("")
        assert experiment.d0_values == default_experiment.d0_values
        assert experiment.power == default_experiment.power
        assert experiment.fading.models == default_experiment.fading.models
        assert solver == default_solver

    def test_missing_default_path_falls_back(self, monkeypatch, tmp_path):
        monkeypatch.setattr(config, "CONFIG_PATH", str(tmp_path / "absent.toml"))
        experiment, _ = config.parse_config(None)
        assert experiment.trials == 50


class TestSections:

    def test_power_override(self):
        experiment, _ = config.parse_config_text("[power]\np_dbm = 10.0\npc_dbm = 0.0\n")
        assert experiment.power.p_a == pytest.approx(10.0)
        assert experiment.power.p_c == pytest.approx(1.0)

    def test_element_count(self):
        experiment, _ = config.parse_config_text("[geometry]\nm = 12\n")
        assert (experiment.geometry.irs_rows, experiment.geometry.irs_cols) == (3, 4)
        assert experiment.m == 12

    def test_no_irs(self):
        experiment, _ = config.parse_config_text("[geometry]\nm = 0\n")
        assert experiment.m == 0

    def test_distance_range(self):
        experiment, _ = config.parse_config_text("[sweep]\nd0_start = 20.0\nd0_stop = 40.0\nd0_step = 10.0\n")
        assert experiment.d0_values == (20.0, 30.0, 40.0)

    def test_distance_list(self):
        experiment, _ = config.parse_config_text("[sweep]\nd0_values = [15.0, 45.5]\n")
        assert experiment.d0_values == (15.0, 45.5)

    def test_link_models(self):
        experiment, _ = config.parse_config_text('[fading.models]\ncu = "rayleigh"\n')
        assert experiment.fading.models["cu"] is LinkModel.RAYLEIGH

    def test_solver_and_verify(self):
        text = "[solver]\nmax_ao_iters = 3\n\n[verify]\ninstances = 5\nseeds = [1, 2]\n"
        experiment, solver = config.parse_config_text(text)
        assert solver.max_ao_iters == 3
        assert experiment.verify.instances == 5
        assert experiment.verify.seeds == (1, 2)

    def test_seed_override(self):
        experiment, _ = config.parse_config_text("[sweep]\nseed = 4\n")
        assert config.with_seed(experiment, None).seed == 4
        assert config.with_seed(experiment, 9).seed == 9


class TestErrors:

    def test_unknown_key_points_at_line(self):
        with pytest.raises(ParseError) as e:
            config.parse_config_text("[sweep]\ntrails = 3\n")
        assert e.value.key == "sweep.trails"
        assert e.value.line == 2

    def test_unknown_section(self):
        with pytest.raises(ParseError):
            config.parse_config_text("[plot]\nwidth = 3\n")

    def test_wrong_type(self):
        with pytest.raises(ParseError) as e:
            config.parse_config_text('[sweep]\n\ntrials = "many"\n')
        assert e.value.key == "sweep.trials"
        assert e.value.line == 3

    def test_malformed_toml(self):
        with pytest.raises(ParseError) as e:
            config.parse_config_text("[sweep]\nseed = \n")
        assert e.value.line is not None

    def test_unknown_link_model(self):
        with pytest.raises(ParseError):
            config.parse_config_text('[fading.models]\ncu = "ray"\n')

    def test_range_and_list_together(self):
        with pytest.raises(ParseError):
            config.parse_config_text("[sweep]\nd0_values = [10.0]\nd0_step = 5.0\n")

    def test_unknown_scheme(self):
        with pytest.raises(UnknownSchemeError):
            config.parse_config_text('[sweep]\nschemes = ["Magic"]\n')

    @pytest.mark.parametrize("text", [
        "[sweep]\ntrials = -1\n",
        "[sweep]\nd0_values = [10.0, -1.0]\n",
        "[power]\npa_dbm = 20.0\n",
        "[solver]\nbisection_eps = 0.0\n",
        "[geometry]\nirs_rows = 2\nirs_cols = 2\nm = 5\n",
    ])
    def test_invalid_values(self, text):
        with pytest.raises(ValidationError):
            config.parse_config_text(text)

    def test_validate_rejects_bad_log_level(self, monkeypatch):
        experiment, solver = config.parse_config_text("")
        monkeypatch.setattr(config, "LOG_LEVEL", "LOUD")
        with pytest.raises(ValidationError):
            config.validate(experiment, solver)
