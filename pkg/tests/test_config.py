# tests/test_config.py
import pytest
from src.config.manager import ConfigManager, config_manager
from src.models.model_spec import Boundary, Geometry
from src.models.run_config import OnShellRule, OutputFormat, RunConfig


class TestPlainText:

    def test_parse(self):
        data = ConfigManager.parse_plain_text(
            "# комментарий\n"
            "geometry = chain\n"
            "\n"
            "sites = 3  # узлы\n"
            "points = 0, 2\n"
        )
        assert data == {"geometry": "chain", "sites": "3", "points": ["0", "2"]}

    def test_missing_separator(self):
        with pytest.raises(ValueError):
            ConfigManager.parse_plain_text("geometry chain")

    def test_duplicate_key(self):
        with pytest.raises(ValueError):
            ConfigManager.parse_plain_text("sites = 2\nsites = 3")


class TestRunConfig:

    def test_defaults(self):
        config = RunConfig()
        assert config.coupling == pytest.approx(0.1)
        assert config.m_max == 12
        assert config.format == OutputFormat.JSON
        assert config.on_shell == OnShellRule.DROP

    def test_lambda_alias(self):
        assert RunConfig(**{"lambda": 0.3}).coupling == pytest.approx(0.3)

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError):
            RunConfig(unknown_key=1)

    def test_zero_tolerance_rejected(self):
        with pytest.raises(ValueError):
            RunConfig(compare_tolerance=0)

    def test_interval_order(self):
        with pytest.raises(ValueError):
            RunConfig(t0=2.0, t1=1.0)

    def test_ratio_window_order(self):
        with pytest.raises(ValueError):
            RunConfig(ratio_min=4.5, ratio_max=3.5)
        with pytest.raises(ValueError):
            RunConfig(ratio_min=4.0, ratio_max=4.0)
        assert RunConfig(ratio_min=3.0, ratio_max=5.0).ratio_max == pytest.approx(5.0)

    def test_model_spec(self):
        spec = RunConfig(geometry="chain", sites=4, boundary="dirichlet").build_model_spec()
        assert spec.geometry == Geometry.CHAIN
        assert spec.boundary == Boundary.DIRICHLET
        assert spec.n_sites == 4

    def test_source_vector(self):
        assert RunConfig(source_value=0.5).source_vector(2) == [0.5, 0.5]
        assert RunConfig(source=[0.1, 0.2]).source_vector(2) == [0.1, 0.2]
        with pytest.raises(ValueError):
            RunConfig(source=[0.1]).source_vector(2)

    def test_parameters_omit_output(self):
        parameters = RunConfig(output="report.json").parameters()
        assert "output" not in parameters
        assert parameters["lambda"] == pytest.approx(0.1)
        assert list(parameters) == sorted(parameters)


class TestConfigManager:

    def test_singleton(self):
        assert ConfigManager() is config_manager

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            config_manager.load(str(tmp_path / "absent.yaml"))

    def test_yaml_with_overrides(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("geometry: chain\nsites: 3\nlambda: 0.2\np_max: 1\n", encoding="utf-8")
        config_manager.load(str(path))
        config = config_manager.get_run_config({"p_max": 2, "steps": None})
        assert config.sites == 3
        assert config.p_max == 2
        assert config.steps == 200
        assert config.coupling == pytest.approx(0.2)

    def test_coupling_key_override(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("lambda = 0.2\n", encoding="utf-8")
        config_manager.load(str(path))
        assert config_manager.get_run_config({"coupling": 0.05}).coupling == pytest.approx(0.05)

    def test_plain_text_lists(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("geometry = chain\nsites = 3\nsource = 0.2, -0.1, 0.3\npoints = 1\n", encoding="utf-8")
        config_manager.load(str(path))
        config = config_manager.get_run_config()
        assert config.source == [0.2, -0.1, 0.3]
        assert config.points == [1]

    def test_invalid_value_is_value_error(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("m_max = 0\n", encoding="utf-8")
        config_manager.load(str(path))
        with pytest.raises(ValueError) as error:
            config_manager.get_run_config()
        assert "m_max" in str(error.value)

    def test_yaml_root_must_be_mapping(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("- 1\n- 2\n", encoding="utf-8")
        with pytest.raises(ValueError):
            config_manager.load(str(path))
