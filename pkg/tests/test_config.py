import pytest

from threadreq.config import (
    DEFAULT_MARKERS,
    DEFAULT_NFR_TERMS,
    ProjectConfig,
    load_extract_config,
)
from threadreq.errors import ConfigError
from threadreq.prioritize import RatingSheet, WeightScheme
from threadreq.config import DEFAULT_DIMENSIONS

CONFIG_TOML = """
[cluster]
theta_link = 0.4
theta_dup = 0.92

[prune]
min_score = 5.0
min_relevance = 0.1

[extract]
markers = ["should", "must"]
nfr_terms = ["security"]

[[dimensions]]
name = "Value"
kind = "value"
weight = 3

[[dimensions]]
name = "Risk"
kind = "risk"
weight = -2
"""


class TestProjectConfig:
    def test_defaults_validate(self):
        config = ProjectConfig().validate()
        assert config.cluster.theta_link == 0.5
        assert config.cluster.theta_dup == 0.9
        assert config.prune.min_score == 0.0
        assert [d.weight for d in config.weights.dimensions] == [7, 8, 5, -7, -5]
        assert config.extract.markers == DEFAULT_MARKERS
        assert config.extract.nfr_terms == DEFAULT_NFR_TERMS

    def test_from_toml(self, tmp_path):
        path = tmp_path / "config.toml"
        path.write_text(CONFIG_TOML, "utf-8")
        config = ProjectConfig.from_toml(path)
        assert config.cluster.theta_link == 0.4
        assert config.prune.min_score == 5.0
        assert config.extract.markers == ("should", "must")
        assert [d.name for d in config.weights.dimensions] == ["Value", "Risk"]

    def test_dict_round_trip(self, tmp_path):
        path = tmp_path / "config.toml"
        path.write_text(CONFIG_TOML, "utf-8")
        config = ProjectConfig.from_toml(path)
        again = ProjectConfig.from_dict(config.to_dict())
        assert again == config

    def test_theta_dup_below_theta_link_rejected(self, tmp_path):
        path = tmp_path / "config.toml"
        path.write_text("[cluster]\ntheta_link = 0.9\ntheta_dup = 0.5\n", "utf-8")
        with pytest.raises(ConfigError):
            ProjectConfig.from_toml(path)

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(ConfigError):
            ProjectConfig.from_toml(tmp_path / "missing.toml")


class TestExtractToml:
    def test_loads_markers_and_terms(self, tmp_path):
        path = tmp_path / "extract.toml"
        path.write_text('markers = ["wants"]\nnfr_terms = ["speed"]\n', "utf-8")
        config = load_extract_config(path)
        assert config.markers == ("wants",)
        assert config.nfr_terms == ("speed",)

    def test_missing_keys_fall_back_to_defaults(self, tmp_path):
        path = tmp_path / "extract.toml"
        path.write_text('markers = ["wants"]\n', "utf-8")
        config = load_extract_config(path)
        assert config.nfr_terms == DEFAULT_NFR_TERMS

    def test_empty_marker_list_rejected(self, tmp_path):
        path = tmp_path / "extract.toml"
        path.write_text("markers = []\n", "utf-8")
        with pytest.raises(ConfigError):
            load_extract_config(path)


class TestRatingSheetCsv:
    def test_round_trip(self):
        scheme = WeightScheme(DEFAULT_DIMENSIONS)
        sheet = RatingSheet()
        for dim in scheme.dimensions:
            sheet.set("R1", dim.name, 4)
            sheet.set("R2", dim.name, 7)
        text = sheet.to_csv(scheme)
        again = RatingSheet.from_csv(text, scheme)
        assert again.ratings == sheet.ratings

    def test_unknown_dimension_rejected(self):
        scheme = WeightScheme(DEFAULT_DIMENSIONS)
        with pytest.raises(ConfigError):
            RatingSheet.from_csv("candidate_id,Bogus\nR1,3\n", scheme)

    def test_non_integer_cell_rejected(self):
        scheme = WeightScheme(DEFAULT_DIMENSIONS)
        with pytest.raises(ConfigError):
            RatingSheet.from_csv("candidate_id,Quality\nR1,3.5\n", scheme)
