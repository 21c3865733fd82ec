"""Tests for configuration loading and MatrixFile handling."""

import pytest
import tempfile
from pathlib import Path

import numpy as np
from numpy.testing import assert_allclose

from gamma_contract.config import (
    ConfigLoader,
    ConfigurationError,
    MatrixFileError,
    dump_matrix,
    load_matrix,
)

DEFAULT_CONFIG = Path(__file__).parent.parent / "config" / "default_config.yaml"


def write_yaml(content: str) -> Path:
    """Write YAML content to a temporary file and return the path."""
    f = tempfile.NamedTemporaryFile(mode="w", suffix=".yaml", delete=False)
    f.write(content)
    f.close()
    return Path(f.name)


class TestConfigLoaderBasics:
    """Basic config loading tests."""

    def test_file_not_found_raises_error(self):
        """Loading non-existent file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            ConfigLoader("/nonexistent/path.yaml")

    def test_empty_file_gives_defaults(self):
        """An empty file yields the built-in defaults."""
        config = ConfigLoader(write_yaml("")).load()
        assert config.scan_radial == 32
        assert config.scan_angular == 64
        assert config.blocks == 8
        assert config.tolerances.assert_tol == 1e-8

    def test_shipped_config_matches_defaults(self):
        """config/default_config.yaml spells out the built-in defaults."""
        config = ConfigLoader(DEFAULT_CONFIG).load()
        assert config.max_degree == 6
        assert config.search_trials == 500
        assert config.newton_iterations == 40
        assert config.examples.epsilon == pytest.approx(1 / 1.3)
        assert config.examples.z == 5 + 0j
        assert_allclose(
            config.examples.counterexample_1["R"], [[0.3, 0.1], [0.0, 0.3]]
        )
        assert_allclose(
            config.examples.counterexample_2["B"], [[0.3, 0.3], [0.0, 0.3]]
        )

    def test_config_before_load_raises(self):
        """config and raw_config need load() first."""
        loader = ConfigLoader(write_yaml(""))
        with pytest.raises(RuntimeError, match="load\\(\\) first"):
            _ = loader.config
        with pytest.raises(RuntimeError):
            _ = loader.raw_config

    def test_reload_picks_up_changes(self):
        """reload() re-reads the file."""
        path = write_yaml("scan:\n  radial: 4\n")
        loader = ConfigLoader(path)
        assert loader.load().scan_radial == 4
        path.write_text("scan:\n  radial: 6\n")
        assert loader.reload().scan_radial == 6


class TestStructureValidation:
    """Tests for the shape of the YAML document."""

    def test_invalid_yaml(self):
        """Unparseable YAML raises ConfigurationError."""
        with pytest.raises(ConfigurationError, match="Invalid YAML"):
            ConfigLoader(write_yaml("scan: [1, 2")).load()

    def test_root_must_be_mapping(self):
        """A list at the root is rejected."""
        with pytest.raises(ConfigurationError, match="root must be a mapping"):
            ConfigLoader(write_yaml("- 1\n- 2\n")).load()

    def test_unknown_section(self):
        """Unknown sections are rejected by name."""
        message = "Unknown section\\(s\\): planning"
        with pytest.raises(ConfigurationError, match=message):
            ConfigLoader(write_yaml("planning:\n  weeks: 2\n")).load()

    def test_section_must_be_mapping(self):
        """Each section is a mapping."""
        with pytest.raises(ConfigurationError, match="'scan' must be a mapping"):
            ConfigLoader(write_yaml("scan: 5\n")).load()


class TestValueValidation:
    """Tests for values that fail dataclass validation."""

    @pytest.mark.parametrize(
        "yaml,message",
        [
            ("scan:\n  radial: 0\n", "scan_radial"),
            ("dilation:\n  blocks: -1\n", "blocks"),
            ("dilation:\n  max_degree: -2\n", "max_degree"),
            ("search:\n  trials: 0\n", "search_trials"),
            ("tolerances:\n  assert_tol: 0\n", "strictly positive"),
            ("tolerances:\n  rank_cutoff: 1.0e-6\n", "cannot exceed"),
            ("examples:\n  r: 0.02\n", "r must lie"),
            ("examples:\n  delta: 3\n", "delta must lie"),
        ],
    )
    def test_invalid_values(self, yaml: str, message: str):
        """Out-of-range values surface as ConfigurationError."""
        with pytest.raises(ConfigurationError, match=message):
            ConfigLoader(write_yaml(yaml)).load()


class TestExamplesSection:
    """Tests for example parameter parsing."""

    def test_complex_values(self):
        """Complex parameters are [re, im] pairs; bare numbers are real."""
        yaml = """
examples:
  z: [0.0, 3.0]
  counterexample_1:
    q: [0.25, 0.25]
    w: 0.4
"""
        examples = ConfigLoader(write_yaml(yaml)).load().examples
        assert examples.z == 3j
        assert examples.counterexample_1["q"] == 0.25 + 0.25j
        assert examples.counterexample_1["w"] == 0.4
        assert examples.counterexample_1["y"] == 0.4

    def test_search_settings_flow_into_examples(self):
        """Seed and trial count from the search section apply to the examples."""
        examples = ConfigLoader(
            write_yaml("search:\n  seed: 9\n  trials: 12\n")
        ).load().examples
        assert examples.seed == 9
        assert examples.search_trials == 12

    def test_unknown_counterexample_parameter(self):
        """Unknown counterexample_1 names are rejected."""
        yaml = "examples:\n  counterexample_1:\n    sigma: 0.1\n"
        with pytest.raises(ConfigurationError, match="Invalid counterexample_1"):
            ConfigLoader(write_yaml(yaml)).load()

    def test_counterexample_r_is_a_matrix_document(self):
        """R of the first counterexample is read as a MatrixFile block."""
        yaml = """
examples:
  counterexample_1:
    R:
      rows: 2
      cols: 2
      data: [[0.2, 0.0], [0.0, 0.0], [0.0, 0.0], [0.2, 0.0]]
"""
        examples = ConfigLoader(write_yaml(yaml)).load().examples
        assert_allclose(examples.counterexample_1["R"], 0.2 * np.eye(2))
        assert examples.counterexample_1["q"] == 0.5

    def test_bad_counterexample_r(self):
        """A malformed R block is a MatrixFileError."""
        yaml = "examples:\n  counterexample_1:\n    R: [[0.3, 0.0]]\n"
        with pytest.raises(MatrixFileError, match="counterexample_1.R"):
            ConfigLoader(write_yaml(yaml)).load()

    def test_bad_matrix_block(self):
        """A malformed counterexample_2 block is a MatrixFileError."""
        yaml = """
examples:
  counterexample_2:
    A:
      rows: 2
      cols: 2
      data: [[1.0, 0.0]]
"""
        with pytest.raises(MatrixFileError, match="counterexample_2.A"):
            ConfigLoader(write_yaml(yaml)).load()

    def test_blocks_must_share_size(self):
        """counterexample_2 blocks must all be square of one size."""
        yaml = """
examples:
  counterexample_2:
    T:
      rows: 1
      cols: 1
      data: [[0.5, 0.0]]
"""
        with pytest.raises(ConfigurationError, match="square of one size"):
            ConfigLoader(write_yaml(yaml)).load()


class TestSummary:
    """Tests for the human-readable summary."""

    def test_summary_lines(self):
        """The summary names tolerances, scan grid, window and search settings."""
        loader = ConfigLoader(write_yaml("scan:\n  radial: 4\n  angular: 8\n"))
        loader.load()
        summary = loader.get_summary()
        assert "Configuration from:" in summary
        assert "ρ scan: 4 radii x 8 angles" in summary
        assert "Dilation window: 8 blocks, degree <= 6" in summary
        assert "branch search off" in summary


class TestMatrixFiles:
    """Tests for reading and writing MatrixFile documents."""

    def test_dump_then_load(self, tmp_path):
        """A written matrix reads back unchanged."""
        M = np.array([[0.5 + 1j, -2.0], [0.0, 1e-3j]])
        path = tmp_path / "m.yaml"
        dump_matrix(M, path)
        assert_allclose(load_matrix(path), M, rtol=0)

    def test_rectangular_matrix(self, tmp_path):
        """rows and cols may differ."""
        path = tmp_path / "rect.yaml"
        path.write_text("rows: 1\ncols: 3\ndata: [[1, 0], [2, 0], [3, 1]]\n")
        assert load_matrix(path).shape == (1, 3)

    def test_missing_file(self, tmp_path):
        """A missing file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError, match="Matrix file not found"):
            load_matrix(tmp_path / "absent.yaml")

    def test_invalid_yaml(self, tmp_path):
        """Unparseable YAML is a MatrixFileError."""
        path = tmp_path / "bad.yaml"
        path.write_text("rows: [1\n")
        with pytest.raises(MatrixFileError, match="Invalid YAML"):
            load_matrix(path)

    def test_wrong_entry_count(self, tmp_path):
        """data must hold rows*cols entries."""
        path = tmp_path / "short.yaml"
        path.write_text("rows: 2\ncols: 2\ndata: [[1, 0]]\n")
        with pytest.raises(MatrixFileError, match="rows\\*cols"):
            load_matrix(path)
