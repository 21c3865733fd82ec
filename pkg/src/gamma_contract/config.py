"""
Configuration loader for analysis settings, plus MatrixFile reading and writing.
"""

import yaml
from pathlib import Path
from typing import Any, Dict

from .models import (
    COUNTER_1_SCALARS,
    AnalysisConfig,
    ComplexMatrix,
    ExampleParams,
    Tolerances,
    matrix_from_document,
    matrix_to_document,
    pair_to_complex,
)


class ConfigurationError(Exception):
    """Custom exception for configuration errors."""

    pass


class MatrixFileError(ConfigurationError):
    """Raised when a MatrixFile document is missing, malformed or inconsistent."""

    pass


class ConfigLoader:
    """Loads and validates analysis settings from YAML files."""

    # Top-level sections a configuration file may contain
    SECTIONS = ("tolerances", "scan", "dilation", "search", "examples")

    def __init__(self, config_path: str | Path):
        """
        Initialize the ConfigLoader with a configuration file path.

        Args:
            config_path: Path to the YAML configuration file

        Raises:
            FileNotFoundError: If config file doesn't exist
        """
        self.config_path = Path(config_path)

        if not self.config_path.exists():
            raise FileNotFoundError(f"Configuration file not found: {self.config_path}")

        self._raw_config: Dict[str, Any] | None = None
        self._config: AnalysisConfig | None = None

    def load(self) -> AnalysisConfig:
        """
        Load and parse the configuration file.

        Returns:
            AnalysisConfig object with all parsed settings

        Raises:
            ConfigurationError: If configuration is invalid
        """
        with open(self.config_path, "r") as f:
            try:
                raw = yaml.safe_load(f)
            except yaml.YAMLError as e:
                raise ConfigurationError(f"Invalid YAML in {self.config_path}: {e}")
        self._raw_config = raw if raw is not None else {}

        self._config = self._parse_config()

        self._validate()

        return self._config

    def reload(self) -> AnalysisConfig:
        """
        Reload the configuration from the file.

        Returns:
            AnalysisConfig object with all parsed settings
        """
        return self.load()

    @property
    def config(self) -> AnalysisConfig:
        """
        Get the loaded configuration.

        Raises:
            RuntimeError: If load() hasn't been called yet
        """
        if self._config is None:
            raise RuntimeError("Configuration not loaded. Call load() first.")
        return self._config

    @property
    def raw_config(self) -> Dict[str, Any]:
        """
        Get the raw configuration dictionary.

        Raises:
            RuntimeError: If load() hasn't been called yet
        """
        if self._raw_config is None:
            raise RuntimeError("Configuration not loaded. Call load() first.")
        return self._raw_config

    def _section(self, name: str) -> Dict[str, Any]:
        section = self._raw_config.get(name, {})
        if section is None:
            return {}
        if not isinstance(section, dict):
            raise ConfigurationError(
                f"Section '{name}' must be a mapping, got {type(section).__name__}"
            )
        return section

    def _parse_config(self) -> AnalysisConfig:
        """Parse raw YAML data into an AnalysisConfig object."""
        raw = self._raw_config
        if not isinstance(raw, dict):
            raise ConfigurationError(
                f"Configuration root must be a mapping, got {type(raw).__name__}"
            )

        unknown = sorted(set(raw) - set(self.SECTIONS))
        if unknown:
            raise ConfigurationError(
                f"Unknown section(s): {', '.join(unknown)}. "
                f"Valid sections: {', '.join(self.SECTIONS)}"
            )

        scan = self._section("scan")
        dilation = self._section("dilation")
        search = self._section("search")

        seed = search.get("seed", 0)
        trials = search.get("trials", 500)

        try:
            return AnalysisConfig(
                tolerances=self._parse_tolerances(self._section("tolerances")),
                scan_radial=scan.get("radial", 32),
                scan_angular=scan.get("angular", 64),
                blocks=dilation.get("blocks", 8),
                max_degree=dilation.get("max_degree", 6),
                seed=seed,
                branch_search=bool(search.get("branch_search", False)),
                search_trials=trials,
                newton_iterations=search.get("newton_iterations", 40),
                examples=self._parse_examples(self._section("examples"), seed, trials),
            )
        except (TypeError, ValueError) as e:
            raise ConfigurationError(str(e)) from e

    def _parse_tolerances(self, raw: Dict[str, Any]) -> Tolerances:
        defaults = Tolerances()
        return Tolerances(
            rank_cutoff=float(raw.get("rank_cutoff", defaults.rank_cutoff)),
            assert_tol=float(raw.get("assert_tol", defaults.assert_tol)),
            comm_tol=float(raw.get("comm_tol", defaults.comm_tol)),
        )

    def _parse_examples(
        self, raw: Dict[str, Any], seed: int, trials: int
    ) -> ExampleParams:
        """Parse example parameters; complex values are [re, im] pairs."""
        defaults = ExampleParams()

        counter_1 = dict(defaults.counterexample_1)
        for key, value in (raw.get("counterexample_1") or {}).items():
            if key not in counter_1:
                raise ConfigurationError(
                    f"Invalid counterexample_1 parameter: '{key}'. "
                    f"Valid names: {', '.join(counter_1)}"
                )
            if key in COUNTER_1_SCALARS:
                counter_1[key] = pair_to_complex(value)
                continue
            try:
                counter_1[key] = matrix_from_document(value)
            except ValueError as e:
                raise MatrixFileError(f"counterexample_1.{key}: {e}") from None

        counter_2 = dict(defaults.counterexample_2)
        for key, value in (raw.get("counterexample_2") or {}).items():
            if key not in counter_2:
                raise ConfigurationError(
                    f"Invalid counterexample_2 block: '{key}'. "
                    f"Valid names: {', '.join(counter_2)}"
                )
            try:
                counter_2[key] = matrix_from_document(value)
            except ValueError as e:
                raise MatrixFileError(f"counterexample_2.{key}: {e}") from None

        return ExampleParams(
            epsilon=float(raw.get("epsilon", defaults.epsilon)),
            r=float(raw.get("r", defaults.r)),
            z=pair_to_complex(raw.get("z", defaults.z.real)),
            delta=float(raw.get("delta", defaults.delta)),
            search_trials=trials,
            seed=seed,
            counterexample_1=counter_1,
            counterexample_2=counter_2,
        )

    def _validate(self) -> None:
        """
        Validate that the configuration is internally consistent.

        Raises:
            ConfigurationError: If configuration has issues
        """
        blocks = self._config.examples.counterexample_2
        shapes = {name: m.shape for name, m in blocks.items()}
        if len(set(shapes.values())) != 1 or any(r != c for r, c in shapes.values()):
            raise ConfigurationError(
                f"counterexample_2 blocks must be square of one size, got {shapes}"
            )

    def get_summary(self) -> str:
        """
        Get a summary of the loaded configuration.

        Raises:
            RuntimeError: If load() hasn't been called yet
        """
        config = self.config
        tol = config.tolerances

        lines = [
            f"Configuration from: {self.config_path}",
            f"Tolerances: rank_cutoff={tol.rank_cutoff:g}, "
            f"assert_tol={tol.assert_tol:g}, comm_tol={tol.comm_tol:g}",
            f"ρ scan: {config.scan_radial} radii x {config.scan_angular} angles",
            f"Dilation window: {config.blocks} blocks, degree <= {config.max_degree}",
            f"Search: {config.search_trials} trials, seed {config.seed}, "
            f"branch search {'on' if config.branch_search else 'off'}",
        ]
        return "\n".join(lines)


def load_matrix(path: str | Path) -> ComplexMatrix:
    """
    Read a MatrixFile document.

    Raises:
        FileNotFoundError: If the file doesn't exist
        MatrixFileError: If the document is not valid YAML or not a valid matrix
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Matrix file not found: {path}")
    with open(path, "r") as f:
        try:
            doc = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise MatrixFileError(f"Invalid YAML in {path}: {e}") from None
    try:
        return matrix_from_document(doc)
    except (TypeError, ValueError) as e:
        raise MatrixFileError(f"{path}: {e}") from None


def dump_matrix(matrix: ComplexMatrix, path: str | Path) -> None:
    """Write ``matrix`` as a MatrixFile document."""
    with open(path, "w") as f:
        yaml.safe_dump(matrix_to_document(matrix), f, sort_keys=False)
