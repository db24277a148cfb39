"""Run configuration for loopfinder."""

import json
import logging
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional, Union

from .depgraph import CycleLimits
from .models import LoopCriterion, Strategy
from .unfold import UnfoldBudget
from .verify import VerifyBounds

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ("plain", "json")


@dataclass
class RunConfig:
    """Settings of a prover run."""

    strategy: Strategy = Strategy.LMNE
    timeout: Optional[float] = 120.0
    max_iterations: Optional[int] = None
    max_generated: Optional[int] = 10_000_000
    max_cycles: int = 5000
    max_cycle_len: int = 16
    verify_depth: int = 25
    verify_nodes: int = 200_000
    output_format: str = "plain"
    criterion: LoopCriterion = LoopCriterion.SEMI_UNIFICATION
    jobs: int = 1
    show_timing: bool = True
    input_path: Optional[Path] = None

    def __post_init__(self) -> None:
        """Validate configuration values after initialization."""
        if isinstance(self.strategy, str):
            self.strategy = Strategy.from_name(self.strategy)
        if isinstance(self.criterion, str):
            self.criterion = LoopCriterion.from_name(self.criterion)
        if self.timeout is not None and self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.max_generated is not None and self.max_generated < 1:
            raise ValueError("max_generated must be at least 1")
        for name in ("max_cycles", "max_cycle_len", "verify_depth", "verify_nodes", "jobs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError("output_format must be plain or json")
        if self.input_path is not None:
            self.input_path = Path(self.input_path)
            if not self.input_path.exists():
                raise ValueError(f"input path does not exist: {self.input_path}")

    def budget(self) -> UnfoldBudget:
        """Return the unfolding budget."""
        return UnfoldBudget(self.timeout, self.max_iterations, self.max_generated)

    def cycle_limits(self) -> CycleLimits:
        """Return the simple-cycle enumeration limits."""
        return CycleLimits(self.max_cycles, self.max_cycle_len)

    def verify_bounds(self) -> VerifyBounds:
        """Return the witness verification bounds."""
        return VerifyBounds(self.verify_depth, self.verify_nodes)

    def to_dict(self) -> dict:
        """Return the settings as JSON-compatible values, without the input path."""
        data = asdict(self)
        data.pop("input_path")
        data["strategy"] = self.strategy.value
        data["criterion"] = self.criterion.value
        return data


def default_config_path() -> Path:
    """Return ~/.loopfinder/config.json."""
    return Path.home() / ".loopfinder" / "config.json"


def create_default_config(config_path: Optional[Path] = None) -> Path:
    """Create a configuration file holding the default settings.

    An existing file is left untouched.

    Args:
        config_path: Path to configuration file. If None, uses default location
                     (~/.loopfinder/config.json)

    Returns:
        Path to the configuration file

    Raises:
        OSError: If the file cannot be created
    """
    if config_path is None:
        config_path = default_config_path()
        config_path.parent.mkdir(mode=0o700, exist_ok=True)

    if config_path.exists():
        return config_path

    try:
        with open(config_path, "w") as f:
            json.dump(RunConfig().to_dict(), f, indent=2)
        config_path.chmod(0o600)
        logger.info(f"Created default configuration file: {config_path}")
        return config_path
    except OSError as e:
        raise OSError(f"Failed to create configuration file: {e}") from e


def load_config(config_path: Optional[Union[str, Path]] = None) -> RunConfig:
    """Load run settings from a JSON file.

    Keys not present in the file keep their defaults.

    Args:
        config_path: Path to configuration file. If None, uses default location
                     (~/.loopfinder/config.json)

    Returns:
        RunConfig object with loaded configuration

    Raises:
        FileNotFoundError: If config file doesn't exist
        ValueError: If config file is invalid or has unknown or invalid fields
    """
    config_path = Path(config_path) if config_path is not None else default_config_path()
    if not config_path.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    try:
        with open(config_path, "r") as f:
            config_data = json.load(f)
    except json.JSONDecodeError as e:
        raise ValueError(f"Invalid JSON in configuration file: {e}") from e

    if not isinstance(config_data, dict):
        raise ValueError("Configuration file must contain a JSON object")
    known = {f.name for f in fields(RunConfig)} - {"input_path"}
    unknown = sorted(set(config_data) - known)
    if unknown:
        raise ValueError(f"Unknown configuration field(s): {', '.join(unknown)}")

    try:
        return RunConfig(**config_data)
    except TypeError as e:
        raise ValueError(f"Invalid configuration field: {e}") from e
