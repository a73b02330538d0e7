import json
import os
import threading
import tomllib
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.exceptions import UsageError


def get_project_root() -> Path:
    """Get the project root directory"""
    return Path(__file__).resolve().parent.parent


PROJECT_ROOT = get_project_root()
THREADS_ENV = "TGRAPH_THREADS"


class FeatureConfig(BaseModel):
    """Which geometric and raster features describe a node"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    include_log_size: bool = Field(
        False, description="Append ln(w/W) and ln(h/H) to the base features"
    )
    patch_grid: Optional[int] = Field(
        None,
        ge=1,
        description="Side length of the mean-intensity grid sampled from a raster",
    )

    @property
    def dim(self) -> int:
        """Feature width d implied by this configuration"""
        extra = 2 if self.include_log_size else 0
        patches = self.patch_grid**2 if self.patch_grid else 0
        return 4 + extra + patches


class TrainConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    learning_rate: float = Field(0.1, gt=0, description="Gradient step size")
    momentum: float = Field(0.9, ge=0, lt=1, description="Heavy-ball momentum")
    epochs: int = Field(500, ge=1, description="Full-batch updates to perform")
    seed: int = Field(0, ge=0, description="Seed for parameter initialization")
    hidden: int = Field(64, ge=1, description="Hidden width h of each GCN head")
    loss: Literal["ce", "focal"] = Field("focal", description="Ordinal loss")
    focal_variant: Literal["as-printed", "conventional"] = Field(
        "conventional",
        description="Modulating factor used for thresholds the index does not pass",
    )
    decode_threshold: float = Field(
        0.5, gt=0, lt=1, description="Probability above which a threshold counts"
    )
    alpha: float = Field(3.0, gt=0, description="Adjacency adjustment factor")
    prune_k: Optional[int] = Field(
        None, ge=1, description="Keep only k*N strongest edges per graph"
    )
    architecture: Literal["gcn", "linear"] = Field(
        "gcn", description="linear disables message passing"
    )
    t_row: Optional[int] = Field(None, ge=2, description="Row classes override")
    t_col: Optional[int] = Field(None, ge=2, description="Column classes override")
    log_every: int = Field(50, ge=1, description="Epochs between loss log lines")
    features: FeatureConfig = Field(default_factory=FeatureConfig)


class GenConfig(BaseModel):
    """Configuration for the synthetic table generator"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    count: int = Field(100, ge=1, description="Number of tables")
    max_rows: int = Field(8, ge=1, description="Largest row count drawn")
    max_cols: int = Field(8, ge=1, description="Largest column count drawn")
    span_prob: float = Field(0.0, ge=0, le=1, description="Merge probability")
    image_w: int = Field(480, ge=1, description="Table image width in pixels")
    image_h: int = Field(480, ge=1, description="Table image height in pixels")
    jitter: float = Field(
        0.1, ge=0, lt=0.4, description="Fractional separator perturbation"
    )
    row_weighting: Literal["uniform", "long_tail"] = Field(
        "uniform", description="Distribution of table sizes"
    )
    seed: int = Field(0, ge=0, description="Generator seed")
    with_text: bool = Field(False, description="Fill cell texts with r{row}c{col}")


class SpatialConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    open_first: bool = Field(False, description="Apply a 3x3 opening first")
    min_area: int = Field(4, ge=0, description="Drop components below this size")


class RuntimeSettings(BaseModel):
    """Process-level settings"""

    threads: int = Field(1, ge=1, description="Worker threads for parallel maps")
    log_level: str = Field("INFO", description="stderr log level")
    log_dir: Optional[str] = Field(None, description="Directory for log files")


PROFILES: Dict[str, Dict[str, Any]] = {
    "default": {"alpha": 3.0, "prune_k": None, "open_first": False},
    "historical": {"alpha": 10.0, "prune_k": 8, "open_first": True},
}


def _flat_keys() -> Dict[str, List[Tuple[str, str]]]:
    keys: Dict[str, List[Tuple[str, str]]] = {}
    sections = {
        "train": TrainConfig,
        "features": FeatureConfig,
        "datagen": GenConfig,
        "spatial": SpatialConfig,
    }
    for section, model in sections.items():
        for name in model.model_fields:
            if name == "features":
                continue
            keys.setdefault(name, []).append((section, name))
    # the CLI spells open_first as --open
    keys["open"] = keys.pop("open_first")
    return keys


FLAT_KEYS = _flat_keys()


def normalize_key(key: str) -> str:
    """Map a flag-style key (kebab-case, optional leading dashes) to its flat name"""
    name = key.lstrip("-").replace("-", "_")
    if name == "open_first":
        name = "open"
    return name


class RunConfig(BaseModel):
    """Everything one CLI invocation needs, after all overrides"""

    model_config = ConfigDict(frozen=True)

    profile: Literal["default", "historical"] = "default"
    train: TrainConfig = Field(default_factory=TrainConfig)
    datagen: GenConfig = Field(default_factory=GenConfig)
    spatial: SpatialConfig = Field(default_factory=SpatialConfig)


class Config:
    _instance = None
    _lock = threading.Lock()
    _initialized = False

    def __new__(cls):
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if not self._initialized:
            with self._lock:
                if not self._initialized:
                    self._raw: Dict[str, Any] = {}
                    self._load_initial_config()
                    self._initialized = True

    @staticmethod
    def _get_config_path() -> Optional[Path]:
        root = PROJECT_ROOT
        config_path = root / "config" / "config.toml"
        if config_path.exists():
            return config_path
        example_path = root / "config" / "config.example.toml"
        if example_path.exists():
            return example_path
        return None

    def _load_config(self) -> dict:
        config_path = self._get_config_path()
        if config_path is None:
            return {}
        with config_path.open("rb") as f:
            return tomllib.load(f)

    def _load_initial_config(self):
        self._raw = self._load_config()
        runtime = dict(self._raw.get("runtime", {}))
        try:
            runtime["threads"] = threads_from_env()
        except UsageError:
            # reported when the CLI calls refresh_threads()
            runtime["threads"] = 1
        self._runtime = RuntimeSettings(**runtime)

    def section(self, name: str) -> Dict[str, Any]:
        """Raw default values of one TOML section"""
        return dict(self._raw.get(name, {}))

    @property
    def runtime(self) -> RuntimeSettings:
        return self._runtime

    def refresh_threads(self) -> int:
        """Re-read TGRAPH_THREADS; returns the effective thread count"""
        self._runtime = self._runtime.model_copy(update={"threads": threads_from_env()})
        return self._runtime.threads

    @property
    def root_path(self) -> Path:
        """Get the root path of the application"""
        return PROJECT_ROOT


def threads_from_env() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return 1
    try:
        threads = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    if threads < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return threads


def load_run_file(path: Path) -> Dict[str, Any]:
    """Read a flat key/value run config (JSON, or TOML by suffix)"""
    try:
        if path.suffix == ".toml":
            with path.open("rb") as f:
                data = tomllib.load(f)
        else:
            data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        raise UsageError(f"Failed to load run config {path}: {e}") from None
    if not isinstance(data, dict):
        raise UsageError(f"Run config {path} must be a flat key/value document")
    flat: Dict[str, Any] = {}
    for key, value in data.items():
        name = normalize_key(key)
        if name not in FLAT_KEYS:
            raise UsageError(f"Unknown key {key!r} in run config {path}")
        if isinstance(value, (dict, list)):
            raise UsageError(f"Key {key!r} in run config {path} must be a scalar")
        flat[name] = value
    return flat


def build_run_config(
    overrides: Optional[Dict[str, Any]] = None,
    profile: Optional[str] = None,
    config_file: Optional[Path] = None,
) -> RunConfig:
    """Merge defaults <- TOML defaults <- profile <- run file <- flags.

    A profile only applies when one is named; without it the TOML values stand.
    """
    if profile is not None and profile not in PROFILES:
        raise UsageError(f"Unknown profile {profile!r}")
    sections: Dict[str, Dict[str, Any]] = {
        name: config.section(name)
        for name in ("train", "features", "datagen", "spatial")
    }

    def apply(flat: Dict[str, Any]) -> None:
        for key, value in flat.items():
            for section, field in FLAT_KEYS[normalize_key(key)]:
                sections[section][field] = value

    if profile is not None:
        apply({normalize_key(k): v for k, v in PROFILES[profile].items()})
    if config_file is not None:
        apply(load_run_file(config_file))
    if overrides:
        unknown = [k for k in overrides if normalize_key(k) not in FLAT_KEYS]
        if unknown:
            raise UsageError(f"Unknown settings: {', '.join(sorted(unknown))}")
        apply(overrides)

    try:
        features = FeatureConfig(**sections["features"])
        return RunConfig(
            profile=profile or "default",
            train=TrainConfig(**sections["train"], features=features),
            datagen=GenConfig(**sections["datagen"]),
            spatial=SpatialConfig(**sections["spatial"]),
        )
    except ValidationError as e:
        raise UsageError(f"Invalid configuration: {e}") from None


config = Config()
