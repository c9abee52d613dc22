import json
import os
from dataclasses import dataclass, fields
from pathlib import Path

THREADS_ENV = "MEDIANWALL_THREADS"


@dataclass
class RunConfig:
  """Configuration for a verification run."""

  # Wall construction
  K: int = 1
  spacing_factor: int = 10
  include_ball_variant: bool = True

  # Constants under test (None means derive them)
  L: int | None = None
  epsilon: int | None = None
  glue_m: int | None = None
  refine_K: list[int] | None = None
  max_distortion: int | None = None

  # Caps and budgets
  closure_cap: int = 2000
  chain_cap: int = 12
  path_budget: int | None = None
  search_budget: int = 200000
  exhaustive_limit: int = 300
  triple_limit: int = 40

  # Execution
  seed: int = 0
  threads: int = 1
  output_dir: Path | None = None

  def __post_init__(self):
    if self.K < 1:
      raise ValueError("K must be positive")
    if self.spacing_factor < 1:
      raise ValueError("spacing_factor must be positive")
    for name in ("closure_cap", "chain_cap", "search_budget", "exhaustive_limit", "triple_limit"):
      if getattr(self, name) <= 0:
        raise ValueError(f"{name} must be positive")
    if self.path_budget is not None and self.path_budget <= 0:
      raise ValueError("path_budget must be positive")
    if self.threads < 1:
      raise ValueError("threads must be positive")
    if self.L is not None and self.L < 0:
      raise ValueError("L must be non-negative")
    if self.epsilon is not None and self.epsilon < 0:
      raise ValueError("epsilon must be non-negative")
    if self.glue_m is not None and self.glue_m < 0:
      raise ValueError("glue_m must be non-negative")
    if self.max_distortion is not None and self.max_distortion < 0:
      raise ValueError("max_distortion must be non-negative")
    if isinstance(self.output_dir, str):
      self.output_dir = Path(self.output_dir)

  @classmethod
  def from_file(cls, config_path: Path) -> "RunConfig":
    """Load configuration from JSON file."""
    if not config_path.exists():
      return cls()

    try:
      with open(config_path, encoding="utf-8") as f:
        data = json.load(f)
      return cls(**data)
    except (json.JSONDecodeError, TypeError) as e:
      raise ValueError(f"Invalid config file format: {e}")

  @classmethod
  def from_env(cls, base: "RunConfig | None" = None) -> "RunConfig":
    """Apply environment overrides (worker count) on top of a base config."""
    config = base or cls()
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
      return config
    try:
      threads = int(raw)
    except ValueError:
      raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}")
    return config.merge_with_options(threads=threads)

  def to_dict(self) -> dict:
    data = {}
    for f in fields(self):
      value = getattr(self, f.name)
      data[f.name] = str(value) if isinstance(value, Path) else value
    return data

  def to_file(self, config_path: Path) -> None:
    """Save configuration to JSON file."""
    config_path.parent.mkdir(parents=True, exist_ok=True)

    with open(config_path, "w", encoding="utf-8") as f:
      json.dump(self.to_dict(), f, indent=2)

  def merge_with_options(self, **options) -> "RunConfig":
    """Create new config with updated options; None values keep the current setting."""
    data = {}
    for field_name in self.__dataclass_fields__:
      value = options.get(field_name)
      data[field_name] = getattr(self, field_name) if value is None else value
    return RunConfig(**data)
