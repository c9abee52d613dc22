import json
import tempfile
from pathlib import Path

import pytest

from src.core.config import THREADS_ENV, RunConfig


class TestRunConfig:
  """Test configuration system functionality."""

  def test_default_config(self):
    """Test default configuration values."""
    config = RunConfig()

    assert config.K == 1
    assert config.spacing_factor == 10
    assert config.include_ball_variant is True
    assert config.L is None
    assert config.epsilon is None
    assert config.closure_cap == 2000
    assert config.chain_cap == 12
    assert config.exhaustive_limit == 300
    assert config.triple_limit == 40
    assert config.seed == 0
    assert config.threads == 1
    assert config.max_distortion is None

  def test_config_from_file_nonexistent(self):
    """Test loading config from non-existent file returns default."""
    with tempfile.TemporaryDirectory() as temp_dir:
      config_path = Path(temp_dir) / "nonexistent.json"
      config = RunConfig.from_file(config_path)

      assert config.K == 1

  def test_config_from_file_valid(self):
    """Test loading config from valid JSON file."""
    with tempfile.TemporaryDirectory() as temp_dir:
      config_path = Path(temp_dir) / "config.json"

      config_data = {"K": 2, "L": 4, "refine_K": [3, 4], "output_dir": "reports"}

      with open(config_path, "w") as f:
        json.dump(config_data, f)

      config = RunConfig.from_file(config_path)

      assert config.K == 2
      assert config.L == 4
      assert config.refine_K == [3, 4]
      assert config.output_dir == Path("reports")
      # Unspecified values should remain default
      assert config.chain_cap == 12

  def test_config_from_file_invalid_json(self):
    """Test loading config from invalid JSON file raises error."""
    with tempfile.TemporaryDirectory() as temp_dir:
      config_path = Path(temp_dir) / "invalid.json"

      with open(config_path, "w") as f:
        f.write("{ invalid json")

      with pytest.raises(ValueError, match="Invalid config file format"):
        RunConfig.from_file(config_path)

  def test_config_from_file_unknown_key(self):
    """Unknown keys are rejected like malformed JSON."""
    with tempfile.TemporaryDirectory() as temp_dir:
      config_path = Path(temp_dir) / "config.json"
      config_path.write_text(json.dumps({"indent_size": 4}))

      with pytest.raises(ValueError, match="Invalid config file format"):
        RunConfig.from_file(config_path)

  def test_config_to_file(self):
    """Test saving config to file."""
    with tempfile.TemporaryDirectory() as temp_dir:
      config_path = Path(temp_dir) / "output.json"

      config = RunConfig(K=3, output_dir=Path(temp_dir) / "out")

      config.to_file(config_path)

      assert config_path.exists()

      with open(config_path) as f:
        data = json.load(f)

      assert data["K"] == 3
      assert data["L"] is None
      assert data["output_dir"] == str(Path(temp_dir) / "out")

  def test_config_round_trip_keeps_paths(self):
    """Paths are written as strings and read back as Paths."""
    with tempfile.TemporaryDirectory() as temp_dir:
      config_file = Path(temp_dir) / "nested" / "config.json"
      RunConfig(output_dir=Path("reports")).to_file(config_file)

      loaded = RunConfig.from_file(config_file)

      assert config_file.parent.exists()
      assert loaded.output_dir == Path("reports")

  def test_merge_with_options(self):
    """Test merging config with new options."""
    base_config = RunConfig(K=1, chain_cap=8)

    merged_config = base_config.merge_with_options(K=2, L=5)

    # Original config should be unchanged
    assert base_config.K == 1
    assert base_config.L is None

    assert merged_config.K == 2
    assert merged_config.L == 5
    assert merged_config.chain_cap == 8

  def test_merge_ignores_none(self):
    """None-valued options keep the current setting."""
    config = RunConfig(epsilon=2).merge_with_options(epsilon=None, seed=None)

    assert config.epsilon == 2
    assert config.seed == 0

  @pytest.mark.parametrize(
    "options",
    [{"K": 0}, {"closure_cap": 0}, {"chain_cap": -1}, {"threads": 0}, {"path_budget": 0}],
  )
  def test_invalid_values(self, options):
    """Caps and radii must be positive."""
    with pytest.raises(ValueError, match="must be positive"):
      RunConfig(**options)

  def test_merge_revalidates(self):
    with pytest.raises(ValueError, match="L must be non-negative"):
      RunConfig().merge_with_options(L=-1)

  def test_max_distortion_non_negative(self):
    assert RunConfig(max_distortion=0).max_distortion == 0
    with pytest.raises(ValueError, match="max_distortion must be non-negative"):
      RunConfig(max_distortion=-1)

  def test_threads_from_environment(self, monkeypatch):
    """MEDIANWALL_THREADS sets the worker count."""
    monkeypatch.setenv(THREADS_ENV, "4")

    assert RunConfig.from_env().threads == 4

  def test_threads_environment_must_be_integer(self, monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "many")

    with pytest.raises(ValueError, match="must be an integer"):
      RunConfig.from_env()
