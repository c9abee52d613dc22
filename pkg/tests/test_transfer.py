import pytest

from src.core.config import RunConfig
from src.core.processor import InstanceProcessor
from src.cylinders.stability import Ball, StabilityEngine
from src.cylinders.transfer import (
  PointMap,
  TransferredCylinders,
  collapse_map,
  identity_map,
  subdivision_map,
  transfer_cylinders,
  transferred_cover,
)
from src.generator.instances import cycle, star
from src.geometry.metric import MetricGraph, coarse_median
from src.parser.instance_parser import InstanceParser
from src.utils import bitset


def graph_of(document: dict) -> MetricGraph:
  return MetricGraph(document["vertices"], document["edges"])


def geodesic_union(table: MetricGraph):
  d = table.dist
  return lambda a, b: bitset.from_indices(
    p for p in range(table.size) if d[a][p] + d[p][b] == d[a][b]
  )


class TestPointMap:
  """Test point maps between finite metric spaces."""

  def test_identity(self):
    table = graph_of(star(3))
    mapping = identity_map(table)

    assert mapping.is_identity
    assert mapping.distortion() == (0, None)
    assert mapping.psi == [0, 1, 2, 3]

  def test_one_image_per_point(self):
    table = graph_of(star(3))

    with pytest.raises(ValueError, match="one image per source point"):
      PointMap(table, table, [0])

  def test_image_outside_target(self):
    table = graph_of(star(3))

    with pytest.raises(ValueError, match="not in instance"):
      PointMap(table, table, [0, 1, 2, 9])

  def test_subdivision(self):
    """Test that subdividing the star doubles distances between original vertices."""
    table = graph_of(star(3))
    mapping = subdivision_map(table)

    assert mapping.source.size == 7
    assert mapping.scale == 2
    assert mapping.phi[:4] == [0, 1, 2, 3]
    assert mapping.source.dist[1][2] == 4
    assert not mapping.is_identity
    assert mapping.psi[:4] == [0, 1, 2, 3]

  def test_collapse(self):
    """Test that the star contracts one spoke and keeps the other leaves apart."""
    table = graph_of(star(3))
    mapping = collapse_map(table)

    assert mapping.source.size == 3
    assert list(mapping.source.labels) == ["0+1", "2", "3"]
    assert mapping.phi == [0, 2, 3]
    assert mapping.scale == 1
    assert mapping.distortion() == (0, None)
    assert mapping.psi == [0, 0, 1, 2]

  def test_distortion_limit(self):
    mapping = subdivision_map(graph_of(star(3)))
    worst, pair = mapping.distortion()

    assert worst >= 1
    assert pair is not None
    with pytest.raises(ValueError, match="not a quasiisometry"):
      transfer_cylinders(mapping, lambda a, b: 0, max_distortion=worst - 1)


class TestTransferredCylinders:
  """Test cylinders pulled back along a point map."""

  def test_identity_pullback(self):
    table = graph_of(cycle(6))
    cylinder = geodesic_union(table)

    pulled = transfer_cylinders(identity_map(table), cylinder)

    assert all(pulled.mask(a, b) == cylinder(a, b) for a in range(6) for b in range(6))

  def test_thickened_pullback(self):
    table = graph_of(cycle(6))
    cylinder = geodesic_union(table)

    pulled = transfer_cylinders(identity_map(table), cylinder, kappa=1)

    assert bitset.to_indices(pulled.mask(0, 0)) == [0, 1, 5]

  def test_negative_kappa(self):
    table = graph_of(cycle(6))

    with pytest.raises(ValueError, match="kappa"):
      TransferredCylinders(identity_map(table), geodesic_union(table), -1)

  def test_cover_moves_unchanged_under_identity(self):
    table = graph_of(cycle(6))
    cylinder = geodesic_union(table)
    engine = StabilityEngine(table, cylinder, lambda x, y, z: coarse_median(table, x, y, z), 3)
    x_cover = engine.cover(0, 3, 2, R=1)

    moved = transferred_cover(engine, x_cover, engine, identity_map(table), 0, 3, 2)

    assert moved.balls == [Ball(4, 1)]
    assert (moved.x, moved.y, moved.z) == (0, 2, 3)


class TestTransferPipeline:
  """Test the transfer checks inside the cylinder pipeline."""

  def test_identity_transfer(self):
    parsed = InstanceParser().load("star(3)")

    run = InstanceProcessor(RunConfig()).cylinders(parsed, transfer="identity")

    assert run.report.get("identity transfer").passed
    assert run.report.get("transfer ball count").passed
    assert run.report.get("transfer recheck").passed
    assert run.transfer_certificate.k == run.certificate.k
    assert run.report.parameters["transfer"] == {"map": "identity", "kappa": 0}

  def test_subdivision_transfer(self):
    """Test the star dual, where all four points sit at distance one, subdivided."""
    parsed = InstanceParser().load("star(3)")
    processor = InstanceProcessor(RunConfig())

    run = processor.cylinders(parsed, transfer="subdivision")
    counts = run.report.get("transfer ball count")

    assert len(run.transfer_labels) == 10
    assert counts.passed
    assert counts.details["scale"] == 2
    assert counts.details["points"] == 10
    assert run.report.get("transfer recheck").passed
    data = processor.certificate_json(run)
    assert data["transfer"]["map"] == "subdivision"

  def test_collapse_transfer(self):
    """Test the star dual, where all four points sit at distance one, collapsed in pairs."""
    parsed = InstanceParser().load("star(3)")
    processor = InstanceProcessor(RunConfig())

    run = processor.cylinders(parsed, transfer="collapse")

    assert run.transfer_labels == ["0+1", "2+3"]
    assert run.report.get("transfer ball count").details["points"] == 2
    assert processor.certificate_json(run)["transfer"]["map"] == "collapse"

  def test_distorting_map_rejected(self):
    parsed = InstanceParser().load("star(3)")
    processor = InstanceProcessor(RunConfig(max_distortion=0))

    with pytest.raises(ValueError, match="not a quasiisometry at distortion 0"):
      processor.cylinders(parsed, transfer="subdivision")

  def test_distortion_within_limit(self):
    parsed = InstanceParser().load("star(3)")

    run = InstanceProcessor(RunConfig(max_distortion=0)).cylinders(parsed, transfer="identity")

    assert run.report.parameters["transfer"] == {"map": "identity", "kappa": 0, "max_distortion": 0}
