from fractions import Fraction

import pytest

from src.generator.instances import cycle, path, star
from src.geometry.metric import (
  MetricGraph,
  MetricTable,
  coarse_median,
  estimate_hyperbolicity,
  gromov_product,
  hyperbolicity_delta,
  weak_rough_geodesic_constant,
)


def graph_of(document: dict) -> MetricGraph:
  return MetricGraph(document["vertices"], document["edges"])


class TestMetricGraph:
  """Test graph metrics built from vertex and edge lists."""

  def test_path_distances(self):
    graph = graph_of(path(4))

    assert graph.size == 5
    assert graph.dist[0][4] == 4
    assert graph.diameter() == 4
    assert graph.edges == [(0, 1), (1, 2), (2, 3), (3, 4)]

  def test_disconnected_graph(self):
    """Test that a disconnected graph is rejected."""
    with pytest.raises(ValueError, match="not connected"):
      MetricGraph([0, 1, 2], [(0, 1)])

  @pytest.mark.parametrize(
    "edges,message",
    [
      ([(0, 0)], "self loop"),
      ([(0, 1), (1, 0)], "duplicate edge"),
      ([(0, 5)], "unknown vertex"),
    ],
  )
  def test_invalid_edges(self, edges, message):
    with pytest.raises(ValueError, match=message):
      MetricGraph([0, 1], edges)

  def test_empty_instance(self):
    with pytest.raises(ValueError, match="empty instance"):
      MetricGraph([], [])

  def test_index_of_unknown_label(self):
    graph = graph_of(path(2))

    with pytest.raises(ValueError, match="not in instance"):
      graph.index(7)

  def test_ball_masks(self):
    """Test cumulative ball masks around a vertex."""
    graph = graph_of(path(4))
    masks = graph.ball_masks()

    assert masks[0][0] == 0b00001
    assert masks[0][1] == 0b00011
    assert masks[2][2] == 0b11111


class TestMetricTable:
  """Test explicit distance tables."""

  def test_validate_triangle_inequality(self):
    table = MetricTable(["a", "b", "c"], [[0, 1, 5], [1, 0, 1], [5, 1, 0]])

    with pytest.raises(ValueError, match="triangle inequality"):
      table.validate()

  def test_validate_asymmetric(self):
    table = MetricTable(["a", "b"], [[0, 1], [2, 0]])

    with pytest.raises(ValueError, match="asymmetric"):
      table.validate()

  def test_duplicate_labels(self):
    with pytest.raises(ValueError, match="duplicate"):
      MetricTable(["a", "a"], [[0, 1], [1, 0]])

  def test_connectivity_scale(self):
    """Test the smallest scale at which the points form one cluster."""
    table = MetricTable(["a", "b", "c"], [[0, 2, 4], [2, 0, 2], [4, 2, 0]])

    assert table.connectivity_scale() == 2
    assert table.scale_graph(1).number_of_edges() == 0


class TestHyperbolicity:
  """Test the four-point hyperbolicity constant."""

  def test_tree_is_zero_hyperbolic(self):
    assert hyperbolicity_delta(graph_of(star(5))) == 0

  def test_four_cycle(self):
    assert hyperbolicity_delta(graph_of(cycle(4))) == 1

  def test_twelve_cycle(self):
    assert hyperbolicity_delta(graph_of(cycle(12))) == 3

  def test_estimate_is_exact_below_limit(self):
    delta, sampled = estimate_hyperbolicity(graph_of(cycle(6)), limit=10)

    assert delta == hyperbolicity_delta(graph_of(cycle(6)))
    assert not sampled

  def test_estimate_samples_above_limit(self):
    delta, sampled = estimate_hyperbolicity(graph_of(cycle(12)), limit=4, samples=500)

    assert sampled
    assert delta <= 3


class TestGromovProduct:
  """Test Gromov products and coarse medians."""

  def test_gromov_product_on_path(self):
    graph = graph_of(path(4))

    assert gromov_product(graph, 0, 2, 4) == 2
    assert gromov_product(graph, 2, 0, 4) == 0

  def test_gromov_product_on_cycle_is_rational(self):
    graph = graph_of(cycle(3))

    assert gromov_product(graph, 0, 1, 2) == Fraction(1, 2)

  def test_coarse_median_of_star_leaves(self):
    """Test that the centre is the median of three leaves."""
    assert coarse_median(graph_of(star(3)), 1, 2, 3) == 0

  def test_unknown_point(self):
    with pytest.raises(ValueError, match="not in instance"):
      gromov_product(graph_of(path(2)), 0, 1, 9)

  def test_weak_rough_geodesic_constant(self):
    assert weak_rough_geodesic_constant(graph_of(path(6))) == 0
