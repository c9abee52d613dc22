import pytest

from src.core.config import RunConfig
from src.generator.instances import grid, path, staircase
from src.parser.instance_parser import InstanceParser
from src.product.grids import is_grid
from src.product.instance import ProductInstance
from src.product.lemmas import check_grid, check_l1_law, check_system_comparison, distance_table
from src.product.refinement import check_K_sweep, restrict_to_color


def product_of(document: dict, **options) -> ProductInstance:
  spec = InstanceParser().parse(document).product
  return ProductInstance.build(spec.factors, spec.Ks, spec.points, **options)


@pytest.fixture(scope="module")
def stairs() -> ProductInstance:
  return product_of(staircase(4))


class TestInducedWalls:
  """Test walls pulled back from the factors."""

  def test_staircase_walls(self, stairs):
    """Test that each factor wall of P4 induces one wall on the staircase."""
    assert len(stairs.points) == 9
    assert len(stairs.space.walls) == 4
    assert stairs.space.colors == [0, 1]
    assert [o.color for o in stairs.origin] == [w.color for w in stairs.space.walls]

  def test_staircase_is_monotone(self, stairs):
    assert not any(stairs.space.cross)

  def test_grid_walls_cross_across_colors(self):
    instance = product_of(grid(4))
    space = instance.space

    for h in space.walls:
      for k in space.walls:
        if h.color != k.color:
          assert space.crosses(h.id, k.id)

  def test_one_K_per_factor(self):
    spec = InstanceParser().parse(staircase(4)).product

    with pytest.raises(ValueError, match="one K per factor"):
      ProductInstance.build(spec.factors, [1], spec.points)

  def test_duplicate_points(self):
    spec = InstanceParser().parse(staircase(4)).product

    with pytest.raises(ValueError, match="duplicate points"):
      ProductInstance.build(spec.factors, spec.Ks, spec.points + [spec.points[0]])

  def test_factor_side(self, stairs):
    """Test the side of a factor vertex agrees with the induced wall."""
    for wall in stairs.space.walls:
      for s, point in enumerate(stairs.points):
        vertex = point[wall.color]
        assert stairs.factor_side(wall.id, vertex) == wall.side_of_point(s)


class TestGridBound:
  """Test the exact grid bound and the C system it feeds."""

  def test_staircase_has_no_grid(self, stairs):
    assert stairs.grid.raw == 0
    assert stairs.L == 3
    assert check_grid(stairs).passed

  def test_full_grid(self):
    """Test the full grid P4 x P4, where each color has only single-wall chains."""
    instance = product_of(grid(4))

    assert instance.grid.raw == 1
    assert is_grid(instance, instance.grid.d1, instance.grid.d2)
    assert check_grid(instance).passed

  def test_supplied_L_below_the_grid(self):
    instance = product_of(grid(4), L=0)

    result = check_grid(instance)

    assert instance.L == 0
    assert not result.passed
    assert result.witness is not None


class TestSystemComparison:
  """Test the distance laws of D1, D and C."""

  def test_l1_law_and_monotonicity(self, stairs):
    points = stairs.point_ultrafilters()
    d1 = distance_table(stairs.d1, points)
    d = distance_table(stairs.disparate_index, points)
    c = distance_table(stairs.lchain_index, points)

    assert check_l1_law(stairs, d1).passed
    monotone, comparison = check_system_comparison(stairs, d1, d, c)
    assert monotone.passed
    assert comparison.passed

  def test_factor_distance_is_symmetric(self, stairs):
    n = len(stairs.points)

    for s in range(n):
      for t in range(n):
        assert stairs.factor_distance(s, t) == stairs.factor_distance(t, s)

  def test_regime(self, stairs):
    regime = stairs.regime()

    assert regime["m"] == 2
    assert regime["points"] == 9
    assert regime["spacing"] == [10, 10]


class TestRefinement:
  """Test the K-chain refinements."""

  def test_K_sweep_is_monotone(self, stairs):
    result = check_K_sweep(stairs, [2, 0, 1])

    assert result.passed
    assert result.details["K"] == [0, 1, 2]

  def test_restrict_to_color(self, stairs):
    sub, full_ids = restrict_to_color(stairs.space, 1)

    assert len(sub.walls) == 2
    assert all(stairs.space.walls[i].color == 1 for i in full_ids)

  def test_negative_K(self, stairs):
    with pytest.raises(ValueError, match="non-negative"):
      stairs.refinement(-1)

  def test_refinement_is_cached(self, stairs):
    assert stairs.refinement(2) is stairs.refinement(2)


class TestProductConfig:
  def test_spacing_override(self):
    document = staircase(4)
    instance = product_of(document, spacing=[3, 4], spacing_factor=RunConfig().spacing_factor)

    assert [f.spacing for f in instance.factors] == [3, 4]

  def test_factor_graphs_keep_labels(self):
    document = grid(4)
    instance = product_of(document)

    assert instance.space.labels[0] == (0, 0)
    assert instance.factors[0].graph.labels == path(4)["vertices"]
