import pytest

from src.generator.instances import path, star
from src.geometry.metric import MetricGraph
from src.quasitree.instance import QuasitreeInstance
from src.utils import bitset
from src.wallspace.chains import ChainIndex, PairMax
from src.wallspace.dual import DualSpace, median_closure
from src.wallspace.systems import SingletonSystem
from src.wallspace.ultrafilter import point_ultrafilter

BUDGET = 200000


def quasitree(document: dict, K: int = 1) -> QuasitreeInstance:
  graph = MetricGraph(document["vertices"], document["edges"])
  return QuasitreeInstance.build(graph, K)


@pytest.fixture(scope="module")
def path20() -> QuasitreeInstance:
  return quasitree(path(20))


class TestChainIndex:
  """Test longest-chain distances of the disparate system."""

  def test_path_distance_is_bounded_by_spacing(self, path20):
    """Test that centres ten apart allow at most two walls along P20."""
    index = path20.chain_index(BUDGET)
    space = path20.space
    ends = point_ultrafilter(space, 0), point_ultrafilter(space, 20)

    search = index.distance(*ends)

    assert search.length == 2
    assert search.complete
    walls = index.chain_walls(search)
    assert space.is_chain_set(walls)
    assert path20.system.contains(walls)

  def test_distance_is_symmetric_and_cached(self, path20):
    index = path20.chain_index(BUDGET)
    x = point_ultrafilter(path20.space, 3)
    y = point_ultrafilter(path20.space, 17)

    assert index.dist(x, y) == index.dist(y, x)
    assert index.dist(x, x) == 0

  def test_long_path_distance(self):
    """Test that P100 fits ten disparate walls between its ends."""
    instance = quasitree(path(100))
    index = instance.chain_index(BUDGET)
    space = instance.space

    assert index.dist(point_ultrafilter(space, 0), point_ultrafilter(space, 100)) == 10

  def test_singleton_system(self, path20):
    index = ChainIndex(SingletonSystem(path20.space))
    space = path20.space

    assert index.dist(point_ultrafilter(space, 0), point_ultrafilter(space, 20)) == 1

  def test_pair_max_without_crossings(self, path20):
    pair_max = PairMax(path20.chain_index(BUDGET))

    assert set(pair_max.table().values()) == {0}
    assert pair_max.complete


class TestDualSpace:
  """Test working duals built by median closure."""

  def test_path_dual_is_the_path(self, path20):
    """Test that the dual of P20 has exactly its vertices, in vertex order."""
    dual = DualSpace.from_points(path20.space, path20.chain_index(BUDGET), cap=2000)

    assert dual.size == 21
    assert not dual.capped
    assert dual.table.labels == [str(v) for v in range(21)]
    assert [dual.point_of(v) for v in range(21)] == list(range(21))
    assert max(max(row) for row in dual.dist) <= 2

  def test_star_dual(self):
    """Test the star of three leaves: centre and leaves at pairwise distance one."""
    instance = quasitree(star(3))
    dual = DualSpace.from_points(instance.space, instance.chain_index(BUDGET), cap=100)

    assert len(instance.space.walls) == 3
    assert dual.size == 4
    assert all(dual.dist[i][j] == 1 for i in range(4) for j in range(4) if i != j)
    assert dual.median(1, 2, 3) == dual.point_of(0)

  def test_closure_seed_comes_first(self, path20):
    space = path20.space
    seed = [point_ultrafilter(space, s) for s in range(space.size)]

    closure = median_closure(space, seed, cap=100)

    assert closure.points[: len(seed)] == seed

  def test_closure_cap(self, path20):
    space = path20.space
    seed = [point_ultrafilter(space, s) for s in range(space.size)]

    closure = median_closure(space, seed, cap=5)

    assert closure.capped
    assert len(closure.points) == 5

  def test_closure_needs_positive_cap(self, path20):
    with pytest.raises(ValueError, match="cap must be positive"):
      median_closure(path20.space, [0], cap=0)

  def test_to_json(self):
    instance = quasitree(path(4))
    dual = DualSpace.from_points(instance.space, instance.chain_index(BUDGET), cap=100)

    data = dual.to_json()

    assert data["system"] == "D"
    assert data["labels"] == ["0", "1", "4"]
    assert len(data["points"]) == 3
    assert bitset.popcount(dual.ball_mask(0, 0)) == 1
