from pathlib import Path

import pytest

from src.generator.instances import path, star
from src.geometry.metric import MetricGraph
from src.parser.instance_parser import InstanceParser
from src.quasitree.instance import QuasitreeInstance
from src.wallspace.dual import DualSpace
from src.wallspace.systems import SingletonSystem
from src.wallspace.verifiers import (
  check_dual_metric,
  check_dual_suites,
  check_gates,
  check_gluable,
  check_helly,
  check_median_suite,
  check_separated,
  check_subset_closed,
  measure_gluing_constant,
)

BUDGET = 200000
FIXTURES = Path(__file__).parent.parent / "test_fixtures" / "negative"


def quasitree(document: dict, K: int = 1) -> QuasitreeInstance:
  return QuasitreeInstance.build(MetricGraph(document["vertices"], document["edges"]), K)


@pytest.fixture(scope="module")
def path20() -> QuasitreeInstance:
  return quasitree(path(20))


@pytest.fixture(scope="module")
def path20_dual(path20) -> DualSpace:
  return DualSpace.from_points(path20.space, path20.chain_index(BUDGET), cap=2000)


class TestSystemChecks:
  """Test gluability, separation and subset closure."""

  def test_path_is_one_gluable(self, path20):
    """Test that P20 is too short for two disjoint disparate pairs in a row."""
    result = check_gluable(path20.system, path20.chain_index(BUDGET), 1)

    assert result.name == "D 1-gluable"
    assert result.passed
    assert not result.partial

  def test_gluing_obstruction(self):
    """Test that two disparate pairs whose union has no disparate triple are caught."""
    parsed = InstanceParser().parse(FIXTURES / "bad_gluability.json")
    source = parsed.graph
    instance = QuasitreeInstance.build(source.graph, source.K, walls=source.walls)

    result = check_gluable(instance.system, instance.chain_index(BUDGET), 1)

    assert not result.passed
    assert result.witness == {"c1": [0, 1], "c2": [3, 4], "m": 1}
    assert result.details["centers"] == {0: [0], 1: [20], 3: [5], 4: [25]}

  def test_gluing_constant_past_two(self):
    """Test that three disjoint conflicts keep the system from gluing at m = 2."""
    parsed = InstanceParser().parse(FIXTURES / "bad_gluability.json")
    source = parsed.graph
    instance = QuasitreeInstance.build(source.graph, source.K, walls=source.walls)

    result = measure_gluing_constant(instance.system, instance.chain_index(BUDGET), 2, gating=True)

    assert not result.passed
    assert result.gating
    assert result.details["minimal_m"] is None
    assert result.witness == {"c1": [0, 1, 2], "c2": [3, 4, 5], "m": 2}
    assert result.details["obstruction_1"] == {"c1": [0, 1], "c2": [3, 4], "m": 1}

  def test_gluing_constant_on_path(self, path20):
    result = measure_gluing_constant(path20.system, path20.chain_index(BUDGET), 2)

    assert result.passed
    assert not result.gating
    assert result.details["minimal_m"] == 1
    assert "obstruction_0" in result.details

  def test_chain_cap_makes_check_partial(self, path20):
    result = check_gluable(path20.system, path20.chain_index(BUDGET), 1, chain_cap=1)

    assert result.passed
    assert result.partial

  def test_star_is_gluable(self):
    """Test that a system of single walls glues by dropping one."""
    instance = quasitree(star(3))

    result = check_gluable(instance.system, instance.chain_index(BUDGET), 1)

    assert result.passed

  def test_separated_without_crossings(self, path20):
    result = check_separated(path20.system, path20.chain_index(BUDGET), 0)

    assert result.passed
    assert result.details["worst"] == 0
    assert result.name == "D 0-separated"

  def test_subset_closed(self, path20):
    system = SingletonSystem(path20.space)

    assert check_subset_closed(system, [[0], [5]]).passed
    result = check_subset_closed(path20.system, [[0, 1]])
    assert result.passed


class TestDualChecks:
  """Test the metric, median and gate suites on a working dual."""

  def test_dual_metric(self, path20_dual):
    assert check_dual_metric(path20_dual, BUDGET).passed

  def test_dual_metric_sampled(self, path20_dual):
    result = check_dual_metric(path20_dual, budget=100, seed=4)

    assert result.passed
    assert result.partial

  def test_median_suite(self, path20_dual):
    closed, axioms, convex = check_median_suite(path20_dual, BUDGET)

    assert closed.name == "median closed"
    assert closed.passed
    assert axioms.passed
    assert convex.passed

  def test_halfspace_gates(self, path20_dual):
    result = check_gates(path20_dual, BUDGET)

    assert result.passed
    assert not result.partial

  def test_suites_on_capped_dual_are_advisory(self, path20):
    """Test that a closure stopped at its cap cannot fail the median and gate suites."""
    dual = DualSpace.from_points(path20.space, path20.chain_index(BUDGET), cap=5)

    checks = check_dual_suites(dual, BUDGET)

    assert dual.capped
    assert [c.name for c in checks] == [
      "median closed",
      "median axioms",
      "halfspace convexity",
      "halfspace gates",
      "balls gated",
      "ball helly",
    ]
    assert all(c.passed and c.partial and not c.gating for c in checks)
    gates = checks[3]
    assert "undecided" in gates.details
    assert gates.witness is None
    assert gates.message == "undecided: working dual capped at 5 points"

  def test_suites_on_full_dual_gate(self, path20_dual):
    checks = check_dual_suites(path20_dual, BUDGET)

    assert not path20_dual.capped
    assert all(c.passed and c.gating for c in checks)

  def test_helly_on_star(self):
    instance = quasitree(star(3))
    dual = DualSpace.from_points(instance.space, instance.chain_index(BUDGET), cap=100)

    assert check_helly(dual, BUDGET).passed
