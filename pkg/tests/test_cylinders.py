from pathlib import Path

import pytest

from src.core.config import RunConfig
from src.core.processor import InstanceProcessor, annotated_triple
from src.cylinders.cylinder import (
  CylinderFamily,
  MorseMeasurement,
  check_epsilon_morse,
  check_gate_diameters,
  check_interval_inclusions,
  check_interval_rough_geodesic,
  check_reversibility,
  sample_pairs,
)
from src.cylinders.intervals import IntervalModel
from src.cylinders.stability import (
  CLUSTERED,
  EMPTY,
  EXACT,
  Ball,
  StabilityEngine,
  TripleCover,
  global_certificate,
  recheck,
  select_triples,
  triple_key,
)
from src.generator.instances import cycle, path
from src.geometry.metric import MetricGraph, coarse_median
from src.parser.instance_parser import InstanceParser
from src.quasitree.instance import QuasitreeInstance
from src.utils import bitset
from src.wallspace.dual import DualSpace

FIXTURES = Path(__file__).parent.parent / "test_fixtures" / "negative"


@pytest.fixture(scope="module")
def path20_model() -> IntervalModel:
  document = path(20)
  instance = QuasitreeInstance.build(MetricGraph(document["vertices"], document["edges"]), 1)
  config = RunConfig()
  dual = DualSpace.from_points(
    instance.space, instance.chain_index(config.search_budget), config.closure_cap
  )
  return IntervalModel.for_quasitree(instance, dual, config)


def geodesic_cylinders(table: MetricGraph):
  """Union of all geodesics between two points."""
  d = table.dist

  def cylinder(a: int, b: int) -> int:
    return bitset.from_indices(p for p in range(table.size) if d[a][p] + d[p][b] == d[a][b])

  return cylinder


def hexagon_engine(bound: int) -> StabilityEngine:
  document = cycle(6)
  table = MetricGraph(document["vertices"], document["edges"])
  return StabilityEngine(
    table,
    geodesic_cylinders(table),
    lambda x, y, z: coarse_median(table, x, y, z),
    bound,
  )


class TestIntervalModel:
  """Test intervals and distant walls on the dual of P20."""

  def test_interval_is_a_segment(self, path20_model):
    interval = path20_model.interval(3, 9)

    assert bitset.to_indices(interval.points) == list(range(3, 10))
    assert path20_model.L == 3
    assert path20_model.m == 1

  def test_every_nonseparating_wall_is_distant(self, path20_model):
    """Test that without crossings I(x, y) is the interval itself."""
    distant = path20_model.distant_walls(3, 9)

    assert len(distant) == 14
    assert all(w.diameter == 0 for w in distant)
    assert path20_model.interval_I(3, 9) == path20_model.interval(3, 9).points

  def test_reach_and_filtration(self, path20_model):
    distant = path20_model.distant_walls(3, 9)

    reaches = {path20_model.reach(w, 3) for w in distant}
    assert reaches <= {0, path20_model.dual.dist[3][9]}
    assert len(path20_model.filtration(3, 9, 0)) <= len(distant)

  def test_interval_checks(self, path20_model):
    pairs = [(0, 20), (3, 9), (5, 5)]

    assert check_interval_inclusions(path20_model, pairs).passed
    assert check_gate_diameters(path20_model, pairs).passed
    assert check_interval_rough_geodesic(path20_model, pairs, 200000).passed

  def test_negative_inflation(self, path20_model):
    with pytest.raises(ValueError, match="cylinder_inflation"):
      IntervalModel(path20_model.dual, path20_model.index, 3, 1, [0], inflation=-1)


class TestCylinderFamily:
  """Test cylinders built on I(x, y)."""

  def test_zero_thickening(self, path20_model):
    family = CylinderFamily(path20_model, 0)

    cylinder = family.cylinder(9, 3)

    assert (cylinder.x, cylinder.y) == (3, 9)
    assert cylinder.C == path20_model.interval(3, 9).points
    assert cylinder.contains(5)
    assert not cylinder.contains(10)

  def test_thickening_grows_cylinder(self, path20_model):
    family = CylinderFamily(path20_model, 1)

    C = family.mask(3, 9)

    assert C == path20_model.neighbourhood(path20_model.interval(3, 9).points, 1)
    assert bitset.has_bit(C, 2)

  def test_reversible(self, path20_model):
    family = CylinderFamily(path20_model, 1)

    assert check_reversibility(family, [(0, 20), (3, 9), (4, 4)]).passed

  def test_negative_epsilon(self, path20_model):
    with pytest.raises(ValueError, match="epsilon"):
      CylinderFamily(path20_model, -1)

  def test_epsilon_within_morse(self, path20_model):
    measurement = MorseMeasurement(1, 2, {(3, 9): []}, anchored=1)
    family = CylinderFamily(path20_model, 1, measurement)

    result = check_epsilon_morse(family)

    assert result.passed
    assert not result.partial
    assert result.details["morse"] == 2

  def test_stray_geodesic_fails(self, path20_model):
    stray = {"pair": [2, 9], "epsilon": 2, "morse": 1}
    measurement = MorseMeasurement(2, 1, {(2, 9): []}, anchored=1, stray=stray)
    family = CylinderFamily(path20_model, 2, measurement)

    result = check_epsilon_morse(family)

    assert not result.passed
    assert result.witness["pair"] == [path20_model.label(2), path20_model.label(9)]
    assert result.witness["epsilon"] == 2

  def test_epsilon_below_measured_fails(self, path20_model):
    measurement = MorseMeasurement(1, 1, {(0, 5): [], (1, 5): []}, anchored=1)
    family = CylinderFamily(path20_model, 0, measurement)

    result = check_epsilon_morse(family)

    assert not result.passed
    assert result.partial
    assert result.message == "epsilon 0 is below the measured 1"

  def test_sample_pairs(self):
    assert len(sample_pairs(4)) == 10
    large = sample_pairs(100, seed=1)
    assert len(large) == 200
    assert large == sample_pairs(100, seed=1)

  def test_inflated_cylinders_fail_inclusions(self):
    """Test that building on a neighbourhood of I(x, y) is reported."""
    parsed = InstanceParser().load(str(FIXTURES / "inflated_cylinders.json"))
    processor = InstanceProcessor(RunConfig())
    instance = processor.build(parsed)
    model = IntervalModel.for_product(instance, processor.working_dual(instance), RunConfig())

    result = check_interval_inclusions(model, [(0, 0)])

    assert model.inflation == 3
    assert not result.passed
    assert result.witness["side"] == "beyond N_1([x, y])"


class TestStabilityEngine:
  """Test set-cover certificates on the hexagon with geodesic cylinders."""

  def test_difference(self):
    engine = hexagon_engine(3)

    assert engine.gromov_radius(0, 3, 2) == 2
    assert bitset.to_indices(engine.difference(0, 3, 2)) == [4, 5]
    assert engine.difference(0, 2, 2) == 0

  def test_profile(self):
    assert hexagon_engine(3).profile(0, 3, 2) == [2, 1, 1, 1]

  def test_cover_with_median_ball(self):
    """Test a single ball at the median clears the difference at large radius."""
    cover = hexagon_engine(3).cover(0, 3, 2, R=3)

    assert cover.mode == CLUSTERED
    assert cover.balls == [Ball(2, 3)]
    assert cover.median_ball

  def test_exact_cover_at_small_radius(self):
    cover = hexagon_engine(3).cover(0, 3, 2, R=1)

    assert cover.mode == EXACT
    assert cover.balls == [Ball(4, 1)]
    assert not cover.median_ball

  def test_greedy_cover(self):
    engine = hexagon_engine(3)

    assert engine.greedy_cover(engine.difference(0, 3, 2), 0) == [4, 5]

  def test_certificate_with_one_ball(self):
    """Test that bound 1 pushes the radius up to 1."""
    engine = hexagon_engine(1)

    certificate = global_certificate(engine, [(0, 3, 2), (0, 2, 3), (1, 1, 1)])

    assert certificate.triples_checked == 2
    assert (certificate.k, certificate.R) == (1, 1)
    assert certificate.pareto == [(0, 2), (1, 1)]
    assert certificate.passed
    assert certificate.covers[(1, 1, 1)].mode == EMPTY

  def test_certificate_json_modes(self):
    """Test that an exact-search cover is reported as the fallback, with its search kept."""
    engine = hexagon_engine(1)
    certificate = global_certificate(engine, [(0, 3, 2), (1, 1, 1)])

    data = certificate.to_json(engine.table.labels)

    assert data["triples"] == [
      {
        "x": 0,
        "y": 2,
        "z": 3,
        "balls": [{"center": 4, "radius": 1}],
        "mode": "greedy",
        "search": "exact",
      }
    ]
    assert data["proof_shaped_fraction"] == 0

  def test_proof_shaped_cover(self):
    engine = hexagon_engine(3)
    certificate = global_certificate(engine, [(0, 3, 2)], R=3)

    data = certificate.to_json(engine.table.labels)

    assert [t["mode"] for t in data["triples"]] == ["proof-shaped"]
    assert certificate.proof_shaped_fraction == 1

  def test_certificate_with_three_balls(self):
    certificate = global_certificate(hexagon_engine(3), [(0, 3, 2)])

    assert (certificate.k, certificate.R) == (2, 0)

  def test_threaded_certificate_matches(self):
    engine = hexagon_engine(1)
    triples, _ = select_triples(6, limit=10)

    single = global_certificate(engine, triples)
    threaded = global_certificate(engine, triples, threads=4)

    assert (single.k, single.R, single.pareto) == (threaded.k, threaded.R, threaded.pareto)

  def test_recheck(self):
    engine = hexagon_engine(3)

    assert recheck(engine, engine.cover(0, 3, 2, R=1))
    assert not recheck(engine, TripleCover(0, 2, 3, [], EMPTY, 2))

  def test_select_triples(self):
    triples, sampled = select_triples(3, limit=5)

    assert not sampled
    assert len(triples) == 3 * 6
    assert triple_key(0, 2, 1) == (0, 1, 2)


class TestCylinderPipeline:
  """Test the full cylinder pipeline on the star of three leaves."""

  @pytest.fixture(scope="class")
  def run(self):
    parsed = InstanceParser().load("star(3)")
    return InstanceProcessor(RunConfig()).cylinders(parsed)

  def test_star_certificate(self, run):
    assert run.model.size == 4
    assert (run.certificate.k, run.certificate.R) == (0, 0)
    assert run.report.passed
    assert run.report.get("global stability").passed
    assert run.report.get("certificate recheck").passed

  def test_median_gap_is_advisory(self, run):
    """Test the median of three leaves sits half a unit off the Gromov product."""
    gap = run.report.get("median vs gromov product")

    assert not gap.gating
    assert not gap.passed
    assert gap.message.startswith("diagnostic only")

  def test_certificate_json(self, run):
    data = InstanceProcessor(RunConfig()).certificate_json(run)

    assert data["instance"] == "star(3)"
    assert data["certificate"]["k"] == 0
    assert data["certificate"]["triples"] == []
    assert data["certificate"]["proof_shaped_fraction"] == 1

  def test_annotated_triple(self, run):
    cover = annotated_triple(run.certificate)

    assert cover.k == 0
    assert len({cover.x, cover.y, cover.z}) == 3

  def test_unknown_transfer(self):
    parsed = InstanceParser().load("star(3)")

    with pytest.raises(ValueError, match="unknown transfer"):
      InstanceProcessor(RunConfig()).cylinders(parsed, transfer="shrink")
