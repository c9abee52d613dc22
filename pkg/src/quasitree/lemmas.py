"""Checks for the disparate system of a quasitree and its dual."""

import itertools
import logging
import math
import random
from fractions import Fraction

import networkx as nx

from ..core.config import RunConfig
from ..core.report import CheckResult
from ..geometry.bottleneck import bottleneck_check
from ..geometry.metric import MetricTable, coarse_median, weak_rough_geodesic_constant
from ..utils import bitset
from ..wallspace.chains import ChainIndex
from ..wallspace.dual import DualSpace
from ..wallspace.ultrafilter import median, point_ultrafilter
from ..wallspace.verifiers import (
  check_gluable,
  check_separated,
  check_subset_closed,
  measure_gluing_constant,
  realised_members,
)
from .instance import QuasitreeInstance

logger = logging.getLogger(__name__)

# separated gluable systems of chains: dual geodesics stay within 3m + 4 of any coarse path
BOTTLENECK_CONSTANT = 7
DENSITY_CONSTANT = 11
# dist_D restricted to the vertices is 1-weakly roughly geodesic
ROUGH_GEODESIC_CONSTANT = 1
# gluing constant accepted when no glue_m is requested
GLUE_BOUND = 2
AUTOMORPHISM_LIMIT = 24
EQUIVARIANCE_VERTEX_LIMIT = 200
QUASIMEDIAN_SAMPLES = 2000


def vertex_distances(instance: QuasitreeInstance, index: ChainIndex) -> list[list[int]]:
  """dist_D between the point ultrafilters of all vertices."""
  space = instance.space
  points = [point_ultrafilter(space, s) for s in range(space.size)]
  n = len(points)
  table = [[0] * n for _ in range(n)]
  for s in range(n):
    for t in range(s + 1, n):
      table[s][t] = table[t][s] = index.dist(points[s], points[t])
  return table


def check_distance_bounds(
  instance: QuasitreeInstance, dist_d: list[list[int]]
) -> list[CheckResult]:
  """Compare dist_D with the graph metric.

  Each separating wall's defining ball comes within K of a geodesic, so centres at
  least spacing apart project at least spacing - 2K apart along it; that gives the
  gating upper bound. The lower bound uses every other ball along a geodesic.
  """
  graph = instance.graph
  K, spacing = instance.K, instance.spacing
  step = spacing - 2 * K
  n = graph.size
  upper = CheckResult("dist_D projection bound", passed=True)
  literal = CheckResult("dist_D literal upper bound", passed=True, gating=False)
  lower = CheckResult("dist_D lower bound", passed=True)
  violations = 0
  for s in range(n):
    for t in range(s + 1, n):
      d = graph.dist[s][t]
      value = dist_d[s][t]
      pair = {"pair": [graph.labels[s], graph.labels[t]], "dist": d, "dist_D": value}
      if step > 0 and value > d // step + 1 and upper.passed:
        upper.passed = False
        upper.witness = {**pair, "bound": d // step + 1}
      if value > math.ceil(Fraction(d, spacing)):
        violations += 1
        if literal.passed:
          literal.passed = False
          literal.witness = {**pair, "bound": math.ceil(Fraction(d, spacing))}
      if Fraction(value) < Fraction(d, 2 * spacing) - 1 and lower.passed:
        lower.passed = False
        lower.witness = {**pair, "bound": Fraction(d, 2 * spacing) - 1}
  if step <= 0:
    upper.message = "not applicable: spacing <= 2K"
  upper.details = {"step": step}
  literal.details = {"violations": violations, "spacing": spacing}
  lower.details = {"denominator": 2 * spacing}
  return [upper, literal, lower]


def check_equivariance(instance: QuasitreeInstance, limit: int = AUTOMORPHISM_LIMIT) -> CheckResult:
  """Graph automorphisms permute the wall set."""
  graph = instance.graph
  if instance.explicit:
    return CheckResult(
      "equivariance", passed=True, gating=False, message="not applicable: explicit walls"
    )
  if graph.size > EQUIVARIANCE_VERTEX_LIMIT:
    return CheckResult(
      "equivariance", passed=True, partial=True, message="skipped above 200 vertices"
    )
  space = instance.space
  automorphisms = itertools.islice(
    nx.algorithms.isomorphism.vf2pp_all_isomorphisms(graph.graph, graph.graph), limit
  )
  count = 0
  for sigma in automorphisms:
    count += 1
    for wall in space.walls:
      image = bitset.from_indices(sigma[v] for v in bitset.iter_bits(wall.minus))
      if space.find(image) is None:
        return CheckResult(
          "equivariance",
          passed=False,
          witness={
            "wall": wall.id,
            "automorphism": {graph.labels[a]: graph.labels[b] for a, b in sigma.items()},
          },
          message=f"automorphism does not preserve wall {wall.id}",
        )
  return CheckResult(
    "equivariance", passed=True, partial=count >= limit, details={"automorphisms": count}
  )


def quasimedian_defect(
  instance: QuasitreeInstance, index: ChainIndex, triple_limit: int, seed: int = 0
) -> CheckResult:
  """dist_D between the image of the coarse median and the median of the images."""
  graph = instance.graph
  space = instance.space
  n = graph.size
  points = [point_ultrafilter(space, s) for s in range(n)]
  if n <= triple_limit:
    triples = itertools.combinations(range(n), 3)
    sampled = False
  else:
    rng = random.Random(seed)
    triples = (tuple(rng.sample(range(n), 3)) for _ in range(QUASIMEDIAN_SAMPLES))
    sampled = True
  worst = 0
  witness = None
  for x, y, z in triples:
    c = coarse_median(graph, x, y, z)
    value = index.dist(points[c], median(points[x], points[y], points[z]))
    if value > worst:
      worst = value
      witness = {"triple": [graph.labels[v] for v in (x, y, z)], "coarse_median": graph.labels[c]}
  return CheckResult(
    "quasimedian defect", passed=True, partial=sampled, gating=False, witness=witness,
    details={"max": worst},
  )


def verify_lemma_quasitree_system(
  instance: QuasitreeInstance, config: RunConfig
) -> list[CheckResult]:
  """Gluability, separation, dualisability and the distance comparison for the disparate system."""
  system = instance.system
  index = instance.chain_index(config.search_budget)
  budget = config.search_budget
  if config.glue_m is not None:
    m = config.glue_m
    gluable = check_gluable(system, index, m, config.chain_cap, budget)
    constant = measure_gluing_constant(system, index, m + 2, budget)
  else:
    constant = measure_gluing_constant(system, index, GLUE_BOUND, budget, gating=True)
    m = constant.details["minimal_m"]
    if m is None:
      m = GLUE_BOUND
    gluable = one_gluable(constant)
  results = [gluable, check_separated(system, index, 0)]

  dist_d = vertex_distances(instance, index)
  largest = max(max(row) for row in dist_d)
  results.append(
    CheckResult(
      "dualisable",
      passed=True,
      partial=index.incomplete_searches > 0,
      details={"max_dist_D": largest, "graph_diameter": instance.graph.diameter()},
    )
  )
  results.extend(check_distance_bounds(instance, dist_d))
  results.append(constant)
  points = [point_ultrafilter(instance.space, s) for s in range(instance.graph.size)]
  results.append(
    check_subset_closed(system, realised_members(index, points, cap=config.chain_cap))
  )
  results.append(check_equivariance(instance))
  results.append(quasimedian_defect(instance, index, config.triple_limit, config.seed))

  table = MetricTable(instance.graph.labels, dist_d)
  k = weak_rough_geodesic_constant(table)
  results.append(
    CheckResult(
      "weakly roughly geodesic",
      passed=k <= ROUGH_GEODESIC_CONSTANT,
      details={
        "k": k,
        "bound": ROUGH_GEODESIC_CONSTANT,
        "density_bound": 3 * k + 4 * (0 + m + 1),
      },
      message="" if k <= ROUGH_GEODESIC_CONSTANT else f"dist_D is {k}-weakly roughly geodesic",
    )
  )
  return results


def one_gluable(constant: CheckResult) -> CheckResult:
  """Advisory 1-gluability verdict read off a gluing constant measurement."""
  minimal = constant.details.get("minimal_m")
  passed = minimal is not None and minimal <= 1
  witness = None if passed else constant.details.get("obstruction_1")
  name = constant.name.replace("gluing constant", "1-gluable")
  return CheckResult(
    name,
    passed=passed,
    partial=constant.partial and passed,
    gating=False,
    witness=witness,
    details={"m": 1, "minimal_m": minimal},
    message="" if passed else "advisory; the gating verdict is the measured gluing constant",
  )


def verify_density(instance: QuasitreeInstance, dual: DualSpace) -> list[CheckResult]:
  """Every working-dual point lies within 11 of a point ultrafilter; the dual has bottlenecks."""
  anchors = sorted({dual.point_of(s) for s in range(instance.graph.size)})
  worst = 0
  witness = None
  for p in range(dual.size):
    gap = min(dual.dist[p][a] for a in anchors)
    if gap > worst:
      worst = gap
      witness = {"point": dual.table.labels[p], "gap": gap}
  density = CheckResult(
    "density",
    passed=worst <= DENSITY_CONSTANT,
    partial=dual.capped,
    witness=witness if worst > DENSITY_CONSTANT else None,
    details={"max_gap": worst, "bound": 3 * 1 + 4 * (0 + 1 + 1), "dual_points": dual.size},
  )
  return [density, check_dual_bottleneck(dual)]


def check_dual_bottleneck(
  dual: DualSpace, delta: int = BOTTLENECK_CONSTANT, limit: int = 200
) -> CheckResult:
  if dual.size > limit:
    return CheckResult(
      "dual bottleneck", passed=True, partial=True, message=f"skipped above {limit} dual points"
    )
  result = bottleneck_check(dual.table, delta)
  return CheckResult(
    "dual bottleneck",
    passed=result.passed,
    partial=result.partial or dual.capped,
    witness=None if result.passed else result.witness,
    details={"worst": result.worst, "delta": delta, "scale": result.scale},
  )
