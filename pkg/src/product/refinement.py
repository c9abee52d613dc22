"""K-chain refinements of the disparate system of a product subset."""

import itertools
import logging
import random
from functools import cached_property
from typing import TYPE_CHECKING

from ..core.config import RunConfig
from ..core.report import CheckResult
from ..quasitree.lemmas import check_dual_bottleneck
from ..wallspace.chains import ChainIndex
from ..wallspace.dual import DualSpace, SumMetric
from ..wallspace.systems import DisparateSystem, LChainSystem
from ..wallspace.verifiers import check_gluable, check_separated
from ..wallspace.walls import WallSpace

if TYPE_CHECKING:
  from .instance import ProductInstance

logger = logging.getLogger(__name__)

GEODESIC_PAIR_LIMIT = 200
# a 1-gluable system loses at most one wall when chains along a geodesic are joined
GEODESIC_DEFECT_BOUND = 1


def restrict_to_color(space: WallSpace, color: int) -> tuple[WallSpace, list[int]]:
  """The wall space of one color, with the ids of its walls in the full space."""
  sub = WallSpace(space.labels, dedup_by_color=True)
  full_ids = []
  for wall in space.walls:
    if wall.color == color:
      sub.add_wall(wall.minus, color, wall.provenance)
      full_ids.append(wall.id)
  sub.freeze()
  return sub, full_ids


class Refinement:
  """E^K (K-chains of D) and its per-color parts E_i."""

  def __init__(self, instance: "ProductInstance", K: int):
    if K < 0:
      raise ValueError("K must be non-negative")
    self.instance = instance
    self.K = K
    budget = instance.search_budget
    self.system = LChainSystem(instance.disparate, instance.pair_max, K, name=f"E^{K}")
    self.index = ChainIndex(self.system, budget)
    self.color_systems = [
      LChainSystem(instance.disparate, instance.pair_max, K, name=f"E_{i}", color=i)
      for i in instance.colors
    ]
    self.color_indices = [ChainIndex(s, budget) for s in self.color_systems]
    self.prime = SumMetric(self.color_indices, f"E'^{K}")

  def color_space(self, color: int) -> tuple[WallSpace, list[int], ChainIndex]:
    """E_i on the wall space of its own color, for the dual T_{E_i}."""
    return self._color_spaces[color]

  @cached_property
  def _color_spaces(self) -> list[tuple[WallSpace, list[int], ChainIndex]]:
    instance = self.instance
    spaces = []
    for color in instance.colors:
      sub, full_ids = restrict_to_color(instance.space, color)
      base = DisparateSystem(
        sub, instance.disparate.metrics, instance.disparate.spacing, color=color
      )
      pair_max = instance.pair_max

      def lifted(h: int, k: int, ids=full_ids, pair_max=pair_max) -> int:
        return pair_max(ids[h], ids[k])

      system = LChainSystem(base, lifted, self.K, name=f"E_{color}", color=color)
      spaces.append((sub, full_ids, ChainIndex(system, instance.search_budget)))
    return spaces


def check_comparison(
  instance: "ProductInstance", refinement: Refinement, points: list[int]
) -> CheckResult:
  """(1/m) dist_E' <= dist_E^K <= dist_E' on all point pairs."""
  m = instance.m
  n = len(points)
  for s in range(n):
    for t in range(s + 1, n):
      x, y = points[s], points[t]
      refined = refinement.index.dist(x, y)
      summed = refinement.prime.dist(x, y)
      if not (summed <= m * refined and refined <= summed):
        return CheckResult(
          f"E^{refinement.K} vs E'",
          passed=False,
          witness={
            "pair": [instance.space.labels[s], instance.space.labels[t]],
            "dist_EK": refined,
            "dist_Eprime": summed,
          },
        )
  return CheckResult(f"E^{refinement.K} vs E'", passed=True, details={"m": m})


def geodesic_image_defect(
  instance: "ProductInstance", refinement: Refinement, color: int, seed: int = 0
) -> CheckResult:
  """How far factor geodesics are from unparametrised rough geodesics in T_{E_i}.

  The defect of a sequence is the largest d(a, b) + d(b, c) - d(a, c) over ordered
  triples of its points after consecutive repeats are removed.
  """
  factor = instance.factors[color]
  sub, full_ids, index = refinement.color_space(color)
  n = factor.graph.size
  pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
  sampled = len(pairs) > GEODESIC_PAIR_LIMIT
  if sampled:
    pairs = sorted(random.Random(seed).sample(pairs, GEODESIC_PAIR_LIMIT))
  worst = 0
  witness = None
  for a, b in pairs:
    images: list[int] = []
    for v in factor.graph.geodesic(a, b):
      u = instance.vertex_ultrafilter(color, v, full_ids)
      if not images or images[-1] != u:
        images.append(u)
    for i, j, k in itertools.combinations(range(len(images)), 3):
      x, y, z = images[i], images[j], images[k]
      defect = index.dist(x, y) + index.dist(y, z) - index.dist(x, z)
      if defect > worst:
        worst = defect
        witness = {"geodesic": [factor.graph.labels[a], factor.graph.labels[b]]}
  passed = worst <= GEODESIC_DEFECT_BOUND
  return CheckResult(
    f"E_{color} geodesic images",
    passed=passed,
    partial=sampled,
    witness=None if passed else witness,
    details={"defect": worst, "bound": GEODESIC_DEFECT_BOUND, "K": refinement.K},
    message="" if passed else f"geodesic images have defect {worst}",
  )


def verify_refinement(
  instance: "ProductInstance", K: int, config: RunConfig
) -> list[CheckResult]:
  """Per-color E_i are 1-gluable, 0-separated quasitree systems; E^K compares with E'."""
  refinement = instance.refinement(K)
  results = []
  for color, (system, index) in enumerate(
    zip(refinement.color_systems, refinement.color_indices, strict=True)
  ):
    results.append(
      check_gluable(
        system,
        index,
        1,
        config.chain_cap,
        config.search_budget,
        name=f"E_{color} (K={K}) 1-gluable",
      )
    )
    results.append(check_separated(system, index, 0, name=f"E_{color} (K={K}) 0-separated"))
    sub, _, sub_index = refinement.color_space(color)
    dual = DualSpace.from_points(sub, sub_index, config.closure_cap)
    bottleneck = check_dual_bottleneck(dual)
    bottleneck.name = f"E_{color} (K={K}) dual bottleneck"
    results.append(bottleneck)
    results.append(geodesic_image_defect(instance, refinement, color, config.seed))
  results.append(check_comparison(instance, refinement, instance.point_ultrafilters()))
  return results


def check_K_sweep(instance: "ProductInstance", Ks: list[int]) -> CheckResult:
  """dist_E^K is nondecreasing in K at every pair of points."""
  Ks = sorted(set(Ks))
  points = instance.point_ultrafilters()
  n = len(points)
  tables = []
  for K in Ks:
    index = instance.refinement(K).index
    tables.append([[index.dist(points[s], points[t]) for t in range(n)] for s in range(n)])
  for (k1, low), (k2, high) in itertools.pairwise(zip(Ks, tables, strict=True)):
    for s in range(n):
      for t in range(s + 1, n):
        if low[s][t] > high[s][t]:
          return CheckResult(
            "K sweep monotone",
            passed=False,
            witness={"pair": [instance.space.labels[s], instance.space.labels[t]], "K": [k1, k2]},
          )
  return CheckResult("K sweep monotone", passed=True, details={"K": Ks})
