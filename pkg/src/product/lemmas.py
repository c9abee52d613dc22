"""Checks for the D1, D and C systems of a product subset and the dual S_C."""

import logging
from fractions import Fraction

from ..core.config import RunConfig
from ..core.report import CheckResult
from ..geometry.metric import MetricTable, estimate_hyperbolicity, weak_rough_geodesic_constant
from ..wallspace.dual import ChainMetric, DualSpace
from ..wallspace.verifiers import (
  check_gluable,
  check_separated,
  check_subset_closed,
  measure_gluing_constant,
  realised_members,
)
from .grids import is_grid
from .instance import ProductInstance

logger = logging.getLogger(__name__)

EXACT_DELTA_POINTS = 60


def distance_table(metric: ChainMetric, points: list[int]) -> list[list[int]]:
  n = len(points)
  table = [[0] * n for _ in range(n)]
  for s in range(n):
    for t in range(s + 1, n):
      table[s][t] = table[t][s] = metric.dist(points[s], points[t])
  return table


def _pair(instance: ProductInstance, s: int, t: int) -> list:
  return [instance.space.labels[s], instance.space.labels[t]]


def check_grid(instance: ProductInstance) -> CheckResult:
  """The extremal grid is a genuine grid and its smaller side is at most L."""
  grid = instance.grid
  genuine = is_grid(instance, grid.d1, grid.d2)
  passed = genuine and grid.raw <= instance.L
  return CheckResult(
    "grid bound",
    passed=passed,
    partial=not grid.complete,
    witness=None if passed else {"d1": grid.d1, "d2": grid.d2},
    details={"raw": grid.raw, "bound": grid.L, "L": instance.L, "visits": grid.visits},
    message="" if passed else f"grid with sides {len(grid.d1)}, {len(grid.d2)} exceeds L",
  )


def check_l1_law(instance: ProductInstance, d1: list[list[int]]) -> CheckResult:
  """dist_D1 is the l1 sum of the factor dual distances."""
  n = len(d1)
  for s in range(n):
    for t in range(s + 1, n):
      expected = instance.factor_distance(s, t)
      if d1[s][t] != expected:
        return CheckResult(
          "l1 law",
          passed=False,
          witness={"pair": _pair(instance, s, t), "dist_D1": d1[s][t], "dist_S": expected},
        )
  return CheckResult("l1 law", passed=True)


def check_system_comparison(
  instance: ProductInstance, d1: list[list[int]], d: list[list[int]], c: list[list[int]]
) -> list[CheckResult]:
  """dist_C <= dist_D <= dist_D1 and (1/m) dist_D1 <= dist_D at every pair."""
  m = instance.m
  monotone = CheckResult("dist_C <= dist_D <= dist_D1", passed=True)
  comparison = CheckResult("D1 to D quasiisometry", passed=True, details={"m": m})
  n = len(d)
  for s in range(n):
    for t in range(s + 1, n):
      if monotone.passed and not c[s][t] <= d[s][t] <= d1[s][t]:
        monotone.passed = False
        monotone.witness = {
          "pair": _pair(instance, s, t), "C": c[s][t], "D": d[s][t], "D1": d1[s][t]
        }
      if comparison.passed and d1[s][t] > m * d[s][t]:
        comparison.passed = False
        comparison.witness = {"pair": _pair(instance, s, t), "D": d[s][t], "D1": d1[s][t]}
  return [monotone, comparison]


def check_system_inclusions(instance: ProductInstance) -> CheckResult:
  """Witness chains of dist_C lie in D and D1, and split into per-color disparate chains."""
  points = instance.point_ultrafilters()
  index = instance.lchain_index
  disparate = instance.disparate
  n = len(points)
  checked = 0
  for s in range(n):
    for t in range(s + 1, n):
      walls = index.chain_walls(index.distance(points[s], points[t]))
      if not walls:
        continue
      checked += 1
      in_d = disparate.contains(walls)
      in_d1 = disparate.compatible_labelling(walls) is not None
      parts_ok = all(
        instance.color_system(color).contains(
          [w for w in walls if instance.space.walls[w].color == color]
        )
        for color in instance.colors
      )
      if not (instance.lchain.contains(walls) and in_d and in_d1 and parts_ok):
        return CheckResult(
          "C in D in D1",
          passed=False,
          witness={"pair": _pair(instance, s, t), "chain": walls},
        )
  return CheckResult("C in D in D1", passed=True, details={"chains": checked})


def verify_system_lemma(instance: ProductInstance, config: RunConfig) -> list[CheckResult]:
  """m-gluability of D and C, L-separation of C, and the distance comparisons on S."""
  m = config.glue_m if config.glue_m is not None else instance.m
  L = instance.L
  budget = config.search_budget
  results = [
    check_grid(instance),
    check_gluable(instance.disparate, instance.disparate_index, m, config.chain_cap, budget),
    check_gluable(instance.lchain, instance.lchain_index, m, config.chain_cap, budget),
    check_separated(instance.lchain, instance.lchain_index, L),
  ]

  points = instance.point_ultrafilters()
  d1 = distance_table(instance.d1, points)
  d = distance_table(instance.disparate_index, points)
  c = distance_table(instance.lchain_index, points)
  partial = (
    instance.disparate_index.incomplete_searches + instance.lchain_index.incomplete_searches > 0
  )
  results.append(
    CheckResult(
      "dualisable",
      passed=True,
      partial=partial,
      details={"max_dist_D": max(map(max, d)), "max_dist_C": max(map(max, c))},
    )
  )
  results.append(check_l1_law(instance, d1))
  results.extend(check_system_comparison(instance, d1, d, c))
  results.append(check_system_inclusions(instance))
  for system, index in (
    (instance.disparate, instance.disparate_index),
    (instance.lchain, instance.lchain_index),
  ):
    results.append(
      check_subset_closed(system, realised_members(index, points, cap=config.chain_cap))
    )
  results.append(
    measure_gluing_constant(instance.lchain, instance.lchain_index, m + 1, budget)
  )
  return results


def verify_dual_SC(
  instance: ProductInstance, dual: DualSpace, config: RunConfig
) -> list[CheckResult]:
  """Distance comparison with dist_S, density of S and the hyperbolicity of the working dual."""
  m, L = instance.m, instance.L
  n = len(instance.points)
  anchors = [dual.point_of(s) for s in range(n)]

  bounds = CheckResult("dist_C vs dist_S", passed=True, details={"m": m, "L": L})
  for s in range(n):
    for t in range(s + 1, n):
      dist_s = instance.factor_distance(s, t)
      dist_c = dual.dist[anchors[s]][anchors[t]]
      if dist_c > dist_s or Fraction(dist_c) < Fraction(dist_s - m, 2 * m * L):
        bounds.passed = False
        bounds.witness = {"pair": _pair(instance, s, t), "dist_C": dist_c, "dist_S": dist_s}
        break
    if not bounds.passed:
      break

  table = MetricTable(
    list(range(n)), [[dual.dist[anchors[s]][anchors[t]] for t in range(n)] for s in range(n)]
  )
  k = weak_rough_geodesic_constant(table)
  allowed = 3 * k + 4 * (L + m + 1)
  gap = max(min(dual.dist[p][a] for a in anchors) for p in range(dual.size))
  density = CheckResult(
    "density",
    passed=gap <= allowed,
    partial=dual.capped,
    details={"weak_rough_geodesic_k": k, "bound": allowed, "max_gap": gap},
  )

  delta, sampled = estimate_hyperbolicity(dual.table, EXACT_DELTA_POINTS, config.seed)
  hyperbolicity = CheckResult(
    "dual hyperbolicity",
    passed=True,
    partial=sampled,
    gating=False,
    details={"delta": delta, "points": dual.size},
  )
  return [bounds, density, hyperbolicity]
