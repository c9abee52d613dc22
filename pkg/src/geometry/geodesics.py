"""Rough geodesics in finite metric spaces."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

from .metric import MetricTable

logger = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 200000


@dataclass(frozen=True)
class RoughGeodesic:
  """A unit-step vertex sequence; quality is its largest deviation from exact distances."""

  points: tuple[int, ...]
  quality: int

  @property
  def length(self) -> int:
    return len(self.points) - 1


@dataclass
class GeodesicSearch:
  """Result of a rough-geodesic enumeration."""

  geodesics: list[RoughGeodesic]
  capped: bool
  exhausted_budget: bool = False

  @property
  def partial(self) -> bool:
    return self.capped or self.exhausted_budget


def rough_quality(space: MetricTable, points: Sequence[int]) -> int:
  """Largest |dist(p_i, p_j) - (j - i)| over index pairs."""
  d = space.dist
  worst = 0
  for i in range(len(points)):
    row = d[points[i]]
    for j in range(i + 1, len(points)):
      worst = max(worst, abs(row[points[j]] - (j - i)))
  return worst


def is_rough_geodesic(space: MetricTable, points: Sequence[int], k: int) -> bool:
  return len(points) > 0 and rough_quality(space, points) <= k


def enumerate_rough_geodesics(
  space: MetricTable,
  x: int,
  y: int,
  k: int,
  cap: int,
  allowed: Sequence[int] | None = None,
  node_budget: int = DEFAULT_NODE_BUDGET,
) -> GeodesicSearch:
  """Enumerate k-rough geodesics from x to y in length order, then lexicographically.

  Interior points are drawn from allowed (all points by default). Consecutive
  points are distinct; a path from x to itself is the constant path.
  """
  if cap <= 0:
    raise ValueError("empty budget")
  if k < 0:
    raise ValueError("k must be non-negative")
  space.check_point(x)
  space.check_point(y)

  d = space.dist
  if x == y:
    return GeodesicSearch([RoughGeodesic((x,), 0)], capped=cap <= 1)

  pool = sorted(set(range(space.size) if allowed is None else allowed) | {y})
  total = d[x][y]
  found: list[RoughGeodesic] = []
  visits = 0
  exhausted = False

  for steps in range(max(1, total - k), total + k + 1):
    path = [x]

    def extend() -> bool:
      """Depth-first extension; returns False once the cap or budget stops the search."""
      nonlocal visits, exhausted
      position = len(path)
      if position == steps:
        if path[-1] != y and _fits(path, y, position):
          path.append(y)
          found.append(RoughGeodesic(tuple(path), rough_quality(space, path)))
          path.pop()
          if len(found) >= cap:
            return False
        return True
      for q in pool:
        visits += 1
        if visits > node_budget:
          exhausted = True
          return False
        if q == path[-1]:
          continue
        if abs(d[q][y] - (steps - position)) > k:
          continue
        if not _fits(path, q, position):
          continue
        path.append(q)
        keep_going = extend()
        path.pop()
        if not keep_going:
          return False
      return True

    def _fits(prefix: list[int], q: int, position: int) -> bool:
      row = d[q]
      return all(abs(row[p] - (position - i)) <= k for i, p in enumerate(prefix))

    if not extend():
      break

  capped = len(found) >= cap
  if exhausted:
    logger.warning("rough geodesic search from %d to %d ran out of budget", x, y)
  return GeodesicSearch(found, capped=capped, exhausted_budget=exhausted)


def hausdorff(space: MetricTable, a: Sequence[int], b: Sequence[int]) -> int:
  """Hausdorff distance between two nonempty point sets."""
  d = space.dist
  forward = max(min(d[p][q] for q in b) for p in a)
  backward = max(min(d[q][p] for p in a) for q in b)
  return max(forward, backward)
