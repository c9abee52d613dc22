"""Bottleneck certification for finite metric spaces.

A path between x and y in the scale graph can stay at distance at least r from a
point p exactly when x and y are connected through points at distance >= r from p.
The largest such r is read off a union-find sweep that adds points in decreasing
distance from p, so the maximum over all coarse paths is exact without sampling.
"""

import logging
import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any

import networkx as nx
from networkx.utils import UnionFind

from .metric import MetricTable

logger = logging.getLogger(__name__)


@dataclass
class BottleneckResult:
  passed: bool
  worst: int
  delta: Any
  scale: int
  witness: dict[str, Any] | None = None
  partial: bool = False
  pairs_checked: int = 0
  details: dict[str, Any] = field(default_factory=dict)


def _escape_levels(
  space: MetricTable, graph: nx.Graph, p: int, pairs: list[tuple[int, int]]
) -> dict[tuple[int, int], int]:
  """For each pair, the largest r such that a path avoids the open r-ball around p."""
  row = space.dist[p]
  by_level: dict[int, list[int]] = defaultdict(list)
  for q in range(space.size):
    by_level[row[q]].append(q)

  forest = UnionFind()
  active = set()
  pending = list(pairs)
  result: dict[tuple[int, int], int] = {}
  for level in sorted(by_level, reverse=True):
    for q in by_level[level]:
      active.add(q)
      forest[q]  # registers q as a singleton
      for neighbour in graph[q]:
        if neighbour in active:
          forest.union(q, neighbour)
    still_pending = []
    for x, y in pending:
      if x in active and y in active and forest[x] == forest[y]:
        result[(x, y)] = level
      else:
        still_pending.append((x, y))
    pending = still_pending
    if not pending:
      break
  return result


def bottleneck_check(
  space: MetricTable,
  delta,
  pair_limit: int | None = None,
  seed: int = 0,
) -> BottleneckResult:
  """Check that every point of a chosen coarse geodesic lies within delta of every coarse path.

  The chosen path between x and y is a shortest path in the scale graph (points at
  distance at most the connectivity scale are adjacent). Above pair_limit pairs the
  pairs are sampled with the given seed and the verdict is partial.
  """
  scale = space.connectivity_scale()
  graph = space.scale_graph(scale)
  n = space.size
  pairs = [(x, y) for x in range(n) for y in range(x + 1, n)]
  partial = False
  if pair_limit is not None and len(pairs) > pair_limit:
    pairs = sorted(random.Random(seed).sample(pairs, pair_limit))
    partial = True
    logger.warning("bottleneck check sampled %d of %d pairs", pair_limit, n * (n - 1) // 2)

  chosen: dict[tuple[int, int], list[int]] = {}
  by_point: dict[int, list[tuple[int, int]]] = defaultdict(list)
  for x, y in pairs:
    path = nx.shortest_path(graph, x, y)
    chosen[(x, y)] = path
    for p in path:
      by_point[p].append((x, y))

  worst = -1
  witness = None
  for p in sorted(by_point):
    levels = _escape_levels(space, graph, p, by_point[p])
    for x, y in by_point[p]:
      need = levels[(x, y)]
      if need > worst:
        worst = need
        witness = {"x": x, "y": y, "point": p, "distance": need}

  if witness is not None:
    p = witness["point"]
    far = [q for q in range(n) if space.dist[p][q] >= witness["distance"]]
    witness["geodesic"] = chosen[(witness["x"], witness["y"])]
    witness["path"] = nx.shortest_path(graph.subgraph(far), witness["x"], witness["y"])

  worst = max(worst, 0)
  return BottleneckResult(
    passed=worst <= delta,
    worst=worst,
    delta=delta,
    scale=scale,
    witness=witness,
    partial=partial,
    pairs_checked=len(pairs),
  )
