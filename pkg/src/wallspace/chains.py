"""Longest system chains via a nesting DAG over labelled halfspaces.

A node is a wall with a chosen side and a system label. Node b follows node a when
b's halfspace is strictly inside a's, so every path is a nested chain. Nodes are
sorted by decreasing halfspace size, which makes index order a topological order.
The level DP over this DAG only enforces compatibility between consecutive nodes,
so it is used as an upper bound for an exact branch-and-bound over pairwise
compatible chains.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass

from ..utils import bitset
from .systems import BaseSystem, Label
from .walls import MINUS, PLUS

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChainNode:
  wall: int
  side: int
  label: Label
  mask: int


@dataclass
class ChainSearch:
  """Longest chain found; complete is False when the search budget ran out."""

  length: int
  nodes: list[int]
  complete: bool = True


class ChainIndex:
  """Nesting DAG for one chain system."""

  def __init__(self, system: BaseSystem, budget: int = 200000):
    self.system = system
    self.space = system.space
    self.budget = budget
    walls = self.space.walls

    raw = []
    for wall in walls:
      if not system.eligible(wall.id):
        continue
      for s in (MINUS, PLUS):
        size = bitset.popcount(wall.side(s))
        for position, label in enumerate(system.labels(wall.id)):
          raw.append((-size, wall.id, s, position, label))
    raw.sort(key=lambda item: item[:4])
    self.nodes = [ChainNode(w, s, label, walls[w].side(s)) for _, w, s, _, label in raw]

    n = len(self.nodes)
    self.below = [0] * n
    self.succ = [0] * n
    self.conflict = [0] * n
    self.side_nodes: dict[tuple[int, int], int] = defaultdict(int)
    self.wall_nodes: dict[int, int] = defaultdict(int)
    for a, node in enumerate(self.nodes):
      self.side_nodes[(node.wall, node.side)] |= 1 << a
      self.wall_nodes[node.wall] |= 1 << a
    for a in range(n):
      na = self.nodes[a]
      for b in range(a + 1, n):
        nb = self.nodes[b]
        if nb.mask == na.mask or nb.mask & ~na.mask:
          continue
        self.below[a] |= 1 << b
        if system.compatible(na.wall, na.label, nb.wall, nb.label):
          self.succ[a] |= 1 << b
        else:
          self.conflict[a] |= 1 << b

    self.eligible_walls = system.eligible_mask()
    self._chosen: dict[int, int] = {}
    self._target_bounds: dict[int, list[int]] = {}
    self._distances: dict[tuple[int, int], ChainSearch] = {}
    self._within: dict[int, ChainSearch] = {}
    self.incomplete_searches = 0
    logger.debug("chain index for %s: %d nodes", system.name, n)

  @property
  def name(self) -> str:
    return self.system.name

  def __len__(self) -> int:
    return len(self.nodes)

  def chosen_mask(self, u: int) -> int:
    """Nodes whose halfspace the ultrafilter u chooses."""
    cached = self._chosen.get(u)
    if cached is not None:
      return cached
    mask = 0
    for wall in bitset.iter_bits(self.eligible_walls):
      mask |= self.side_nodes.get((wall, PLUS if (u >> wall) & 1 else MINUS), 0)
    self._chosen[u] = mask
    return mask

  def level_bound(self, allowed: int) -> list[int]:
    """Longest consecutive-compatible path from each allowed node, staying in allowed."""
    bound = [0] * len(self.nodes)
    levels: list[int] = []
    for a in reversed(bitset.to_indices(allowed)):
      reach = self.succ[a] & allowed
      best = 0
      for level in range(len(levels), 0, -1):
        if reach & levels[level - 1]:
          best = level
          break
      bound[a] = best + 1
      if best == len(levels):
        levels.append(0)
      levels[best] |= 1 << a
    return bound

  def longest(self, start: int, bound: list[int]) -> ChainSearch:
    """Exact longest pairwise compatible chain among start, pruned by bound."""
    best: list[int] = []
    visits = 0
    exhausted = False
    succ = self.succ

    def search(chain: list[int], candidates: int) -> None:
      nonlocal best, visits, exhausted
      if len(chain) > len(best):
        best = list(chain)
      for b in sorted(bitset.iter_bits(candidates), key=lambda i: (-bound[i], i)):
        if len(chain) + bound[b] <= len(best):
          break
        visits += 1
        if visits > self.budget:
          exhausted = True
          return
        chain.append(b)
        search(chain, candidates & succ[b])
        chain.pop()
        if exhausted:
          return

    search([], start)
    if exhausted:
      self.incomplete_searches += 1
      logger.warning("chain search in %s stopped after %d nodes", self.name, self.budget)
    return ChainSearch(len(best), best, not exhausted)

  def distance(self, x: int, y: int) -> ChainSearch:
    """Longest system chain separating ultrafilter x from ultrafilter y."""
    key = (x, y) if x <= y else (y, x)
    cached = self._distances.get(key)
    if cached is not None:
      return cached
    source, target = key
    target_nodes = self.chosen_mask(target)
    bound = self._target_bounds.get(target)
    if bound is None:
      bound = self.level_bound(target_nodes)
      self._target_bounds[target] = bound
    result = self.longest(target_nodes & ~self.chosen_mask(source), bound)
    self._distances[key] = result
    return result

  def dist(self, x: int, y: int) -> int:
    return self.distance(x, y).length

  def longest_within(self, wall_mask: int) -> ChainSearch:
    """Longest system chain using only walls in wall_mask (either orientation)."""
    wall_mask &= self.eligible_walls
    cached = self._within.get(wall_mask)
    if cached is not None:
      return cached
    allowed = 0
    for wall in bitset.iter_bits(wall_mask):
      allowed |= self.wall_nodes.get(wall, 0)
    result = self.longest(allowed, self.level_bound(allowed)) if allowed else ChainSearch(0, [])
    self._within[wall_mask] = result
    return result

  def walls_of(self, nodes: list[int]) -> list[int]:
    return [self.nodes[i].wall for i in nodes]

  def chain_walls(self, search: ChainSearch) -> list[int]:
    return self.walls_of(search.nodes)


class PairMax:
  """pair_max(h, k): longest chain of a base system crossing both h and k."""

  def __init__(self, index: ChainIndex):
    self.index = index
    self.space = index.space
    self._cache: dict[tuple[int, int], int] = {}
    self.witnesses: dict[tuple[int, int], list[int]] = {}
    self.complete = True

  def __call__(self, h: int, k: int) -> int:
    key = (h, k) if h <= k else (k, h)
    cached = self._cache.get(key)
    if cached is not None:
      return cached
    mask = self.space.cross[h] & self.space.cross[k]
    if mask == 0:
      value = 0
    else:
      search = self.index.longest_within(mask)
      value = search.length
      self.complete = self.complete and search.complete
      if value:
        self.witnesses[key] = self.index.chain_walls(search)
    self._cache[key] = value
    return value

  def table(self) -> dict[tuple[int, int], int]:
    """Fill and return the table for every wall pair."""
    n = len(self.space.walls)
    for h in range(n):
      for k in range(h + 1, n):
        self(h, k)
    return dict(self._cache)
