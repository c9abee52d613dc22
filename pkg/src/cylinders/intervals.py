"""Intervals, distant walls and the sets I(x, y) in a working dual.

Points are dual indices. For a pair (x, y) the non-separating walls are oriented so
that both points lie on the plus side of the orientation chosen by x; [x, y] is the
intersection of those halfspaces. A non-separating wall is distant when no
monochromatic system chain that separates x from y and crosses it is longer than L.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from networkx.utils import UnionFind

from ..core.config import RunConfig
from ..core.errors import VerificationError
from ..geometry.metric import estimate_hyperbolicity
from ..product.grids import MIN_L
from ..product.instance import ProductInstance
from ..quasitree.instance import QuasitreeInstance
from ..utils import bitset
from ..wallspace.chains import ChainIndex
from ..wallspace.dual import DualSpace
from ..wallspace.gates import GatedSet
from ..wallspace.gates import interval as interval_set

logger = logging.getLogger(__name__)

EXACT_DELTA_POINTS = 60


@dataclass(frozen=True)
class Interval:
  x: int
  y: int
  walls: int
  points: int


@dataclass(frozen=True)
class DistantWall:
  """A distant wall with the gates of its far side onto the interval."""

  wall: int
  gates: int
  diameter: int


class IntervalModel:
  """Interval geometry of one working dual under one chain system."""

  def __init__(
    self,
    dual: DualSpace,
    index: ChainIndex,
    L: int,
    m: int,
    color_masks: list[int],
    inflation: int = 0,
    seed: int = 0,
  ):
    if L < 0:
      raise ValueError("L must be non-negative")
    if inflation < 0:
      raise ValueError("cylinder_inflation must be non-negative")
    self.dual = dual
    self.space = dual.space
    self.index = index
    self.L = L
    self.m = m
    self.color_masks = color_masks
    self.inflation = inflation
    self.seed = seed
    self.balls = dual.table.ball_masks()
    self._intervals: dict[tuple[int, int], Interval] = {}
    self._distant: dict[tuple[int, int], list[DistantWall]] = {}
    self._cores: dict[tuple[int, int], int] = {}

  @classmethod
  def for_quasitree(
    cls, instance: QuasitreeInstance, dual: DualSpace, config: RunConfig, inflation: int = 0
  ) -> "IntervalModel":
    L = config.L if config.L is not None else MIN_L
    index = instance.chain_index(config.search_budget)
    return cls(dual, index, L, 1, [instance.space.all_walls], inflation, config.seed)

  @classmethod
  def for_product(
    cls, instance: ProductInstance, dual: DualSpace, config: RunConfig
  ) -> "IntervalModel":
    masks = [instance.space.color_mask(c) for c in instance.colors]
    return cls(
      dual, instance.lchain_index, instance.L, instance.m, masks, instance.cylinder_inflation,
      config.seed,
    )

  @property
  def size(self) -> int:
    return self.dual.size

  @cached_property
  def plus_points(self) -> list[int]:
    """plus_points[w]: dual indices on the plus side of wall w."""
    masks = [0] * len(self.space.walls)
    for p, u in enumerate(self.dual.points):
      for w in bitset.iter_bits(u):
        masks[w] |= 1 << p
    return masks

  @cached_property
  def delta(self) -> tuple[Fraction, bool]:
    return estimate_hyperbolicity(self.dual.table, EXACT_DELTA_POINTS, self.seed)

  def label(self, p: int):
    return self.dual.table.labels[p]

  def ball(self, center: int, radius: int) -> int:
    masks = self.balls[center]
    return masks[min(radius, len(masks) - 1)]

  def neighbourhood(self, mask: int, radius: int) -> int:
    result = 0
    for p in bitset.iter_bits(mask):
      result |= self.ball(p, radius)
    return result

  def set_distance(self, a: int, b: int) -> int:
    d = self.dual.dist
    return min(d[p][q] for p in bitset.iter_bits(a) for q in bitset.iter_bits(b))

  def _members(self, gated: GatedSet) -> int:
    return bitset.from_indices(p for p, u in enumerate(self.dual.points) if gated.contains(u))

  def interval(self, i: int, j: int) -> Interval:
    key = (i, j) if i <= j else (j, i)
    cached = self._intervals.get(key)
    if cached is None:
      x, y = self.dual.points[i], self.dual.points[j]
      gated = interval_set(self.space, x, y)
      cached = Interval(key[0], key[1], gated.mask, self._members(gated))
      self._intervals[key] = cached
    return cached

  def distant_walls(self, i: int, j: int) -> list[DistantWall]:
    """ℋ^L(x, y) with the gate set of each wall's far side."""
    key = (i, j) if i <= j else (j, i)
    cached = self._distant.get(key)
    if cached is not None:
      return cached
    points = self.dual.points
    x, y = points[i], points[j]
    interval = self.interval(i, j)
    gated = GatedSet(self.space, interval.walls, x)
    gates = [self.dual.index(gated.gate(u)) for u in points]
    separating = x ^ y
    full = bitset.full_mask(self.size)
    d = self.dual.dist

    distant = []
    for h in bitset.iter_bits(interval.walls):
      crossing = separating & self.space.cross[h]
      if crossing and any(
        self.index.longest_within(crossing & mask).length > self.L for mask in self.color_masks
      ):
        continue
      far = self.plus_points[h] if not (x >> h) & 1 else full & ~self.plus_points[h]
      mask = bitset.from_indices(gates[p] for p in bitset.iter_bits(far))
      members = bitset.to_indices(mask)
      diameter = max((d[a][b] for a in members for b in members), default=0)
      distant.append(DistantWall(h, mask, diameter))
    self._distant[key] = distant
    logger.debug("pair (%d, %d): %d distant walls", i, j, len(distant))
    return distant

  def reach(self, wall: DistantWall, i: int) -> int:
    """Radius of the smallest ball about i containing the gate set; the ℋ^L_t index."""
    row = self.dual.dist[i]
    return max(row[g] for g in bitset.iter_bits(wall.gates))

  def filtration(self, i: int, j: int, t: int) -> list[DistantWall]:
    """ℋ^L_t(x, y): distant walls whose gate set lies in the t-ball about x."""
    return [w for w in self.distant_walls(i, j) if self.reach(w, i) <= t]

  def interval_I(self, i: int, j: int, strict: bool = True) -> int:
    """I(x, y) as a mask of dual indices, before any inflation.

    In strict mode a failure of [x, y] ⊆ I(x, y) ⊆ N_1([x, y]) raises VerificationError.
    """
    cached = self._cores.get((i, j))
    if cached is None:
      mask = bitset.from_indices(w.wall for w in self.distant_walls(i, j))
      cached = self._members(GatedSet(self.space, mask, self.dual.points[i]))
      self._cores[(i, j)] = cached
    if strict:
      interval = self.interval(i, j).points
      if interval & ~cached or cached & ~self.neighbourhood(interval, 1):
        raise VerificationError(
          f"I({self.label(i)}, {self.label(j)}) is not between [x, y] and its 1-neighbourhood"
        )
    return cached

  def working_I(self, i: int, j: int) -> int:
    """The set the cylinders are built on: I(x, y), or its neighbourhood when inflated."""
    core = self.interval_I(i, j, strict=True)
    if self.inflation:
      return self.neighbourhood(core, self.inflation)
    return core

  def gate_clusters(self, i: int, j: int, k: int, r: int) -> list[list[DistantWall]]:
    """Walls of ℋ^L_{r-L-1}(x, y) outside ℋ^L(x, z), linked when gate sets are within L."""
    other = {w.wall for w in self.distant_walls(i, k)}
    family = [w for w in self.filtration(i, j, r - self.L - 1) if w.wall not in other]
    if not family:
      return []
    groups = UnionFind(range(len(family)))
    for a in range(len(family)):
      for b in range(a + 1, len(family)):
        if self.set_distance(family[a].gates, family[b].gates) <= self.L:
          groups.union(a, b)
    clusters = [sorted(c) for c in groups.to_sets()]
    clusters.sort(key=lambda c: min(bitset.lowest(family[a].gates) for a in c))
    return [[family[a] for a in c] for c in clusters]

  def cluster_center(self, cluster: list[DistantWall]) -> int:
    return min(bitset.lowest(w.gates) for w in cluster)
