"""Subsets of finite products of quasitrees and the walls they inherit from the factors."""

import logging
from collections.abc import Hashable, Sequence
from dataclasses import dataclass, field
from functools import cached_property

from ..geometry.metric import MetricGraph
from ..quasitree.instance import QuasitreeInstance
from ..utils import bitset
from ..wallspace.chains import ChainIndex, PairMax
from ..wallspace.dual import SumMetric
from ..wallspace.systems import DisparateSystem, LChainSystem
from ..wallspace.ultrafilter import point_ultrafilter
from ..wallspace.walls import PLUS, Provenance, WallSpace
from .grids import GridBound, grid_bound
from .refinement import Refinement

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InducedWall:
  """Where an induced wall comes from: a factor wall, possibly with its sides swapped."""

  color: int
  factor_wall: int
  flipped: bool


def induce_walls(
  factors: Sequence[QuasitreeInstance], points: Sequence[tuple[int, ...]]
) -> tuple[WallSpace, list[InducedWall]]:
  """Pull every factor wall back to the point set through its coordinate.

  Trivial pullbacks are dropped; a bipartition of S induced by two factors is kept
  once per color. Crossing is decided inside S only.
  """
  if not points:
    raise ValueError("empty instance")
  labels = [tuple(f.graph.labels[c] for f, c in zip(factors, p, strict=True)) for p in points]
  space = WallSpace(labels, dedup_by_color=True)
  origin: dict[int, InducedWall] = {}
  for color, factor in enumerate(factors):
    for wall in factor.space.walls:
      side = bitset.from_indices(
        i for i, p in enumerate(points) if bitset.has_bit(wall.minus, p[color])
      )
      provenance = [
        Provenance(color, item.center, item.radius, item.component, item.variant)
        for item in wall.provenance
      ]
      induced = space.add_wall(side, color, provenance)
      if induced is not None and induced.id not in origin:
        origin[induced.id] = InducedWall(color, wall.id, flipped=not side & 1)
  space.freeze()
  logger.info("induced %d walls on %d points", len(space.walls), len(points))
  return space, [origin[i] for i in range(len(space.walls))]


@dataclass
class ProductInstance:
  """A point set in a product of quasitrees with its colored walls and chain systems."""

  factors: list[QuasitreeInstance]
  points: list[tuple[int, ...]]
  space: WallSpace
  origin: list[InducedWall]
  L_supplied: int | None = None
  cylinder_inflation: int = 0
  search_budget: int = 200000
  _refinements: dict[int, Refinement] = field(default_factory=dict, repr=False)

  @classmethod
  def build(
    cls,
    graphs: Sequence[MetricGraph],
    Ks: Sequence[int],
    points: Sequence[Sequence[Hashable]],
    spacing: Sequence[int] | None = None,
    spacing_factor: int = 10,
    include_ball_variant: bool = True,
    L: int | None = None,
    cylinder_inflation: int = 0,
    search_budget: int = 200000,
    seed: int = 0,
  ) -> "ProductInstance":
    if len(Ks) != len(graphs):
      raise ValueError("one K per factor required")
    if spacing is not None and len(spacing) != len(graphs):
      raise ValueError("one spacing per factor required")
    factors = []
    for i, (graph, K) in enumerate(zip(graphs, Ks, strict=True)):
      factor = QuasitreeInstance.build(graph, K, spacing_factor, include_ball_variant, seed=seed)
      if spacing is not None:
        factor.spacing = spacing[i]
      factors.append(factor)
    coords = []
    for p in points:
      if len(p) != len(graphs):
        raise ValueError(f"point {list(p)!r} needs one coordinate per factor")
      coords.append(tuple(g.index(c) for g, c in zip(graphs, p, strict=True)))
    if len(set(coords)) != len(coords):
      raise ValueError("duplicate points")
    space, origin = induce_walls(factors, coords)
    return cls(factors, coords, space, origin, L, cylinder_inflation, search_budget)

  @property
  def m(self) -> int:
    return len(self.factors)

  @property
  def colors(self) -> list[int]:
    return list(range(self.m))

  @cached_property
  def disparate(self) -> DisparateSystem:
    """D: chains that are unions of per-color disparate sets."""
    metrics = {i: f.graph for i, f in enumerate(self.factors)}
    spacing = {i: f.spacing for i, f in enumerate(self.factors)}
    return DisparateSystem(self.space, metrics, spacing, name="D")

  def color_system(self, color: int) -> DisparateSystem:
    return DisparateSystem(
      self.space, self.disparate.metrics, self.disparate.spacing, color=color, name=f"D_{color}"
    )

  @cached_property
  def disparate_index(self) -> ChainIndex:
    return ChainIndex(self.disparate, self.search_budget)

  @cached_property
  def color_indices(self) -> list[ChainIndex]:
    return [ChainIndex(self.color_system(i), self.search_budget) for i in self.colors]

  @cached_property
  def d1(self) -> SumMetric:
    """D1: unions of per-color disparate sets, with no chain condition."""
    return SumMetric(self.color_indices, "D1")

  @cached_property
  def pair_max(self) -> PairMax:
    return PairMax(self.disparate_index)

  @cached_property
  def grid(self) -> GridBound:
    return grid_bound(self)

  @property
  def L(self) -> int:
    """The L used by the C system: the supplied value, else the grid bound (at least 3)."""
    return self.L_supplied if self.L_supplied is not None else self.grid.L

  @cached_property
  def lchain(self) -> LChainSystem:
    return LChainSystem(self.disparate, self.pair_max, self.L, name="C")

  @cached_property
  def lchain_index(self) -> ChainIndex:
    return ChainIndex(self.lchain, self.search_budget)

  def point_ultrafilters(self) -> list[int]:
    return [point_ultrafilter(self.space, s) for s in range(self.space.size)]

  def factor_distance(self, s: int, t: int) -> int:
    """dist_S: the l1 sum of factor dual distances between coordinates."""
    total = 0
    for color, factor in enumerate(self.factors):
      a, b = self.points[s][color], self.points[t][color]
      if a != b:
        index = factor.chain_index(self.search_budget)
        total += index.dist(
          point_ultrafilter(factor.space, a), point_ultrafilter(factor.space, b)
        )
    return total

  def factor_side(self, wall: int, vertex: int) -> int:
    """Side of an induced wall that a factor vertex of its color falls on."""
    source = self.origin[wall]
    factor_wall = self.factors[source.color].space.walls[source.factor_wall]
    side = factor_wall.side_of_point(vertex)
    return 1 - side if source.flipped else side

  def refinement(self, K: int) -> Refinement:
    refined = self._refinements.get(K)
    if refined is None:
      refined = Refinement(self, K)
      self._refinements[K] = refined
    return refined

  def regime(self) -> dict:
    return {
      "m": self.m,
      "points": len(self.points),
      "walls": len(self.space.walls),
      "K": [f.K for f in self.factors],
      "spacing": [f.spacing for f in self.factors],
      "L": self.L,
      "L_supplied": self.L_supplied,
      "cylinder_inflation": self.cylinder_inflation,
      "factor_wide_balls": [f.wide_balls for f in self.factors],
    }

  def vertex_ultrafilter(self, color: int, vertex: int, sub_ids: Sequence[int]) -> int:
    """Orientation of the given walls of one color induced by a factor vertex."""
    u = 0
    for position, wall in enumerate(sub_ids):
      if self.factor_side(wall, vertex) == PLUS:
        u |= 1 << position
    return u
