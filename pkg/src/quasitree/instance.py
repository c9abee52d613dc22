"""Walls of a quasitree from the complementary components of its K-balls."""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import networkx as nx

from ..geometry.metric import MetricGraph, estimate_hyperbolicity, hyperbolicity_delta
from ..utils import bitset
from ..wallspace.chains import ChainIndex
from ..wallspace.systems import DisparateSystem
from ..wallspace.walls import Provenance, WallSpace

logger = logging.getLogger(__name__)

# largest biconnected block scanned exhaustively for the four-point condition
EXACT_DELTA_BLOCK = 60


def graph_delta(graph: MetricGraph, seed: int = 0) -> tuple[Fraction, bool]:
  """Hyperbolicity constant and whether it was sampled."""
  largest = max((len(block) for block in nx.biconnected_components(graph.graph)), default=1)
  if largest <= EXACT_DELTA_BLOCK:
    return hyperbolicity_delta(graph), False
  return estimate_hyperbolicity(graph, EXACT_DELTA_BLOCK, seed)


def ball_components(graph: MetricGraph, center: int, radius: int) -> tuple[int, list[int]]:
  """The closed ball as a mask and the complementary components as masks, by smallest vertex."""
  row = graph.dist[center]
  ball = [v for v in range(graph.size) if row[v] <= radius]
  outside = graph.graph.subgraph(v for v in range(graph.size) if row[v] > radius)
  components = sorted((sorted(c) for c in nx.connected_components(outside)), key=lambda c: c[0])
  return bitset.from_indices(ball), [bitset.from_indices(c) for c in components]


def build_walls(
  graph: MetricGraph,
  K: int,
  include_ball_variant: bool = True,
  color: int = 0,
  space: WallSpace | None = None,
) -> WallSpace:
  """Emit (C, rest) and (C + B, rest) for every component C of every disconnecting K-ball.

  Balls whose complement is connected or empty contribute nothing. Raises ValueError
  ("degenerate K") when no ball disconnects the graph.
  """
  if K < 1:
    raise ValueError("K must be at least 1")
  space = space if space is not None else WallSpace(graph.labels)
  before = len(space.walls)
  disconnecting = 0
  for center in range(graph.size):
    ball, components = ball_components(graph, center, K)
    if len(components) < 2:
      continue
    disconnecting += 1
    for position, component in enumerate(components):
      space.add_wall(component, color, [Provenance(color, center, K, position, "C")])
      if include_ball_variant:
        space.add_wall(component | ball, color, [Provenance(color, center, K, position, "C+B")])
  if len(space.walls) == before:
    raise ValueError("degenerate K")
  logger.info(
    "built %d walls from %d disconnecting balls of radius %d",
    len(space.walls) - before,
    disconnecting,
    K,
  )
  return space


def explicit_walls(graph: MetricGraph, K: int, walls: Sequence[dict]) -> WallSpace:
  """Wall space from a supplied list of {minus, plus?, provenance} records."""
  space = WallSpace(graph.labels)
  for record in walls:
    side = bitset.from_indices(graph.index(v) for v in record["minus"])
    provenance = [
      Provenance(
        0, graph.index(p["center"]), K, int(p.get("component", 0)), p.get("variant", "explicit")
      )
      for p in record.get("provenance", [])
    ]
    if space.add_wall(side, 0, provenance) is None:
      raise ValueError(f"explicit wall {record['minus']!r} is not a bipartition")
  if not space.walls:
    raise ValueError("degenerate K")
  return space


@dataclass
class QuasitreeInstance:
  """A graph with its K-ball walls and the disparate chain system."""

  graph: MetricGraph
  K: int
  space: WallSpace
  delta: Fraction
  spacing: int
  delta_sampled: bool = False
  explicit: bool = False
  _indices: dict[int, ChainIndex] = field(default_factory=dict, repr=False)

  @classmethod
  def build(
    cls,
    graph: MetricGraph,
    K: int,
    spacing_factor: int = 10,
    include_ball_variant: bool = True,
    walls: Sequence[dict] | None = None,
    seed: int = 0,
  ) -> "QuasitreeInstance":
    delta, sampled = graph_delta(graph, seed)
    if walls is not None:
      space = explicit_walls(graph, K, walls)
    else:
      space = build_walls(graph, K, include_ball_variant)
    space.freeze()
    instance = cls(graph, K, space, delta, spacing_factor * K, sampled, walls is not None)
    if not instance.wide_balls:
      logger.info("K=%d is not above 100 * delta = %s; relaxed regime", K, 100 * delta)
    return instance

  @property
  def wide_balls(self) -> bool:
    """K > 100 delta; below it the lemmas are checked but not expected."""
    return self.K > 100 * self.delta

  @cached_property
  def system(self) -> DisparateSystem:
    return DisparateSystem(self.space, {0: self.graph}, {0: self.spacing}, name="D")

  def chain_index(self, budget: int) -> ChainIndex:
    index = self._indices.get(budget)
    if index is None:
      index = ChainIndex(self.system, budget)
      self._indices[budget] = index
    return index

  def regime(self) -> dict:
    return {
      "K": self.K,
      "delta": self.delta,
      "delta_sampled": self.delta_sampled,
      "spacing": self.spacing,
      "wide_balls": self.wide_balls,
      "walls": len(self.space.walls),
      "explicit_walls": self.explicit,
    }


def is_disparate(walls: Iterable[int], instance: QuasitreeInstance) -> bool:
  """Some choice of one defining ball per wall has pairwise centre distance >= spacing."""
  return instance.system.compatible_labelling(walls) is not None
