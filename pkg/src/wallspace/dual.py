"""Working models of dual spaces: median-closed sets of ultrafilters with a chain metric."""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Protocol

from ..core.errors import VerificationError
from ..geometry.metric import MetricTable
from ..utils import bitset
from .chains import ChainIndex
from .ultrafilter import flip_to_halfspace, median, orientation_map, point_ultrafilter
from .walls import MINUS, PLUS, WallSpace

logger = logging.getLogger(__name__)


class ChainMetric(Protocol):
  name: str

  def dist(self, x: int, y: int) -> int: ...


class SumMetric:
  """Sum of per-color chain distances (the l1 combination of factor systems)."""

  def __init__(self, indices: Sequence[ChainIndex], name: str):
    self.indices = list(indices)
    self.name = name

  def dist(self, x: int, y: int) -> int:
    return sum(index.dist(x, y) for index in self.indices)

  @property
  def incomplete_searches(self) -> int:
    return sum(index.incomplete_searches for index in self.indices)


@dataclass
class Closure:
  points: list[int]
  capped: bool


def median_closure(
  space: WallSpace,
  seed: Iterable[int],
  cap: int,
  halfspace_gates: bool = True,
) -> Closure:
  """Close a set of ultrafilters under medians and, optionally, gates to single halfspaces.

  Gates onto balls are not closed under; check_ball_gatedness tests whether they
  already land in the result. New points are only combined with points known at the
  start of their round, so each triple is visited once. Stops adding points at cap.
  """
  if cap <= 0:
    raise ValueError("closure cap must be positive")
  points: list[int] = []
  known: set[int] = set()
  capped = False

  def push(u: int, fresh: list[int]) -> None:
    nonlocal capped
    if u in known:
      return
    if len(known) >= cap:
      capped = True
      return
    known.add(u)
    points.append(u)
    fresh.append(u)

  frontier: list[int] = []
  for u in seed:
    push(u, frontier)

  rounds = 0
  while frontier and not capped:
    rounds += 1
    fresh: list[int] = []
    if halfspace_gates:
      for u in frontier:
        for wall in range(len(space.walls)):
          for s in (MINUS, PLUS):
            push(flip_to_halfspace(space, u, wall, s), fresh)
    snapshot = list(points)
    for a in frontier:
      for i, b in enumerate(snapshot):
        for c in snapshot[i + 1 :]:
          push(median(a, b, c), fresh)
        if capped:
          break
      if capped:
        break
    frontier = fresh
    logger.debug("closure round %d: %d points", rounds, len(points))

  if capped:
    logger.warning("median closure stopped at cap %d", cap)
  return Closure(points, capped)


class DualSpace:
  """A finite set of ultrafilters with the distance of one chain system."""

  def __init__(
    self,
    space: WallSpace,
    metric: ChainMetric,
    points: Sequence[int],
    capped: bool = False,
  ):
    if not points:
      raise ValueError("empty instance")
    self.space = space
    self.metric = metric
    self.points = list(points)
    self.capped = capped
    self._position = {u: i for i, u in enumerate(self.points)}
    if len(self._position) != len(self.points):
      raise ValueError("duplicate dual points")

    self.vertex_points: list[int] = []
    names: dict[int, str] = {}
    for s in range(space.size):
      u = point_ultrafilter(space, s)
      self.vertex_points.append(self._position[u] if u in self._position else -1)
      if u in self._position:
        names.setdefault(self._position[u], str(space.labels[s]))
    labels = [names.get(i, f"*{i}") for i in range(len(self.points))]

    n = len(self.points)
    dist = [[0] * n for _ in range(n)]
    for i in range(n):
      for j in range(i + 1, n):
        dist[i][j] = dist[j][i] = metric.dist(self.points[i], self.points[j])
    self.table = MetricTable(labels, dist)
    logger.info("dual space for %s: %d points", metric.name, n)

  @classmethod
  def from_points(
    cls, space: WallSpace, metric: ChainMetric, cap: int, halfspace_gates: bool = True
  ) -> "DualSpace":
    """Working model: the median closure of the point ultrafilters."""
    seed = [point_ultrafilter(space, s) for s in range(space.size)]
    closure = median_closure(space, seed, cap, halfspace_gates)
    return cls(space, metric, closure.points, closure.capped)

  def __len__(self) -> int:
    return len(self.points)

  @property
  def size(self) -> int:
    return len(self.points)

  @property
  def dist(self) -> list[list[int]]:
    return self.table.dist

  def index(self, u: int) -> int:
    try:
      return self._position[u]
    except KeyError:
      raise VerificationError("ultrafilter outside the working dual")

  def has(self, u: int) -> bool:
    return u in self._position

  def point_of(self, vertex: int) -> int:
    """Dual index of the point ultrafilter of a ground vertex."""
    i = self.vertex_points[vertex]
    if i < 0:
      raise VerificationError(f"point ultrafilter of {self.space.labels[vertex]!r} missing")
    return i

  def median(self, i: int, j: int, k: int) -> int:
    return self.index(median(self.points[i], self.points[j], self.points[k]))

  def ball_mask(self, center: int, radius: int) -> int:
    row = self.table.dist[center]
    return bitset.from_indices(p for p in range(self.size) if row[p] <= radius)

  def to_json(self) -> dict:
    return {
      "system": self.metric.name,
      "capped": self.capped,
      "labels": list(self.table.labels),
      "points": [orientation_map(self.space, u) for u in self.points],
      "dist": self.table.dist,
    }
