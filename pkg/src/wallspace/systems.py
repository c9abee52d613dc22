"""Chain systems: decidable families of wall sets closed under subsets.

Every system here is described by eligible walls, candidate labels per wall and a
pairwise compatibility relation on labelled walls. A wall set belongs to the system
when it is a chain and some choice of one label per wall is pairwise compatible.
"""

from collections.abc import Callable, Hashable, Iterable, Sequence

from ..geometry.metric import MetricTable
from .walls import WallSpace

Label = Hashable


class BaseSystem:
  """Shared membership logic for label-based chain systems."""

  name = "base"

  def __init__(self, space: WallSpace):
    if not space.frozen:
      space.freeze()
    self.space = space

  def eligible(self, wall: int) -> bool:
    return True

  def labels(self, wall: int) -> Sequence[Label]:
    return (None,)

  def compatible(self, a: int, la: Label, b: int, lb: Label) -> bool:
    return True

  def parameters(self) -> dict:
    return {}

  def eligible_mask(self) -> int:
    return sum(1 << w.id for w in self.space.walls if self.eligible(w.id))

  def labelling(self, walls: Iterable[int]) -> list[tuple[int, Label]] | None:
    """A pairwise compatible labelling of a chain, or None if the set is not a member."""
    ids = list(dict.fromkeys(walls))
    if self.space.chain_halfspaces(ids) is None:
      return None
    return self.compatible_labelling(ids)

  def compatible_labelling(self, walls: Iterable[int]) -> list[tuple[int, Label]] | None:
    """Pairwise compatible labels for eligible walls, ignoring the chain condition."""
    ids = list(dict.fromkeys(walls))
    if any(not self.eligible(w) for w in ids):
      return None
    ids.sort(key=lambda w: len(self.labels(w)))
    chosen: list[tuple[int, Label]] = []

    def assign(position: int) -> bool:
      if position == len(ids):
        return True
      wall = ids[position]
      for label in self.labels(wall):
        if all(self.compatible(other, lo, wall, label) for other, lo in chosen):
          chosen.append((wall, label))
          if assign(position + 1):
            return True
          chosen.pop()
      return False

    return sorted(chosen) if assign(0) else None

  def contains(self, walls: Iterable[int]) -> bool:
    return self.labelling(walls) is not None


class SingletonSystem(BaseSystem):
  """Only the empty set and single walls."""

  name = "Singletons"

  def compatible(self, a: int, la: Label, b: int, lb: Label) -> bool:
    return False


class DisparateSystem(BaseSystem):
  """Chains whose defining balls can be chosen with pairwise distant centres.

  Labels are ball centres from the wall provenance. Two walls of the same color are
  compatible when their centres are at least the color's spacing apart in that
  color's factor metric; walls of different colors are always compatible, so with
  color=None this is the union-of-colors system restricted to chains.
  """

  def __init__(
    self,
    space: WallSpace,
    metrics: dict[int, MetricTable],
    spacing: dict[int, int],
    color: int | None = None,
    name: str | None = None,
  ):
    super().__init__(space)
    self.metrics = metrics
    self.spacing = spacing
    self.color = color
    self.name = name or ("D" if color is None else f"D_{color}")
    self._labels = []
    for wall in space.walls:
      centers = sorted({p.center for p in wall.provenance if p.color == wall.color})
      self._labels.append(tuple(centers))

  def eligible(self, wall: int) -> bool:
    w = self.space.walls[wall]
    return (self.color is None or w.color == self.color) and bool(self._labels[wall])

  def labels(self, wall: int) -> Sequence[Label]:
    return self._labels[wall]

  def compatible(self, a: int, la: Label, b: int, lb: Label) -> bool:
    ca = self.space.walls[a].color
    if ca != self.space.walls[b].color:
      return True
    return self.metrics[ca].dist[la][lb] >= self.spacing[ca]

  def parameters(self) -> dict:
    return {"color": self.color, "spacing": dict(self.spacing)}


class LChainSystem(BaseSystem):
  """Members of a base system no two of whose walls are crossed by a long base chain.

  pair_max(h, k) is the length of the longest base chain all of whose walls cross
  both h and k; membership asks pair_max <= bound for every pair of the candidate.
  """

  def __init__(
    self,
    base: BaseSystem,
    pair_max: Callable[[int, int], int],
    bound: int,
    name: str,
    color: int | None = None,
  ):
    super().__init__(base.space)
    self.base = base
    self.pair_max = pair_max
    self.bound = bound
    self.name = name
    self.color = color

  def eligible(self, wall: int) -> bool:
    if self.color is not None and self.space.walls[wall].color != self.color:
      return False
    return self.base.eligible(wall)

  def labels(self, wall: int) -> Sequence[Label]:
    return self.base.labels(wall)

  def compatible(self, a: int, la: Label, b: int, lb: Label) -> bool:
    return self.base.compatible(a, la, b, lb) and self.pair_max(a, b) <= self.bound

  def parameters(self) -> dict:
    return {"bound": self.bound, "color": self.color, "base": self.base.name}
