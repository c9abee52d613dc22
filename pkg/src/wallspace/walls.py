"""Walls as bitset bipartitions of a finite ground set."""

import logging
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass, field

from ..utils import bitset

logger = logging.getLogger(__name__)

MINUS = 0
PLUS = 1


@dataclass(frozen=True, order=True)
class Provenance:
  """Where a wall came from: a ball of the given radius and one complementary component.

  variant is "C" for (component, rest) and "C+B" for (component and ball, rest). Walls
  supplied explicitly carry variant "explicit".
  """

  color: int
  center: int
  radius: int
  component: int
  variant: str


@dataclass
class Wall:
  """A bipartition of the ground set; minus always holds the smallest point it splits off."""

  id: int
  minus: int
  plus: int
  color: int = 0
  provenance: list[Provenance] = field(default_factory=list)

  def side(self, side: int) -> int:
    return self.plus if side == PLUS else self.minus

  def side_of_point(self, point: int) -> int:
    return PLUS if bitset.has_bit(self.plus, point) else MINUS

  @property
  def centers(self) -> list[int]:
    return sorted({p.center for p in self.provenance})


class WallSpace:
  """A finite set with walls, plus the precomputed crossing and forcing relations.

  Walls are deduplicated by bipartition (and by color when dedup_by_color is set,
  so two factors may contribute the same bipartition of a product subset).
  """

  def __init__(self, labels: Sequence[Hashable], dedup_by_color: bool = False):
    if not labels:
      raise ValueError("empty instance")
    self.labels = list(labels)
    self.size = len(self.labels)
    self.ground = bitset.full_mask(self.size)
    self.dedup_by_color = dedup_by_color
    self.walls: list[Wall] = []
    self._by_key: dict[tuple[int, int], int] = {}
    self._frozen = False

  def __len__(self) -> int:
    return len(self.walls)

  def add_wall(
    self, side: int, color: int = 0, provenance: Iterable[Provenance] = ()
  ) -> Wall | None:
    """Add the bipartition (side, ground - side); trivial bipartitions are dropped.

    Returns the stored wall (possibly an existing one with merged provenance).
    """
    if self._frozen:
      raise RuntimeError("wall space is frozen")
    side &= self.ground
    other = self.ground & ~side
    if side == 0 or other == 0:
      return None
    minus, plus = (side, other) if side & 1 else (other, side)
    key = (color if self.dedup_by_color else 0, minus)
    existing = self._by_key.get(key)
    if existing is not None:
      wall = self.walls[existing]
      for item in provenance:
        if item not in wall.provenance:
          wall.provenance.append(item)
      wall.provenance.sort()
      return wall
    wall = Wall(id=len(self.walls), minus=minus, plus=plus, color=color)
    wall.provenance = sorted(set(provenance))
    self.walls.append(wall)
    self._by_key[key] = wall.id
    return wall

  def find(self, side: int, color: int | None = None) -> Wall | None:
    """Look up the wall with the given bipartition."""
    side &= self.ground
    minus = side if side & 1 else self.ground & ~side
    if self.dedup_by_color:
      if color is None:
        for wall in self.walls:
          if wall.minus == minus:
            return wall
        return None
      index = self._by_key.get((color, minus))
    else:
      index = self._by_key.get((0, minus))
    return None if index is None else self.walls[index]

  def freeze(self) -> "WallSpace":
    """Precompute crossing masks and forced orientations."""
    n = len(self.walls)
    self.cross = [0] * n
    for i in range(n):
      for j in range(i + 1, n):
        if self.crosses(i, j):
          self.cross[i] |= 1 << j
          self.cross[j] |= 1 << i

    # forced[i][s] = (plus_mask, minus_mask): walls forced to plus/minus once wall i takes side s
    self.forced: list[tuple[tuple[int, int], tuple[int, int]]] = []
    for i, wall in enumerate(self.walls):
      sides = []
      for s in (MINUS, PLUS):
        half = wall.side(s)
        must_plus = 0
        must_minus = 0
        for j, other in enumerate(self.walls):
          if j == i:
            continue
          if bitset.is_subset(half, other.plus):
            must_plus |= 1 << j
          elif bitset.is_subset(half, other.minus):
            must_minus |= 1 << j
        if s == PLUS:
          must_plus |= 1 << i
        else:
          must_minus |= 1 << i
        sides.append((must_plus, must_minus))
      self.forced.append((sides[0], sides[1]))
    self.all_walls = bitset.full_mask(n)
    self._frozen = True
    logger.debug("froze wall space with %d points and %d walls", self.size, n)
    return self

  @property
  def frozen(self) -> bool:
    return self._frozen

  def crosses(self, i: int, j: int, ground: int | None = None) -> bool:
    """True iff all four quarterspaces meet the ground set."""
    return crosses(self.walls[i], self.walls[j], self.ground if ground is None else ground)

  def color_mask(self, color: int) -> int:
    return bitset.from_indices(w.id for w in self.walls if w.color == color)

  @property
  def colors(self) -> list[int]:
    return sorted({w.color for w in self.walls})

  def side_relative(self, h: int, k: int) -> int | None:
    """Side of wall k on which wall h lies, or None when they cross or coincide."""
    if h == k:
      return None
    wh, wk = self.walls[h], self.walls[k]
    for a in (MINUS, PLUS):
      for b in (MINUS, PLUS):
        if wh.side(a) & wk.side(b) == 0:
          return 1 - b
    return None

  def separates_walls(self, k: int, h: int, j: int) -> bool:
    """True iff wall k has walls h and j on opposite sides."""
    sh = self.side_relative(h, k)
    sj = self.side_relative(j, k)
    return sh is not None and sj is not None and sh != sj

  def is_chain(self, seq: Sequence[int]) -> bool:
    """Distinct walls, consecutive ones uncrossed, inner walls separating their neighbours."""
    if len(set(seq)) != len(seq):
      return False
    for a, b in zip(seq, seq[1:], strict=False):
      if self.crosses(a, b):
        return False
    return all(
      self.separates_walls(seq[i], seq[i - 1], seq[i + 1]) for i in range(1, len(seq) - 1)
    )

  def chain_halfspaces(self, walls: Iterable[int]) -> list[tuple[int, int]] | None:
    """Orient a wall set as a strictly nested chain.

    Returns (wall, side) pairs in decreasing halfspace order, or None when the set
    is not a chain. The orientation of every wall is forced by the first one.
    """
    ids = list(dict.fromkeys(walls))
    if not ids:
      return []
    anchor = self.walls[ids[0]].minus
    oriented = [(ids[0], MINUS)]
    for w in ids[1:]:
      wall = self.walls[w]
      choice = None
      for s in (MINUS, PLUS):
        half = wall.side(s)
        if half != anchor and (bitset.is_subset(half, anchor) or bitset.is_subset(anchor, half)):
          choice = s
          break
      if choice is None:
        return None
      oriented.append((w, choice))
    oriented.sort(key=lambda item: (-bitset.popcount(self.walls[item[0]].side(item[1])), item[0]))
    for (a, sa), (b, sb) in zip(oriented, oriented[1:], strict=False):
      if not bitset.is_proper_subset(self.walls[b].side(sb), self.walls[a].side(sa)):
        return None
    return oriented

  def is_chain_set(self, walls: Iterable[int]) -> bool:
    return self.chain_halfspaces(walls) is not None

  def to_json(self) -> list[dict]:
    """Export walls as {id, minus, plus, color, provenance} with point labels."""
    exported = []
    for wall in self.walls:
      exported.append(
        {
          "id": wall.id,
          "color": wall.color,
          "minus": [self.labels[i] for i in bitset.iter_bits(wall.minus)],
          "plus": [self.labels[i] for i in bitset.iter_bits(wall.plus)],
          "provenance": [
            {
              "color": p.color,
              "center": p.center,
              "radius": p.radius,
              "component": p.component,
              "variant": p.variant,
            }
            for p in wall.provenance
          ],
        }
      )
    return exported


def crosses(h1: Wall, h2: Wall, ground: int) -> bool:
  """True iff all four intersections h1^(+-) n h2^(+-) n ground are nonempty."""
  return all(
    h1.side(a) & h2.side(b) & ground for a in (MINUS, PLUS) for b in (MINUS, PLUS)
  )
