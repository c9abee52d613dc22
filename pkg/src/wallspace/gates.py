"""Gated sets of a dual space, described as intersections of halfspaces.

A gated set is a choice of side on a subset of walls. The gate of an ultrafilter
takes those sides on the chosen walls, keeps its own orientation elsewhere, and
then applies whatever the chosen halfspaces force.
"""

from collections.abc import Iterable
from dataclasses import dataclass

from ..core.errors import VerificationError
from ..utils import bitset
from .ultrafilter import is_ultrafilter
from .walls import WallSpace


@dataclass(frozen=True)
class GatedSet:
  """The set of ultrafilters u with u & mask == bits & mask."""

  space: WallSpace
  mask: int
  bits: int

  def __post_init__(self):
    object.__setattr__(self, "bits", self.bits & self.mask)
    for wall in bitset.iter_bits(self.mask):
      must_plus, must_minus = self.space.forced[wall][(self.bits >> wall) & 1]
      if must_plus & self.mask & ~self.bits or must_minus & self.mask & self.bits:
        raise ValueError("empty gated set")

  def contains(self, u: int) -> bool:
    return (u ^ self.bits) & self.mask == 0

  def gate(self, u: int) -> int:
    """Nearest point of the set to u; raises VerificationError if the result is inconsistent."""
    g = (u & ~self.mask) | self.bits
    for wall in bitset.iter_bits(self.mask & (u ^ self.bits)):
      must_plus, must_minus = self.space.forced[wall][(self.bits >> wall) & 1]
      g = (g | must_plus) & ~must_minus
    if not is_ultrafilter(self.space, g):
      raise VerificationError("gate is not an ultrafilter")
    if not self.contains(g):
      raise VerificationError("gate left its set")
    return g

  def members(self, points: Iterable[int]) -> list[int]:
    return [u for u in points if self.contains(u)]

  def separating_walls(self, u: int) -> int:
    """Walls separating u from the set."""
    return (u ^ self.bits) & self.mask


def halfspace(space: WallSpace, wall: int, side: int) -> GatedSet:
  return GatedSet(space, 1 << wall, side << wall)


def interval(space: WallSpace, x: int, y: int) -> GatedSet:
  """[x, y]: the intersection of the halfspaces containing both x and y."""
  mask = space.all_walls & ~(x ^ y)
  return GatedSet(space, mask, x)


def hull(space: WallSpace, points: Iterable[int]) -> GatedSet:
  """Smallest halfspace intersection containing the points."""
  points = list(points)
  if not points:
    raise ValueError("empty gated set")
  first = points[0]
  disagree = 0
  for u in points[1:]:
    disagree |= first ^ u
  return GatedSet(space, space.all_walls & ~disagree, first)


def is_gated_subset(space: WallSpace, model: Iterable[int], subset: Iterable[int]) -> bool:
  """True iff subset equals its halfspace hull inside the working model."""
  subset = set(subset)
  if not subset:
    return False
  closed = hull(space, subset)
  return all(u in subset for u in model if closed.contains(u))
