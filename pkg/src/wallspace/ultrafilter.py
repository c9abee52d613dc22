"""Ultrafilters on a wall space, encoded as integers (bit i set = plus side of wall i)."""

from ..core.errors import VerificationError
from ..utils import bitset
from .walls import MINUS, PLUS, WallSpace


def point_ultrafilter(space: WallSpace, s: int) -> int:
  """The principal ultrafilter choosing, for every wall, the halfspace containing s."""
  if not 0 <= s < space.size:
    raise ValueError(f"point {s} not in ground set")
  u = 0
  for wall in space.walls:
    if bitset.has_bit(wall.plus, s):
      u |= 1 << wall.id
  return u


def side(u: int, wall: int) -> int:
  return PLUS if (u >> wall) & 1 else MINUS


def is_ultrafilter(space: WallSpace, u: int) -> bool:
  """True iff the chosen halfspaces pairwise intersect (equivalently, the choice is monotone)."""
  for i in range(len(space.walls)):
    must_plus, must_minus = space.forced[i][side(u, i)]
    if u & must_plus != must_plus or u & must_minus:
      return False
  return True


def median(a: int, b: int, c: int) -> int:
  """Per-wall majority vote."""
  return (a & b) | (a & c) | (b & c)


def checked_median(space: WallSpace, a: int, b: int, c: int) -> int:
  m = median(a, b, c)
  if not is_ultrafilter(space, m):
    raise VerificationError("median of ultrafilters is not an ultrafilter")
  return m


def separating(x: int, y: int) -> int:
  """Mask of walls oriented differently by x and y."""
  return x ^ y


def separates(wall: int, x: int, y: int) -> bool:
  return bool(((x ^ y) >> wall) & 1)


def chosen_halfspace(space: WallSpace, u: int, wall: int) -> int:
  return space.walls[wall].side(side(u, wall))


def flip_to_halfspace(space: WallSpace, u: int, wall: int, target: int) -> int:
  """Gate of u onto the halfspace (wall, target): set it and every wall it forces."""
  if side(u, wall) == target:
    return u
  must_plus, must_minus = space.forced[wall][target]
  return (u | must_plus) & ~must_minus


def orientation_map(space: WallSpace, u: int) -> dict[int, str]:
  """Readable wall id -> side map for reports."""
  return {wall.id: "plus" if side(u, wall.id) == PLUS else "minus" for wall in space.walls}
