import pytest

from src.utils import bitset
from src.wallspace.walls import MINUS, PLUS, Provenance, WallSpace


def chain_space() -> WallSpace:
  """Five points on a line with the cuts after points 0, 1 and 3."""
  space = WallSpace(list("abcde"))
  for cut in (0, 1, 3):
    space.add_wall(bitset.from_indices(range(cut + 1)))
  return space.freeze()


def square_space() -> WallSpace:
  """The corners of a square with its two crossing walls."""
  space = WallSpace(["00", "01", "10", "11"])
  space.add_wall(0b0011)
  space.add_wall(0b0101)
  return space.freeze()


class TestWallSpace:
  """Test wall storage, crossing and chains."""

  def test_minus_side_holds_first_point(self):
    """Test that walls are normalised so point 0 lies on the minus side."""
    space = WallSpace(list("abc"))
    wall = space.add_wall(0b110)

    assert wall.minus == 0b001
    assert wall.plus == 0b110
    assert wall.side_of_point(0) == MINUS
    assert wall.side_of_point(2) == PLUS

  def test_trivial_bipartitions_are_dropped(self):
    space = WallSpace(list("abc"))

    assert space.add_wall(0) is None
    assert space.add_wall(0b111) is None
    assert len(space) == 0

  def test_duplicate_walls_merge_provenance(self):
    """Test that one bipartition added twice is stored once with both origins."""
    space = WallSpace(list("abc"))
    first = space.add_wall(0b001, provenance=[Provenance(0, 1, 1, 0, "C")])
    second = space.add_wall(0b110, provenance=[Provenance(0, 2, 1, 1, "C+B")])

    assert first is second
    assert len(space) == 1
    assert first.centers == [1, 2]

  def test_dedup_by_color(self):
    space = WallSpace(list("abc"), dedup_by_color=True)
    space.add_wall(0b001, color=0)
    space.add_wall(0b001, color=1)

    assert len(space) == 2
    assert space.find(0b001, color=1).color == 1

  def test_frozen_space_rejects_walls(self):
    space = chain_space()

    with pytest.raises(RuntimeError, match="frozen"):
      space.add_wall(0b00001)

  def test_nested_walls_do_not_cross(self):
    space = chain_space()

    assert not any(space.cross)
    assert space.is_chain([0, 1, 2])
    assert not space.is_chain([0, 2, 1])
    assert space.is_chain_set([2, 0, 1])

  def test_square_walls_cross(self):
    space = square_space()

    assert space.crosses(0, 1)
    assert space.cross[0] == 0b10
    assert not space.is_chain_set([0, 1])

  def test_chain_halfspaces_order(self):
    """Test that a chain is oriented as decreasing halfspaces."""
    space = chain_space()

    oriented = space.chain_halfspaces([0, 2, 1])

    sizes = [bitset.popcount(space.walls[w].side(s)) for w, s in oriented]
    assert sizes == sorted(sizes, reverse=True)
    assert [w for w, _ in oriented] == [2, 1, 0]

  def test_forced_orientations(self):
    """Test that choosing a small halfspace forces every halfspace containing it."""
    space = chain_space()

    must_plus, must_minus = space.forced[2][PLUS]
    assert must_plus == 0b111
    assert must_minus == 0

    must_plus, must_minus = space.forced[0][MINUS]
    assert must_minus == 0b111

  def test_side_relative(self):
    space = chain_space()

    assert space.side_relative(0, 2) == MINUS
    assert space.side_relative(2, 0) == PLUS
    assert space.separates_walls(1, 0, 2)

  def test_to_json_uses_labels(self):
    space = WallSpace(list("abc"))
    space.add_wall(0b001, provenance=[Provenance(0, 1, 1, 0, "C")])

    exported = space.to_json()

    assert exported[0]["minus"] == ["a"]
    assert exported[0]["plus"] == ["b", "c"]
    assert exported[0]["provenance"][0]["variant"] == "C"
