import pytest

from src.core.errors import VerificationError
from src.utils import bitset
from src.wallspace.gates import GatedSet, halfspace, hull, interval, is_gated_subset
from src.wallspace.ultrafilter import (
  checked_median,
  flip_to_halfspace,
  is_ultrafilter,
  median,
  orientation_map,
  point_ultrafilter,
  separates,
)
from src.wallspace.walls import MINUS, PLUS, WallSpace


@pytest.fixture
def space() -> WallSpace:
  """Five points on a line with the cuts after points 0, 1 and 3."""
  space = WallSpace(list("abcde"))
  for cut in (0, 1, 3):
    space.add_wall(bitset.from_indices(range(cut + 1)))
  return space.freeze()


class TestUltrafilters:
  """Test ultrafilter encoding and the median."""

  def test_point_ultrafilters(self, space):
    """Test each point chooses the plus side of the cuts before it."""
    assert [point_ultrafilter(space, s) for s in range(5)] == [0b000, 0b001, 0b011, 0b011, 0b111]

  def test_point_outside_ground_set(self, space):
    with pytest.raises(ValueError, match="not in ground set"):
      point_ultrafilter(space, 5)

  def test_is_ultrafilter(self, space):
    assert is_ultrafilter(space, 0b011)
    # plus side of the last cut lies inside the plus side of the first
    assert not is_ultrafilter(space, 0b100)

  def test_median_is_majority(self):
    assert median(0b001, 0b011, 0b111) == 0b011
    assert median(0b101, 0b110, 0b000) == 0b100

  def test_checked_median(self, space):
    assert checked_median(space, 0b000, 0b011, 0b111) == 0b011

  def test_checked_median_rejects_non_ultrafilter(self):
    """Test that a median outside the ultrafilters raises."""
    space = WallSpace(list("abc"))
    space.add_wall(0b001)
    space.add_wall(0b011)
    space.freeze()

    with pytest.raises(VerificationError, match="not an ultrafilter"):
      checked_median(space, 0b10, 0b10, 0b00)

  def test_flip_to_halfspace(self, space):
    """Test the gate onto a halfspace applies the orientations it forces."""
    assert flip_to_halfspace(space, 0b000, 2, PLUS) == 0b111
    assert flip_to_halfspace(space, 0b111, 0, MINUS) == 0b000
    assert flip_to_halfspace(space, 0b011, 1, PLUS) == 0b011

  def test_separates(self):
    assert separates(1, 0b001, 0b011)
    assert not separates(0, 0b001, 0b011)

  def test_orientation_map(self, space):
    assert orientation_map(space, 0b001) == {0: "plus", 1: "minus", 2: "minus"}


class TestGatedSets:
  """Test halfspace intersections and their gates."""

  def test_interval_members(self, space):
    points = [point_ultrafilter(space, s) for s in range(5)]

    between = interval(space, points[1], points[3])

    assert between.members(points) == [points[1], points[2], points[3]]

  def test_gate_to_halfspace(self, space):
    target = halfspace(space, 1, PLUS)

    assert target.gate(0b000) == 0b011
    assert target.separating_walls(0b000) == 0b010

  def test_empty_gated_set(self, space):
    """Test that contradictory sides are rejected."""
    with pytest.raises(ValueError, match="empty gated set"):
      GatedSet(space, 0b101, 0b100)

  def test_hull_of_points(self, space):
    points = [point_ultrafilter(space, s) for s in range(5)]

    closed = hull(space, [points[0], points[2]])

    assert closed.members(points) == points[:4]
    assert is_gated_subset(space, points, points[:4])
    assert not is_gated_subset(space, points, [points[0], points[4]])

  def test_hull_of_nothing(self, space):
    with pytest.raises(ValueError, match="empty gated set"):
      hull(space, [])
