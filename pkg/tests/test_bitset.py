from src.utils import bitset


class TestBitset:
  """Test integer bitset helpers."""

  def test_from_and_to_indices(self):
    """Test building a mask and reading its positions back."""
    mask = bitset.from_indices([0, 3, 5])

    assert mask == 0b101001
    assert bitset.to_indices(mask) == [0, 3, 5]
    assert bitset.popcount(mask) == 3

  def test_lowest(self):
    assert bitset.lowest(0b10100) == 2
    assert bitset.lowest(0) == -1

  def test_complement_stays_in_range(self):
    """Test complement is taken inside the ground set only."""
    assert bitset.complement(0b0101, 4) == 0b1010
    assert bitset.full_mask(4) == 0b1111

  def test_subsets(self):
    assert bitset.is_subset(0b0100, 0b0110)
    assert not bitset.is_subset(0b1000, 0b0110)
    assert bitset.is_proper_subset(0b0100, 0b0110)
    assert not bitset.is_proper_subset(0b0110, 0b0110)

  def test_has_bit(self):
    assert bitset.has_bit(0b100, 2)
    assert not bitset.has_bit(0b100, 1)
