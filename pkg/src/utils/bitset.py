"""Integer-backed bitsets over a fixed index range."""

from collections.abc import Iterable, Iterator


def popcount(mask: int) -> int:
  """Count set bits."""
  return mask.bit_count()


def from_indices(indices: Iterable[int]) -> int:
  """Build a mask with the given bit positions set."""
  mask = 0
  for i in indices:
    mask |= 1 << i
  return mask


def iter_bits(mask: int) -> Iterator[int]:
  """Yield set bit positions in increasing order."""
  while mask:
    low = mask & -mask
    yield low.bit_length() - 1
    mask ^= low


def to_indices(mask: int) -> list[int]:
  return list(iter_bits(mask))


def lowest(mask: int) -> int:
  """Position of the lowest set bit, or -1 for the empty mask."""
  return (mask & -mask).bit_length() - 1


def full_mask(size: int) -> int:
  return (1 << size) - 1


def complement(mask: int, size: int) -> int:
  return ~mask & full_mask(size)


def is_subset(a: int, b: int) -> bool:
  return a & ~b == 0


def is_proper_subset(a: int, b: int) -> bool:
  return a != b and a & ~b == 0


def has_bit(mask: int, i: int) -> bool:
  return (mask >> i) & 1 == 1
