"""Exact grid bound: the largest min(|d1|, |d2|) over pairs of mutually crossing chains."""

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from ..utils import bitset

if TYPE_CHECKING:
  from .instance import ProductInstance

logger = logging.getLogger(__name__)

MIN_L = 3


@dataclass
class GridBound:
  raw: int
  L: int
  d1: list[int] = field(default_factory=list)
  d2: list[int] = field(default_factory=list)
  complete: bool = True
  visits: int = 0


def grid_bound(instance: "ProductInstance") -> GridBound:
  """Branch and bound over chains d1 of one color.

  For a fixed d1 the best partner is the longest chain of any color inside the walls
  crossing all of d1. Growing d1 only shrinks that set, so a branch stops as soon as
  the partner length cannot beat the best grid found.
  """
  space = instance.space
  indices = instance.color_indices
  budget = instance.search_budget
  best = 0
  best_pair: tuple[list[int], list[int]] = ([], [])
  visits = 0
  exhausted = False

  def partner(mask: int) -> tuple[int, list[int]]:
    length, walls = 0, []
    for other in indices:
      search = other.longest_within(mask)
      if search.length > length:
        length, walls = search.length, other.chain_walls(search)
    return length, walls

  def grow(index, chain: list[int], candidates: int, mask: int) -> None:
    nonlocal best, best_pair, visits, exhausted
    for b in bitset.iter_bits(candidates):
      wall = index.nodes[b].wall
      crossing = mask & space.cross[wall]
      length, walls = partner(crossing)
      if length <= best:
        continue
      visits += 1
      if visits > budget:
        exhausted = True
        return
      chain.append(wall)
      value = min(len(chain), length)
      if value > best:
        best = value
        best_pair = (list(chain), walls)
      grow(index, chain, candidates & index.succ[b], crossing)
      chain.pop()
      if exhausted:
        return

  for index in indices:
    if exhausted:
      break
    grow(index, [], bitset.full_mask(len(index)), space.all_walls)

  if exhausted:
    logger.warning("grid search stopped after %d nodes; bound is a lower bound", budget)
  result = GridBound(best, max(best, MIN_L), best_pair[0], best_pair[1], not exhausted, visits)
  logger.info("grid bound %d (raw %d)", result.L, result.raw)
  return result


def is_grid(instance: "ProductInstance", d1: list[int], d2: list[int]) -> bool:
  """Every wall of d1 crosses every wall of d2 inside the point set."""
  space = instance.space
  return all((space.cross[h] >> k) & 1 for h in d1 for k in d2)
