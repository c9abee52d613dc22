"""Carrying cylinders along a coarse map phi: Y -> X.

C^Y(a, b) is the kappa-neighbourhood of the points whose image lies in
C^X(phi a, phi b). Covers move across by re-centring each X-ball at the nearest
preimage of its centre; whatever that misses is absorbed by a ball at the median.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from functools import cached_property

import networkx as nx

from ..core.report import CheckResult
from ..geometry.metric import MetricGraph, MetricTable, coarse_median
from ..utils import bitset
from .stability import (
  Ball,
  StabilityCertificate,
  StabilityEngine,
  TripleCover,
  global_certificate,
  recheck,
  select_triples,
  triple_key,
)

logger = logging.getLogger(__name__)


@dataclass
class PointMap:
  """phi as a list of target indices; distances are expected to grow by scale."""

  source: MetricTable
  target: MetricTable
  phi: list[int]
  scale: int = 1

  def __post_init__(self):
    if len(self.phi) != self.source.size:
      raise ValueError("point map needs one image per source point")
    for image in self.phi:
      self.target.check_point(image)

  @property
  def is_identity(self) -> bool:
    return self.source is self.target and self.phi == list(range(self.source.size))

  @cached_property
  def psi(self) -> list[int]:
    """Quasiinverse: for each target point the source point with the nearest image."""
    d = self.target.dist
    return [
      min(range(self.source.size), key=lambda a: (d[self.phi[a]][q], a))
      for q in range(self.target.size)
    ]

  def distortion(self) -> tuple[int, tuple[int, int] | None]:
    """Largest |d_Y(a, b) - scale * d_X(phi a, phi b)| and a pair attaining it."""
    dy, dx = self.source.dist, self.target.dist
    worst, pair = 0, None
    n = self.source.size
    for a in range(n):
      for b in range(a + 1, n):
        value = abs(dy[a][b] - self.scale * dx[self.phi[a]][self.phi[b]])
        if value > worst:
          worst, pair = value, (a, b)
    return worst, pair


def identity_map(table: MetricTable) -> PointMap:
  return PointMap(table, table, list(range(table.size)))


def subdivision_map(table: MetricTable) -> PointMap:
  """Subdivide every edge of the connectivity-scale graph; midpoints map to their lower end."""
  scale = table.connectivity_scale()
  edges = sorted(tuple(sorted(e)) for e in table.scale_graph(scale).edges())
  names = [str(label) for label in table.labels]
  vertices = list(names)
  links = []
  phi = list(range(table.size))
  for a, b in edges:
    middle = f"{names[a]}~{names[b]}"
    vertices.append(middle)
    links.extend([(names[a], middle), (middle, names[b])])
    phi.append(a)
  graph = MetricGraph(vertices, links)
  logger.info("subdivided %d edges at scale %d", len(edges), scale)
  return PointMap(graph, table, phi, scale=2)


def collapse_map(table: MetricTable) -> PointMap:
  """Contract a maximal matching of the connectivity-scale graph onto its lower ends."""
  scale = table.connectivity_scale()
  graph = table.scale_graph(scale)
  partner = dict(sorted(tuple(sorted(e)) for e in nx.maximal_matching(graph)))
  block = list(range(table.size))
  for a, b in partner.items():
    block[b] = a
  names = [str(label) for label in table.labels]
  kept = sorted(set(block))
  vertices = [f"{names[a]}+{names[partner[a]]}" if a in partner else names[a] for a in kept]
  position = {a: i for i, a in enumerate(kept)}
  links = sorted(
    {tuple(sorted((position[block[a]], position[block[b]]))) for a, b in graph.edges()}
    - {(i, i) for i in range(len(kept))}
  )
  quotient = MetricGraph(vertices, [(vertices[i], vertices[j]) for i, j in links])
  logger.info("collapsed %d pairs at scale %d", len(partner), scale)
  return PointMap(quotient, table, kept)


class TransferredCylinders:
  """C^Y built from an X cylinder assignment and a point map."""

  def __init__(self, mapping: PointMap, cylinder: Callable[[int, int], int], kappa: int):
    if kappa < 0:
      raise ValueError("kappa must be non-negative")
    self.mapping = mapping
    self.cylinder_x = cylinder
    self.kappa = kappa
    self.balls = mapping.source.ball_masks()
    self.preimage = [0] * mapping.target.size
    for a, image in enumerate(mapping.phi):
      self.preimage[image] |= 1 << a
    self._masks: dict[tuple[int, int], int] = {}

  def mask(self, a: int, b: int) -> int:
    key = (a, b) if a <= b else (b, a)
    cached = self._masks.get(key)
    if cached is None:
      phi = self.mapping.phi
      pulled = 0
      for q in bitset.iter_bits(self.cylinder_x(phi[a], phi[b])):
        pulled |= self.preimage[q]
      cached = 0
      radius = min(self.kappa, len(self.balls[0]) - 1)
      for p in bitset.iter_bits(pulled):
        cached |= self.balls[p][radius]
      self._masks[key] = cached
    return cached


def transfer_cylinders(
  mapping: PointMap,
  cylinder: Callable[[int, int], int],
  kappa: int = 0,
  max_distortion: int | None = None,
) -> TransferredCylinders:
  """Build C^Y; with max_distortion set, a map that distorts more raises ValueError."""
  if max_distortion is not None:
    worst, pair = mapping.distortion()
    if worst > max_distortion:
      labels = mapping.source.labels
      raise ValueError(
        f"map is not a quasiisometry at distortion {max_distortion}: "
        f"{labels[pair[0]]!r}, {labels[pair[1]]!r} distorted by {worst}"
      )
  return TransferredCylinders(mapping, cylinder, kappa)


def transferred_cover(
  x_engine: StabilityEngine,
  x_cover: TripleCover,
  y_engine: StabilityEngine,
  mapping: PointMap,
  a: int,
  b: int,
  c: int,
) -> TripleCover:
  """Move an X cover to the Y triple (a, b, c)."""
  a, b, c = triple_key(a, b, c)
  dx, dy = x_engine.table.dist, y_engine.table.dist
  phi, psi = mapping.phi, mapping.psi
  y_median = y_engine.median(a, b, c)
  diff = y_engine.difference(a, b, c)

  radii: dict[int, int] = {}
  residue = []
  for p in bitset.iter_bits(diff):
    for i, ball in enumerate(x_cover.balls):
      if dx[ball.center][phi[p]] <= ball.radius:
        radii[i] = max(radii.get(i, 0), dy[psi[ball.center]][p])
        break
    else:
      residue.append(p)

  extra = None
  if residue:
    median_index = next(
      (i for i, ball in enumerate(x_cover.balls) if ball.center == x_cover.median), None
    )
    if median_index is not None:
      center = psi[x_cover.median]
      radii[median_index] = max(
        [radii.get(median_index, 0)] + [dy[center][p] for p in residue]
      )
    else:
      extra = Ball(y_median, max(dy[y_median][p] for p in residue))

  balls = [Ball(psi[x_cover.balls[i].center], radii[i]) for i in sorted(radii)]
  if extra is not None:
    balls.append(extra)
  return TripleCover(a, b, c, balls, x_cover.mode, y_median, x_cover.median_ball)


def y_engine_for(
  mapping: PointMap, cylinders: TransferredCylinders, bound: int
) -> StabilityEngine:
  table = mapping.source
  return StabilityEngine(
    table, cylinders.mask, lambda a, b, c: coarse_median(table, a, b, c), bound
  )


def check_transfer(
  x_engine: StabilityEngine,
  x_certificate: StabilityCertificate,
  mapping: PointMap,
  cylinders: TransferredCylinders,
  triple_limit: int,
  seed: int = 0,
  threads: int = 1,
) -> tuple[StabilityCertificate, list[CheckResult]]:
  """Certificate on Y and the ball-count comparison with X."""
  y_engine = y_engine_for(mapping, cylinders, x_certificate.k + 1)
  triples, sampled = select_triples(mapping.source.size, triple_limit, seed)
  y_certificate = global_certificate(y_engine, triples, sampled, threads=threads)

  labels = mapping.source.labels
  counts = CheckResult("transfer ball count", passed=True, partial=sampled)
  sound = CheckResult("transfer recheck", passed=True, partial=sampled)
  worst_radius = 0
  phi = mapping.phi
  for t in sorted({triple_key(*t) for t in triples}):
    key = triple_key(phi[t[0]], phi[t[1]], phi[t[2]])
    x_cover = x_certificate.covers.get(key) or x_engine.cover(*key, x_certificate.R)
    cover = transferred_cover(x_engine, x_cover, y_engine, mapping, *t)
    worst_radius = max(worst_radius, cover.R)
    allowed = x_cover.k if x_cover.median_ball else x_cover.k + 1
    if counts.passed and cover.k > allowed:
      counts.passed = False
      counts.witness = {"triple": [labels[v] for v in t], "k_Y": cover.k, "k_X": x_cover.k}
    if sound.passed and not recheck(y_engine, cover):
      sound.passed = False
      sound.witness = {"triple": [labels[v] for v in t]}
  distortion, pair = mapping.distortion()
  counts.details = {
    "k_X": x_certificate.k,
    "R_X": x_certificate.R,
    "k_Y": y_certificate.k,
    "R_Y": y_certificate.R,
    "transferred_R": worst_radius,
    "kappa": cylinders.kappa,
    "distortion": distortion,
    "scale": mapping.scale,
    "points": mapping.source.size,
  }
  checks = [counts, sound]

  if mapping.is_identity and cylinders.kappa == 0:
    identical = CheckResult("identity transfer", passed=True)
    n = mapping.source.size
    for i in range(n):
      for j in range(i, n):
        if cylinders.mask(i, j) != x_engine.cylinder(i, j):
          identical.passed = False
          identical.witness = {"pair": [labels[i], labels[j]]}
          break
      if not identical.passed:
        break
    same = global_certificate(
      StabilityEngine(
        mapping.source, cylinders.mask, x_engine.median, x_engine.bound, x_engine.centres
      ),
      triples, sampled, threads=threads,
    )
    if identical.passed and (same.k, same.R, same.pareto) != (
      x_certificate.k, x_certificate.R, x_certificate.pareto
    ):
      identical.passed = False
      identical.message = "certificate changed under the identity map"
    checks.append(identical)
  return y_certificate, checks
