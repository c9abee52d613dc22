"""Finite metric spaces: tables, graphs, hyperbolicity and coarse centres."""

import itertools
import logging
import random
from collections.abc import Hashable, Sequence
from fractions import Fraction

import networkx as nx

logger = logging.getLogger(__name__)


class MetricTable:
  """A finite metric space given by labelled points and an integer distance table.

  Points are addressed by index 0..n-1; labels are kept for reporting.
  """

  def __init__(self, labels: Sequence[Hashable], dist: Sequence[Sequence[int]]):
    if not labels:
      raise ValueError("empty instance")
    if len(dist) != len(labels) or any(len(row) != len(labels) for row in dist):
      raise ValueError("distance table does not match the point list")
    self.labels: list[Hashable] = list(labels)
    self.dist: list[list[int]] = [list(row) for row in dist]
    self._index = {label: i for i, label in enumerate(self.labels)}
    if len(self._index) != len(self.labels):
      raise ValueError("duplicate point labels")

  def __len__(self) -> int:
    return len(self.labels)

  @property
  def size(self) -> int:
    return len(self.labels)

  def index(self, label: Hashable) -> int:
    try:
      return self._index[label]
    except KeyError:
      raise ValueError(f"vertex {label!r} not in instance")

  def check_point(self, i: int) -> int:
    if not 0 <= i < len(self.labels):
      raise ValueError(f"vertex index {i} not in instance")
    return i

  def diameter(self) -> int:
    return max(max(row) for row in self.dist)

  def ball(self, center: int, radius: Fraction | int) -> list[int]:
    row = self.dist[center]
    return [p for p in range(self.size) if row[p] <= radius]

  def ball_masks(self) -> list[list[int]]:
    """masks[c][r]: bitmask of the points within r of c, for r up to the diameter."""
    diam = self.diameter()
    table = []
    for row in self.dist:
      masks = [0] * (diam + 1)
      for p, value in enumerate(row):
        masks[value] |= 1 << p
      for r in range(1, diam + 1):
        masks[r] |= masks[r - 1]
      table.append(masks)
    return table

  def neighbourhood(self, points: Sequence[int], radius: int) -> list[int]:
    """Points within radius of the given set."""
    if not points:
      return []
    return [p for p in range(self.size) if min(self.dist[p][q] for q in points) <= radius]

  def validate(self) -> None:
    """Check the metric axioms exhaustively; raises ValueError on the first violation."""
    n = self.size
    for i in range(n):
      if self.dist[i][i] != 0:
        raise ValueError(f"nonzero self distance at {self.labels[i]!r}")
      for j in range(n):
        if self.dist[i][j] != self.dist[j][i]:
          raise ValueError(f"asymmetric distance between {self.labels[i]!r} and {self.labels[j]!r}")
        if i != j and self.dist[i][j] <= 0:
          raise ValueError(f"distinct points {self.labels[i]!r}, {self.labels[j]!r} at distance 0")
    for i, j, k in itertools.product(range(n), repeat=3):
      if self.dist[i][k] > self.dist[i][j] + self.dist[j][k]:
        a, b, c = self.labels[i], self.labels[j], self.labels[k]
        raise ValueError(f"triangle inequality fails for {a!r}, {b!r}, {c!r}")

  def scale_graph(self, scale: int = 1) -> nx.Graph:
    """Graph on point indices joining points at distance at most scale."""
    graph = nx.Graph()
    graph.add_nodes_from(range(self.size))
    for i in range(self.size):
      row = self.dist[i]
      graph.add_edges_from((i, j) for j in range(i + 1, self.size) if row[j] <= scale)
    return graph

  def connectivity_scale(self) -> int:
    """Smallest integer scale at which the scale graph is connected."""
    if self.size == 1:
      return 1
    scale = 1
    while not nx.is_connected(self.scale_graph(scale)):
      scale += 1
    return scale


class MetricGraph(MetricTable):
  """A finite connected graph with its shortest-path metric."""

  def __init__(self, vertices: Sequence[Hashable], edges: Sequence[tuple[Hashable, Hashable]]):
    if not vertices:
      raise ValueError("empty instance")
    graph = nx.Graph()
    graph.add_nodes_from(vertices)
    if graph.number_of_nodes() != len(vertices):
      raise ValueError("duplicate vertices")
    for u, v in edges:
      if u not in graph or v not in graph:
        raise ValueError(f"edge ({u!r}, {v!r}) uses an unknown vertex")
      if u == v:
        raise ValueError(f"self loop at {u!r}")
      if graph.has_edge(u, v):
        raise ValueError(f"duplicate edge ({u!r}, {v!r})")
      graph.add_edge(u, v)
    if not nx.is_connected(graph):
      raise ValueError("graph is not connected")

    order = list(vertices)
    position = {v: i for i, v in enumerate(order)}
    dist = [[0] * len(order) for _ in order]
    for source, lengths in nx.all_pairs_shortest_path_length(graph):
      row = dist[position[source]]
      for target, length in lengths.items():
        row[position[target]] = length
    super().__init__(order, dist)
    self.graph = nx.relabel_nodes(graph, position)

  @property
  def edges(self) -> list[tuple[int, int]]:
    return sorted(tuple(sorted(e)) for e in self.graph.edges())

  def geodesic(self, x: int, y: int) -> list[int]:
    """A deterministic geodesic between two vertices."""
    return nx.shortest_path(self.graph, x, y)


def _four_point(rows: Sequence[Sequence[int]], quad: Sequence[int]) -> int:
  """Twice the four-point defect of a quadruple."""
  x, y, z, w = quad
  sums = sorted((rows[x][y] + rows[z][w], rows[x][z] + rows[y][w], rows[x][w] + rows[y][z]))
  return sums[2] - sums[1]


def _delta_of(space: MetricTable, points: Sequence[int]) -> int:
  rows = space.dist
  best = 0
  for quad in itertools.combinations(points, 4):
    value = _four_point(rows, quad)
    if value > best:
      best = value
  return best


def hyperbolicity_delta(space: MetricTable) -> Fraction:
  """Minimal delta satisfying the four-point condition over all quadruples.

  For graphs the scan runs per biconnected block, which leaves the value unchanged
  and makes trees immediate.
  """
  if space.size == 0:
    raise ValueError("empty instance")
  if isinstance(space, MetricGraph):
    twice = 0
    for block in nx.biconnected_components(space.graph):
      if len(block) >= 4:
        twice = max(twice, _delta_of(space, sorted(block)))
    return Fraction(twice, 2)
  return Fraction(_delta_of(space, range(space.size)), 2)


def estimate_hyperbolicity(
  space: MetricTable, limit: int, seed: int = 0, samples: int = 200000
) -> tuple[Fraction, bool]:
  """Exact delta up to limit points, otherwise a seeded lower bound from sampled quadruples.

  Returns (delta, sampled).
  """
  if space.size <= limit:
    return hyperbolicity_delta(space), False
  rng = random.Random(seed)
  rows = space.dist
  best = 0
  for _ in range(samples):
    quad = rng.sample(range(space.size), 4)
    best = max(best, _four_point(rows, quad))
  logger.warning("hyperbolicity sampled on %d quadruples of %d points", samples, space.size)
  return Fraction(best, 2), True


def gromov_product(space: MetricTable, x: int, y: int, z: int) -> Fraction:
  """The Gromov product of y and z based at x."""
  for p in (x, y, z):
    space.check_point(p)
  d = space.dist
  return Fraction(d[x][y] + d[x][z] - d[y][z], 2)


def coarse_median(space: MetricTable, x: int, y: int, z: int) -> int:
  """A point minimising the total distance to x, y and z; smallest index on ties."""
  for p in (x, y, z):
    space.check_point(p)
  d = space.dist
  return min(range(space.size), key=lambda v: (d[v][x] + d[v][y] + d[v][z], v))


def weak_rough_geodesic_constant(space: MetricTable) -> int:
  """Minimal k making the space k-weakly roughly geodesic over integer radii.

  For x, y and r <= dist(x, y) a witness z must satisfy dist(x, z) >= r - k,
  dist(z, y) >= dist(x, y) - r - k and dist(x, z) + dist(z, y) <= dist(x, y) + k.
  """
  d = space.dist
  n = space.size
  worst = 0
  for x in range(n):
    for y in range(x + 1, n):
      total = d[x][y]
      profile = [(d[x][z], d[z][y], d[x][z] + d[z][y] - total) for z in range(n)]
      for r in range(total + 1):
        need = min(max(0, r - a, total - r - b, excess) for a, b, excess in profile)
        if need > worst:
          worst = need
  return worst
