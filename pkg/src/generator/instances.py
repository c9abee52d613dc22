"""Bundled instance generators.

Every generator returns an instance document in the JSON interchange format: graph
instances as {"kind": "graph", "vertices", "edges"} and product instances as
{"kind": "product", "factors", "K", "points"}.
"""

import random
from collections.abc import Callable

import networkx as nx


def _graph(vertices: list, edges: list) -> dict:
  return {"kind": "graph", "vertices": vertices, "edges": [list(e) for e in edges]}


def _factor(document: dict) -> dict:
  return {"vertices": document["vertices"], "edges": document["edges"]}


def _product(factors: list[dict], points: list[list], K: list[int] | None = None) -> dict:
  return {
    "kind": "product",
    "factors": [_factor(f) for f in factors],
    "K": K or [1] * len(factors),
    "points": points,
  }


def _positive(name: str, value: int, minimum: int = 1) -> None:
  if value < minimum:
    raise ValueError(f"{name} needs an argument of at least {minimum}, got {value}")


def path(n: int) -> dict:
  """P_n: vertices 0..n."""
  _positive("path", n)
  return _graph(list(range(n + 1)), [(i, i + 1) for i in range(n)])


def cycle(n: int) -> dict:
  _positive("cycle", n, 3)
  return _graph(list(range(n)), [(i, (i + 1) % n) for i in range(n)])


def star(k: int) -> dict:
  """Centre 0 with leaves 1..k."""
  _positive("star", k)
  return _graph(list(range(k + 1)), [(0, i) for i in range(1, k + 1)])


def tripod(a: int, b: int, c: int) -> dict:
  """Three legs of lengths a, b and c glued at vertex 0."""
  for leg in (a, b, c):
    _positive("tripod", leg)
  vertices = [0]
  edges = []
  for length in (a, b, c):
    previous = 0
    for _ in range(length):
      vertex = len(vertices)
      vertices.append(vertex)
      edges.append((previous, vertex))
      previous = vertex
  return _graph(vertices, edges)


def _random_tree_graph(n: int, seed: int) -> nx.Graph:
  if n <= 2:
    return nx.path_graph(n)
  rng = random.Random(seed)
  return nx.from_prufer_sequence([rng.randrange(n) for _ in range(n - 2)])


def random_tree(n: int, seed: int = 0) -> dict:
  """Uniform labelled tree on n vertices from a seeded Prufer sequence."""
  _positive("random_tree", n)
  tree = _random_tree_graph(n, seed)
  return _graph(list(range(n)), sorted(tuple(sorted(e)) for e in tree.edges()))


def _reduced_words(rank: int, radius: int) -> list[str]:
  letters = [chr(ord("a") + i) for i in range(rank)]
  alphabet = letters + [c.upper() for c in letters]
  words = [""]
  frontier = [""]
  for _ in range(radius):
    grown = []
    for word in frontier:
      for letter in alphabet:
        if word and word[-1] == letter.swapcase():
          continue
        grown.append(word + letter)
    words.extend(grown)
    frontier = grown
  return words


def _word_label(word: str) -> str:
  return word or "e"


def free_group_ball(rank: int, radius: int) -> dict:
  """Ball of the given radius in the Cayley tree of the free group of the given rank."""
  _positive("free_group_ball", rank)
  _positive("free_group_ball", radius, 0)
  words = _reduced_words(rank, radius)
  edges = [(_word_label(w[:-1]), _word_label(w)) for w in words if w]
  return _graph([_word_label(w) for w in words], edges)


def staircase(n: int) -> dict:
  """Lattice staircase from (0, 0) to (n, n) inside P_n x P_n."""
  _positive("staircase", n)
  points = [[0, 0]]
  for i in range(n):
    points.append([i + 1, i])
    points.append([i + 1, i + 1])
  return _product([path(n), path(n)], points)


def diagonal_tree(n: int, seed: int = 0) -> dict:
  """A random tree T embedded diagonally in T x T."""
  tree = random_tree(n, seed)
  return _product([tree, tree], [[v, v] for v in tree["vertices"]])


def grid(n: int) -> dict:
  """The full product P_n x P_n."""
  _positive("grid", n)
  return _product([path(n), path(n)], [[i, j] for i in range(n + 1) for j in range(n + 1)])


def _exponent_sum(word: str) -> int:
  return sum(1 if c.islower() else -1 for c in word)


def free_group_product(radius: int) -> dict:
  """Ball of F_2 mapped to (Cayley tree, exponent sum line)."""
  ball = free_group_ball(2, radius)
  line = _graph(list(range(-radius, radius + 1)), [(i, i + 1) for i in range(-radius, radius)])
  words = _reduced_words(2, radius)
  points = [[_word_label(w), _exponent_sum(w)] for w in words]
  return _product([ball, line], points)


GENERATORS: dict[str, tuple[Callable[..., dict], int, int]] = {
  "path": (path, 1, 1),
  "cycle": (cycle, 1, 1),
  "star": (star, 1, 1),
  "tripod": (tripod, 3, 3),
  "random_tree": (random_tree, 1, 2),
  "free_group_ball": (free_group_ball, 2, 2),
  "staircase": (staircase, 1, 1),
  "diagonal_tree": (diagonal_tree, 1, 2),
  "grid": (grid, 1, 1),
  "free_group_product": (free_group_product, 1, 1),
}


def generate(name: str, args: list[int]) -> dict:
  """Run a bundled generator; raises ValueError for unknown names or wrong arity."""
  entry = GENERATORS.get(name)
  if entry is None:
    raise ValueError(f"unknown generator {name!r}")
  function, low, high = entry
  if not low <= len(args) <= high:
    expected = str(low) if low == high else f"{low} to {high}"
    raise ValueError(f"generator {name!r} takes {expected} arguments, got {len(args)}")
  return function(*args)


def list_generators() -> list[str]:
  return sorted(GENERATORS)
