import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from ..generator.instances import generate
from ..geometry.metric import MetricGraph

GENERATOR_SPEC = re.compile(r"^\s*([a-z_]+)\s*\(([^)]*)\)\s*$")

GRAPH_KEYS = {"kind", "vertices", "edges", "K", "spacing", "walls"}
PRODUCT_KEYS = {"kind", "factors", "K", "points", "L", "spacing", "cylinder_inflation"}


@dataclass
class GraphInstance:
  """A parsed single-quasitree instance."""

  graph: MetricGraph
  K: int | None = None
  spacing: int | None = None
  walls: list[dict] | None = None


@dataclass
class ProductSpec:
  """A parsed point set in a product of factor graphs."""

  factors: list[MetricGraph]
  Ks: list[int]
  points: list[list[Any]]
  spacing: list[int] | None = None
  L: int | None = None
  cylinder_inflation: int = 0


@dataclass
class ParsedInstance:
  kind: str
  document: dict
  name: str = "instance"
  graph: GraphInstance | None = None
  product: ProductSpec | None = None

  def with_K(self, K: int) -> "ParsedInstance":
    """Override the ball radius of every quasitree in the instance."""
    if K < 1:
      raise ValueError("K must be positive")
    if self.graph is not None:
      self.graph.K = K
    if self.product is not None:
      self.product.Ks = [K] * len(self.product.factors)
    return self


def parse_generator_spec(text: str) -> tuple[str, list[int]] | None:
  """Split "name(a, b)" into its name and integer arguments; None if it is not a call."""
  match = GENERATOR_SPEC.match(text)
  if match is None:
    return None
  name, raw = match.groups()
  args = []
  for part in raw.split(","):
    part = part.strip()
    if not part:
      continue
    try:
      args.append(int(part))
    except ValueError:
      raise ValueError(f"generator argument {part!r} is not an integer")
  return name, args


class InstanceParser:
  """Parser for JSON instance documents and generator specs."""

  def generate(self, spec: str) -> dict:
    """Instance document for a generator spec such as "path(20)"."""
    parsed = parse_generator_spec(spec)
    if parsed is None:
      raise ValueError(f"invalid generator spec {spec!r}")
    return generate(*parsed)

  def parse(self, input_source: str | Path | dict) -> ParsedInstance:
    """Parse an instance from a file path (Path), JSON text (str) or a decoded document."""
    if isinstance(input_source, Path):
      if not input_source.exists():
        raise FileNotFoundError(f"instance file not found: {input_source}")
      input_source = input_source.read_text(encoding="utf-8")

    if isinstance(input_source, str):
      if not input_source.strip():
        raise ValueError("empty instance file")
      try:
        document = json.loads(input_source)
      except json.JSONDecodeError as e:
        raise ValueError(f"Invalid instance JSON: {e}")
    else:
      document = input_source

    if not isinstance(document, dict):
      raise ValueError("instance must be a JSON object")
    kind = document.get("kind", "product" if "factors" in document else "graph")
    if kind == "graph":
      return ParsedInstance("graph", document, graph=self._parse_graph_instance(document))
    if kind == "product":
      return ParsedInstance("product", document, product=self._parse_product(document))
    raise ValueError(f"unknown instance kind {kind!r}")

  def _check_keys(self, document: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(document) - allowed)
    if unknown:
      raise ValueError(f"unknown keys in {where}: {', '.join(unknown)}")

  def _parse_graph(self, document: Any, where: str) -> MetricGraph:
    if not isinstance(document, dict):
      raise ValueError(f"{where} must be an object")
    vertices = document.get("vertices")
    edges = document.get("edges", [])
    if not isinstance(vertices, list) or not vertices:
      raise ValueError("empty instance")
    for v in vertices:
      if not isinstance(v, str | int) or isinstance(v, bool):
        raise ValueError(f"vertex id {v!r} must be a string or an integer")
    pairs = []
    for edge in edges:
      if not isinstance(edge, list) or len(edge) != 2:
        raise ValueError(f"edge {edge!r} must be a pair")
      pairs.append((edge[0], edge[1]))
    return MetricGraph(vertices, pairs)

  def _parse_graph_instance(self, document: dict) -> GraphInstance:
    self._check_keys(document, GRAPH_KEYS, "graph instance")
    graph = self._parse_graph(document, "graph instance")
    K = self._optional_int(document, "K", minimum=1)
    spacing = self._optional_int(document, "spacing", minimum=1)
    walls = document.get("walls")
    if walls is not None:
      if not isinstance(walls, list) or not walls:
        raise ValueError("walls must be a non-empty list")
      for record in walls:
        if not isinstance(record, dict) or "minus" not in record:
          raise ValueError(f"wall {record!r} needs a minus side")
        for v in record["minus"] + record.get("plus", []):
          graph.index(v)
        if "plus" in record:
          covered = set(record["minus"]) | set(record["plus"])
          if len(covered) != graph.size or set(record["minus"]) & set(record["plus"]):
            raise ValueError(f"wall {record['minus']!r} does not split the vertex set")
    return GraphInstance(graph, K, spacing, walls)

  def _parse_product(self, document: dict) -> ProductSpec:
    self._check_keys(document, PRODUCT_KEYS, "product instance")
    raw_factors = document.get("factors")
    if not isinstance(raw_factors, list) or not raw_factors:
      raise ValueError("product instance needs at least one factor")
    factors = [self._parse_graph(f, f"factor {i}") for i, f in enumerate(raw_factors)]
    m = len(factors)
    Ks = self._per_factor(document.get("K", 1), m, "K")
    spacing = None
    if document.get("spacing") is not None:
      spacing = self._per_factor(document["spacing"], m, "spacing")
    points = document.get("points")
    if not isinstance(points, list) or not points:
      raise ValueError("empty instance")
    for point in points:
      if not isinstance(point, list):
        raise ValueError(f"point {point!r} must be a list of coordinates")
    L = self._optional_int(document, "L", minimum=0)
    inflation = self._optional_int(document, "cylinder_inflation", minimum=0) or 0
    return ProductSpec(factors, Ks, points, spacing, L, inflation)

  def _per_factor(self, value: Any, m: int, name: str) -> list[int]:
    values = value if isinstance(value, list) else [value] * m
    if len(values) != m:
      raise ValueError(f"{name} needs one value per factor")
    for v in values:
      if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise ValueError(f"{name} values must be positive integers")
    return values

  def _optional_int(self, document: dict, key: str, minimum: int) -> int | None:
    value = document.get(key)
    if value is None:
      return None
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
      raise ValueError(f"{key} must be an integer of at least {minimum}")
    return value

  def load(self, source: str | Path) -> ParsedInstance:
    """A file path, or a generator spec when no such file exists."""
    path = Path(source)
    if not path.exists() and parse_generator_spec(str(source)) is not None:
      parsed = self.parse(self.generate(str(source)))
      parsed.name = str(source).replace(" ", "")
      return parsed
    parsed = self.parse(path)
    parsed.name = path.stem
    return parsed
