import re
from pathlib import Path

from jinja2 import Environment, FileSystemLoader

from ..cylinders.stability import StabilityEngine, TripleCover
from ..geometry.metric import MetricGraph, MetricTable
from ..utils import bitset
from ..utils.formatting import format_label
from ..wallspace.dual import DualSpace

TEMPLATES_DIR = Path(__file__).parent / "templates"

# fill colours of the triple overlay
ONLY_XY = "lightblue"
ONLY_XZ = "palegreen"
SHARED = "lightgrey"
REMOVED = "salmon"


class TemplateEngine:
  """Renders instances, duals and annotated triples as Graphviz DOT."""

  def __init__(self):
    self._env = Environment(
      loader=FileSystemLoader(TEMPLATES_DIR),
      trim_blocks=True,
      lstrip_blocks=True,
      keep_trailing_newline=True,
    )

    # Custom filters
    self._env.filters["dot_string"] = self._to_dot_string
    self._env.filters["dot_id"] = self._to_dot_id
    self._env.filters["label"] = format_label

  def render(self, template_name: str, **template_vars) -> str:
    """Render a built-in template by name (without the .dot.j2 suffix)."""
    template = self._env.get_template(f"{template_name}.dot.j2")
    return template.render(**template_vars)

  def render_graph(self, name: str, factors: list[MetricGraph]) -> str:
    """The instance: one cluster per factor graph."""
    clusters = []
    for color, graph in enumerate(factors):
      prefix = f"f{color}_" if len(factors) > 1 else "v"
      clusters.append(
        {
          "color": color,
          "nodes": [(f"{prefix}{i}", label) for i, label in enumerate(graph.labels)],
          "edges": [(f"{prefix}{a}", f"{prefix}{b}") for a, b in graph.edges],
        }
      )
    return self.render("graph", name=name, clusters=clusters)

  def render_dual(self, name: str, dual: DualSpace) -> str:
    """The unit-distance graph of a working dual; point ultrafilters are boxed."""
    anchors = {i for i in dual.vertex_points if i >= 0}
    nodes = [(f"p{i}", label, i in anchors) for i, label in enumerate(dual.table.labels)]
    return self.render(
      "dual",
      name=name,
      system=dual.metric.name,
      capped=dual.capped,
      nodes=nodes,
      edges=self._unit_edges(dual.table),
    )

  def render_triple(self, name: str, engine: StabilityEngine, cover: TripleCover) -> str:
    """One triple over the dual: the two cylinders from x and the balls removed from them."""
    table = engine.table
    x, y, z = cover.x, cover.y, cover.z
    xy, xz = engine.cylinder(x, y), engine.cylinder(x, z)
    removed = 0
    owner: dict[int, int] = {}
    for position, ball in enumerate(cover.balls):
      mask = engine.ball(ball.center, ball.radius)
      for p in bitset.iter_bits(mask & ~removed):
        owner[p] = position
      removed |= mask
    nodes = []
    for p, label in enumerate(table.labels):
      fill = None
      if bitset.has_bit(xy, p) and bitset.has_bit(xz, p):
        fill = SHARED
      elif bitset.has_bit(xy, p):
        fill = ONLY_XY
      elif bitset.has_bit(xz, p):
        fill = ONLY_XZ
      if p in owner and (fill == ONLY_XY or fill == ONLY_XZ):
        fill = REMOVED
      role = {x: "x", y: "y", z: "z"}.get(p)
      nodes.append(
        {"id": f"p{p}", "label": label, "fill": fill, "role": role, "ball": owner.get(p)}
      )
    return self.render(
      "triple",
      name=name,
      nodes=nodes,
      edges=self._unit_edges(table),
      balls=[(b.center, b.radius) for b in cover.balls],
      labels=table.labels,
      mode=cover.mode,
      median=table.labels[cover.median],
    )

  def _unit_edges(self, table: MetricTable) -> list[tuple[str, str]]:
    return [(f"p{a}", f"p{b}") for a, b in sorted(table.scale_graph(1).edges())]

  def _to_dot_string(self, value) -> str:
    """Quote any label as a DOT string literal."""
    text = format_label(value)
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'

  def _to_dot_id(self, text: str) -> str:
    """Reduce text to a bare DOT identifier."""
    cleaned = re.sub(r"[^a-zA-Z0-9_]", "_", text)
    if not cleaned or cleaned[0].isdigit():
      cleaned = "_" + cleaned
    return cleaned

  def list_available_templates(self) -> list[str]:
    """List available built-in templates."""
    if not TEMPLATES_DIR.exists():
      return []
    return sorted(path.name.removesuffix(".dot.j2") for path in TEMPLATES_DIR.glob("*.dot.j2"))
