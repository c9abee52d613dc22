"""Global (k, R)-stability of a cylinder assignment, certified triple by triple.

For a triple (x, y, z) the two cylinders C(x, y) and C(x, z) must agree inside the
ball about x whose radius is the Gromov product <y, z>_x once a few balls are cut
out. Cutting out balls equalises the two sets exactly when the balls cover their
symmetric difference inside that ball, so each triple is a small set cover problem.
"""

import logging
import random
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from ..core.report import CheckResult
from ..geometry.metric import MetricTable
from ..utils import bitset
from .intervals import IntervalModel

logger = logging.getLogger(__name__)

EMPTY = "empty"
CLUSTERED = "clustered"
EXACT = "exact"
GREEDY = "greedy"

# certificate vocabulary: covers built from the median ball and gate clusters, or the fallback
PROOF_SHAPED = "proof-shaped"
FALLBACK = "greedy"
SHAPES = {EMPTY: PROOF_SHAPED, CLUSTERED: PROOF_SHAPED, EXACT: FALLBACK, GREEDY: FALLBACK}

TRIPLE_SAMPLES = 2000


@dataclass(frozen=True)
class Ball:
  center: int
  radius: int


@dataclass
class TripleCover:
  """Balls removed for one triple; median_ball marks a ball centred on the median."""

  x: int
  y: int
  z: int
  balls: list[Ball]
  mode: str
  median: int
  median_ball: bool = False

  @property
  def k(self) -> int:
    return len(self.balls)

  @property
  def R(self) -> int:
    return max((b.radius for b in self.balls), default=0)


@dataclass
class StabilityCertificate:
  k: int
  R: int
  bound: int
  pareto: list[tuple[int, int]]
  covers: dict[tuple[int, int, int], TripleCover]
  failures: list[dict] = field(default_factory=list)
  triples_checked: int = 0
  sampled: bool = False
  epsilon: int | None = None
  theta: int | None = None
  morse: int | None = None

  @property
  def passed(self) -> bool:
    return not self.failures and self.k <= self.bound

  @property
  def proof_shaped_fraction(self) -> Fraction:
    nonempty = [c for c in self.covers.values() if c.mode != EMPTY]
    if not nonempty:
      return Fraction(1)
    return Fraction(sum(c.mode == CLUSTERED for c in nonempty), len(nonempty))

  def to_json(self, labels: list) -> dict:
    def ball(b: Ball) -> dict:
      return {"center": labels[b.center], "radius": b.radius}

    triples = [
      {
        "x": labels[c.x],
        "y": labels[c.y],
        "z": labels[c.z],
        "balls": [ball(b) for b in c.balls],
        "mode": SHAPES[c.mode],
        "search": c.mode,
      }
      for _, c in sorted(self.covers.items())
      if c.balls
    ]
    return {
      "k": self.k,
      "R": self.R,
      "bound": self.bound,
      "epsilon": self.epsilon,
      "theta": self.theta,
      "morse": self.morse,
      "pareto": [list(p) for p in self.pareto],
      "unordered_pairs": True,
      "sampled": self.sampled,
      "triples_checked": self.triples_checked,
      "proof_shaped_fraction": self.proof_shaped_fraction,
      "triples": triples,
      "failures": self.failures,
    }


def triple_key(x: int, y: int, z: int) -> tuple[int, int, int]:
  return (x, y, z) if y <= z else (x, z, y)


def select_triples(
  size: int, limit: int, seed: int = 0
) -> tuple[list[tuple[int, int, int]], bool]:
  """Every (x, {y, z}) for small spaces, a seeded sample above limit points."""
  if size <= limit:
    triples = [
      (x, y, z) for x in range(size) for y in range(size) for z in range(y, size)
    ]
    return triples, False
  rng = random.Random(seed)
  sample = {triple_key(*(rng.randrange(size) for _ in range(3))) for _ in range(TRIPLE_SAMPLES)}
  return sorted(sample), True


class StabilityEngine:
  """Set-cover searches for the triples of one metric space with a cylinder assignment.

  cylinder(a, b) returns a bitmask of points; median(x, y, z) returns a point. The
  optional centres(x, y, z, r) proposes ball centres besides the median, in order.
  """

  def __init__(
    self,
    table: MetricTable,
    cylinder: Callable[[int, int], int],
    median: Callable[[int, int, int], int],
    bound: int,
    centres: Callable[[int, int, int, int], list[int]] | None = None,
  ):
    self.table = table
    self.cylinder = cylinder
    self.median = median
    self.bound = bound
    self.centres = centres
    self.balls = table.ball_masks()
    self.diameter = len(self.balls[0]) - 1

  def ball(self, center: int, radius: int) -> int:
    masks = self.balls[center]
    return masks[min(radius, self.diameter)]

  def gromov_radius(self, x: int, y: int, z: int) -> int:
    d = self.table.dist
    return (d[x][y] + d[x][z] - d[y][z]) // 2

  def difference(self, x: int, y: int, z: int) -> int:
    """Points of the Gromov ball about x lying in exactly one of C(x, y), C(x, z)."""
    if y == z:
      return 0
    return (self.cylinder(x, y) ^ self.cylinder(x, z)) & self.ball(x, self.gromov_radius(x, y, z))

  def exact_cover(self, diff: int, radius: int, limit: int) -> list[int] | None:
    """Fewest centres of radius-balls covering diff, if at most limit suffice."""
    n = len(self.balls)
    masks = [self.ball(c, radius) & diff for c in range(n)]

    def search(remaining: int, depth: int) -> list[int] | None:
      if not remaining:
        return []
      if depth == 0:
        return None
      target = bitset.lowest(remaining)
      seen = set()
      for c in range(n):
        covered = masks[c] & remaining
        if not (covered >> target) & 1 or covered in seen:
          continue
        seen.add(covered)
        rest = search(remaining & ~covered, depth - 1)
        if rest is not None:
          return [c, *rest]
      return None

    for depth in range(limit + 1):
      found = search(diff, depth)
      if found is not None:
        return found
    return None

  def greedy_cover(self, diff: int, radius: int) -> list[int]:
    chosen = []
    remaining = diff
    while remaining:
      best = max(
        range(len(self.balls)),
        key=lambda c: (bitset.popcount(self.ball(c, radius) & remaining), -c),
      )
      chosen.append(best)
      remaining &= ~self.ball(best, radius)
    return chosen

  def profile(self, x: int, y: int, z: int) -> list[int]:
    """Minimal ball count for every radius 0..diameter (greedy above the bound)."""
    diff = self.difference(x, y, z)
    counts = []
    previous = None
    for radius in range(self.diameter + 1):
      if not diff:
        counts.append(0)
        continue
      if previous is not None and previous <= 1:
        counts.append(previous)
        continue
      found = self.exact_cover(diff, radius, self.bound)
      k = len(found) if found is not None else len(self.greedy_cover(diff, radius))
      if previous is not None:
        k = min(k, previous)
      counts.append(k)
      previous = k
    return counts

  def _tight(self, diff: int, centres: list[int]) -> list[Ball]:
    """Assign each point of diff to its nearest centre; radii are what the assignment needs."""
    d = self.table.dist
    radii: dict[int, int] = {}
    for p in bitset.iter_bits(diff):
      best = min(centres, key=lambda c: (d[c][p], centres.index(c)))
      radii[best] = max(radii.get(best, 0), d[best][p])
    return [Ball(c, radii[c]) for c in centres if c in radii]

  def cover(self, x: int, y: int, z: int, R: int) -> TripleCover:
    """Median ball and proposed centres first, then an exact search, then greedy."""
    x, y, z = triple_key(x, y, z)
    mu = self.median(x, y, z)
    diff = self.difference(x, y, z)
    if not diff:
      return TripleCover(x, y, z, [], EMPTY, mu)

    centres = [mu]
    if self.centres is not None:
      for c in self.centres(x, y, z, self.table.dist[x][mu]):
        if c not in centres:
          centres.append(c)
    balls = self._tight(diff, centres)
    if len(balls) <= self.bound and all(b.radius <= R for b in balls):
      return TripleCover(x, y, z, balls, CLUSTERED, mu, any(b.center == mu for b in balls))

    found = self.exact_cover(diff, R, self.bound)
    mode = EXACT
    if found is None:
      found = self.greedy_cover(diff, R)
      mode = GREEDY
    balls = self._tight(diff, found)
    return TripleCover(x, y, z, balls, mode, mu, any(b.center == mu for b in balls))


def recheck(engine: StabilityEngine, cover: TripleCover) -> bool:
  """Evaluate the stability equation for a cover with plain sets and the distance table."""
  d = engine.table.dist
  n = engine.table.size
  x, y, z = cover.x, cover.y, cover.z
  rho = Fraction(d[x][y] + d[x][z] - d[y][z], 2)
  gromov_ball = frozenset(p for p in range(n) if d[x][p] <= rho)
  removed = frozenset(p for b in cover.balls for p in range(n) if d[b.center][p] <= b.radius)
  cxy = frozenset(bitset.iter_bits(engine.cylinder(x, y)))
  cxz = frozenset(bitset.iter_bits(engine.cylinder(x, z)))
  return (cxy & gromov_ball) - removed == (cxz & gromov_ball) - removed


def global_certificate(
  engine: StabilityEngine,
  triples: list[tuple[int, int, int]],
  sampled: bool = False,
  R: int | None = None,
  threads: int = 1,
) -> StabilityCertificate:
  """Smallest R at which every triple needs at most bound balls, and the covers at that R."""
  triples = sorted({triple_key(*t) for t in triples})
  if threads > 1:
    with ThreadPoolExecutor(max_workers=threads) as pool:
      profiles = list(pool.map(lambda t: engine.profile(*t), triples))
  else:
    profiles = [engine.profile(*t) for t in triples]

  worst = [max((p[r] for p in profiles), default=0) for r in range(engine.diameter + 1)]
  pareto = [(r, k) for r, k in enumerate(worst) if r == 0 or k < worst[r - 1]]
  if R is None:
    R = next(r for r, k in enumerate(worst) if k <= engine.bound)

  covers = {}
  failures = []
  for t in triples:
    cover = engine.cover(*t, R)
    covers[t] = cover
    if cover.k > engine.bound or cover.R > R:
      labels = engine.table.labels
      failures.append(
        {
          "triple": [labels[v] for v in t],
          "difference": [labels[p] for p in bitset.iter_bits(engine.difference(*t))],
          "k": cover.k,
        }
      )
  k = max((c.k for c in covers.values()), default=0)
  logger.info("stability certificate: k=%d R=%d over %d triples", k, R, len(triples))
  return StabilityCertificate(k, R, engine.bound, pareto, covers, failures, len(triples), sampled)


def check_certificate(
  engine: StabilityEngine, certificate: StabilityCertificate
) -> list[CheckResult]:
  """The bound itself and an independent re-evaluation of every recorded cover."""
  labels = engine.table.labels
  bound = CheckResult(
    "global stability",
    passed=certificate.passed,
    partial=certificate.sampled,
    witness=certificate.failures[0] if certificate.failures else None,
    details={
      "k": certificate.k,
      "R": certificate.R,
      "bound": certificate.bound,
      "proof_shaped_fraction": certificate.proof_shaped_fraction,
      "triples": certificate.triples_checked,
    },
  )
  sound = CheckResult("certificate recheck", passed=True)
  for cover in certificate.covers.values():
    if not recheck(engine, cover):
      sound.passed = False
      sound.witness = {"triple": [labels[v] for v in (cover.x, cover.y, cover.z)]}
      break
  return [bound, sound]


def cluster_centres(model: IntervalModel) -> Callable[[int, int, int, int], list[int]]:
  """Cluster centres of gate sets for both sides of a triple."""

  def centres(x: int, y: int, z: int, r: int) -> list[int]:
    found = []
    for a, b in ((y, z), (z, y)):
      for cluster in model.gate_clusters(x, a, b, r):
        found.append(model.cluster_center(cluster))
    return found

  return centres


def engine_for(model: IntervalModel, cylinder: Callable[[int, int], int]) -> StabilityEngine:
  return StabilityEngine(
    model.dual.table, cylinder, model.dual.median, 2 * model.m + 1, cluster_centres(model)
  )


@dataclass
class TripleWitness:
  """Lemma-level data for one triple alongside its cover."""

  cover: TripleCover
  median_gap: Fraction
  nonseparating_violation: int | None
  clusters: list[int]
  cluster_radius_ok: bool


def verify_stability(
  model: IntervalModel, engine: StabilityEngine, x: int, y: int, z: int, R: int
) -> TripleWitness:
  """The cover of one triple together with the facts its clustered cover relies on."""
  d = model.dual.dist
  cover = engine.cover(x, y, z, R)
  mu = cover.median
  r = d[x][mu]
  rho = Fraction(d[x][y] + d[x][z] - d[y][z], 2)
  points = model.dual.points

  violation = None
  for wall in model.filtration(x, y, r - 1):
    if ((points[x] ^ points[z]) >> wall.wall) & 1:
      violation = wall.wall
      break

  radius = 2 * model.m * model.L + model.L + 1
  counts = []
  radius_ok = True
  for a, b in ((y, z), (z, y)):
    clusters = model.gate_clusters(x, a, b, r)
    counts.append(len(clusters))
    for cluster in clusters:
      center = model.cluster_center(cluster)
      for wall in cluster:
        if any(d[center][g] > radius for g in bitset.iter_bits(wall.gates)):
          radius_ok = False
  return TripleWitness(cover, abs(r - rho), violation, counts, radius_ok)


def check_stability_lemmas(
  model: IntervalModel, engine: StabilityEngine, triples: list[tuple[int, int, int]], R: int
) -> list[CheckResult]:
  """Median against Gromov product, nonseparating differences, and the gate clusters."""
  delta, delta_sampled = model.delta
  labels = model.dual.table.labels
  gap = CheckResult(
    "median vs gromov product", passed=True, gating=False, partial=delta_sampled,
    details={"delta": delta, "worst": 0},
    message="diagnostic only: compares |d(x, mu) - (y|z)_x| with the dual delta; not gating",
  )
  nonseparating = CheckResult("difference nonseparating", passed=True)
  few = CheckResult("few gate clusters", passed=True, details={"m": model.m, "worst": 0})
  balls = CheckResult(
    "gate cluster balls", passed=True,
    details={"radius": 2 * model.m * model.L + model.L + 1},
  )
  for t in sorted({triple_key(*t) for t in triples}):
    witness = verify_stability(model, engine, *t, R)
    names = [labels[v] for v in t]
    if witness.median_gap > gap.details["worst"]:
      gap.details["worst"] = witness.median_gap
      if witness.median_gap > delta:
        gap.passed = False
        gap.witness = {"triple": names}
    if nonseparating.passed and witness.nonseparating_violation is not None:
      nonseparating.passed = False
      nonseparating.witness = {"triple": names, "wall": witness.nonseparating_violation}
    worst = max(witness.clusters)
    few.details["worst"] = max(few.details["worst"], worst)
    if few.passed and worst > model.m:
      few.passed = False
      few.witness = {"triple": names, "clusters": witness.clusters}
    if balls.passed and not witness.cluster_radius_ok:
      balls.passed = False
      balls.witness = {"triple": names}
  return [gap, nonseparating, few, balls]
