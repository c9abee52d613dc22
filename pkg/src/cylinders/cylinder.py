"""Cylinders C(x, y) = N_eps(I(x, y)) and the checks that tie them to rough geodesics."""

import itertools
import logging
import random
from dataclasses import dataclass, field

from ..core.config import RunConfig
from ..core.report import CheckResult
from ..geometry.geodesics import RoughGeodesic, enumerate_rough_geodesics, hausdorff
from ..utils import bitset
from .intervals import IntervalModel

logger = logging.getLogger(__name__)

EXHAUSTIVE_PAIR_POINTS = 40
PAIR_SAMPLES = 200
DEFAULT_PATH_CAP = 64


@dataclass(frozen=True)
class Cylinder:
  x: int
  y: int
  interval: int
  I: int
  epsilon: int
  C: int

  def contains(self, p: int) -> bool:
    return bitset.has_bit(self.C, p)


@dataclass
class MorseMeasurement:
  """Rough geodesics enumerated on sample pairs and the constants read off them."""

  epsilon: int
  morse: int
  geodesics: dict[tuple[int, int], list[RoughGeodesic]] = field(default_factory=dict)
  sampled: bool = False
  partial: bool = False
  anchored: int = 0
  stray: dict | None = None


def sample_pairs(
  size: int, seed: int = 0, limit: int = EXHAUSTIVE_PAIR_POINTS
) -> list[tuple[int, int]]:
  """All pairs i <= j for small duals, a seeded sample otherwise."""
  pairs = list(itertools.combinations_with_replacement(range(size), 2))
  if size <= limit or len(pairs) <= PAIR_SAMPLES:
    return pairs
  return sorted(random.Random(seed).sample(pairs, PAIR_SAMPLES))


def measure_morse(
  model: IntervalModel, pairs: list[tuple[int, int]], cap: int, budget: int
) -> MorseMeasurement:
  """epsilon: farthest a 3m-rough geodesic strays from I; morse: their mutual Hausdorff spread."""
  table = model.dual.table
  k = 3 * model.m
  epsilon = 0
  morse = 0
  partial = False
  anchored = 0
  stray = None
  found = {}
  for i, j in pairs:
    search = enumerate_rough_geodesics(table, i, j, k, cap, node_budget=budget)
    partial = partial or search.partial
    found[(i, j)] = search.geodesics
    core = model.working_I(i, j)
    pair_epsilon = 0
    inside = False
    for geodesic in search.geodesics:
      outside = [p for p in geodesic.points if not bitset.has_bit(core, p)]
      inside = inside or not outside
      for p in outside:
        pair_epsilon = max(pair_epsilon, model.set_distance(1 << p, core))
    pair_morse = 0
    for a, b in itertools.combinations(search.geodesics, 2):
      pair_morse = max(pair_morse, hausdorff(table, a.points, b.points))
    # with one geodesic inside I, every other one is within the spread of I
    if inside:
      anchored += 1
      if pair_epsilon > pair_morse and stray is None:
        stray = {"pair": [i, j], "epsilon": pair_epsilon, "morse": pair_morse}
    epsilon = max(epsilon, pair_epsilon)
    morse = max(morse, pair_morse)
  logger.info("measured epsilon %d, rough geodesic spread %d", epsilon, morse)
  sampled = len(pairs) < model.size * (model.size + 1) // 2
  return MorseMeasurement(epsilon, morse, found, sampled, partial, anchored, stray)


class CylinderFamily:
  """The cylinder assignment of one working dual, built lazily per pair."""

  def __init__(
    self, model: IntervalModel, epsilon: int, measurement: MorseMeasurement | None = None
  ):
    if epsilon < 0:
      raise ValueError("epsilon must be non-negative")
    self.model = model
    self.epsilon = epsilon
    self.measurement = measurement
    self._cylinders: dict[tuple[int, int], Cylinder] = {}

  @classmethod
  def build(cls, model: IntervalModel, config: RunConfig) -> "CylinderFamily":
    pairs = sample_pairs(model.size, config.seed)
    cap = config.path_budget or DEFAULT_PATH_CAP
    measurement = measure_morse(model, pairs, cap, config.search_budget)
    epsilon = measurement.epsilon
    if config.epsilon is not None:
      if config.epsilon < measurement.epsilon:
        logger.warning(
          "epsilon %d is below the measured constant %d", config.epsilon, measurement.epsilon
        )
      epsilon = config.epsilon
    return cls(model, epsilon, measurement)

  def build_cylinder(self, i: int, j: int) -> Cylinder:
    """C(x, y) computed from scratch in the given order."""
    model = self.model
    core = model.working_I(i, j)
    return Cylinder(
      i, j, model.interval(i, j).points, core, self.epsilon,
      model.neighbourhood(core, self.epsilon),
    )

  def cylinder(self, i: int, j: int) -> Cylinder:
    key = (i, j) if i <= j else (j, i)
    cached = self._cylinders.get(key)
    if cached is None:
      cached = self.build_cylinder(*key)
      self._cylinders[key] = cached
    return cached

  def mask(self, i: int, j: int) -> int:
    return self.cylinder(i, j).C

  @property
  def below_measured(self) -> bool:
    return self.measurement is not None and self.epsilon < self.measurement.epsilon


def _pair_labels(model: IntervalModel, i: int, j: int) -> list:
  return [model.label(i), model.label(j)]


def check_interval_inclusions(model: IntervalModel, pairs: list[tuple[int, int]]) -> CheckResult:
  """[x, y] ⊆ I(x, y) ⊆ N_1([x, y]) for the sets the cylinders are built on."""
  for i, j in pairs:
    interval = model.interval(i, j).points
    used = model.working_I(i, j)
    missing = interval & ~used
    extra = used & ~model.neighbourhood(interval, 1)
    if missing or extra:
      point = bitset.lowest(missing or extra)
      return CheckResult(
        "interval inclusions",
        passed=False,
        witness={
          "pair": _pair_labels(model, i, j),
          "point": model.label(point),
          "side": "missing from I" if missing else "beyond N_1([x, y])",
        },
        details={"inflation": model.inflation},
      )
  return CheckResult(
    "interval inclusions", passed=True, details={"pairs": len(pairs), "inflation": model.inflation}
  )


def check_gate_diameters(model: IntervalModel, pairs: list[tuple[int, int]]) -> CheckResult:
  """Gate sets of distant walls have diameter at most mL."""
  bound = model.m * model.L
  worst = 0
  for i, j in pairs:
    for wall in model.distant_walls(i, j):
      worst = max(worst, wall.diameter)
      if wall.diameter > bound:
        return CheckResult(
          "gate diameters",
          passed=False,
          witness={"pair": _pair_labels(model, i, j), "wall": wall.wall, "diameter": wall.diameter},
          details={"bound": bound},
        )
  return CheckResult("gate diameters", passed=True, details={"bound": bound, "worst": worst})


def check_reversibility(family: CylinderFamily, pairs: list[tuple[int, int]]) -> CheckResult:
  for i, j in pairs:
    if family.build_cylinder(i, j).C != family.build_cylinder(j, i).C:
      return CheckResult(
        "cylinders reversible", passed=False, witness={"pair": _pair_labels(family.model, i, j)}
      )
  return CheckResult("cylinders reversible", passed=True, details={"pairs": len(pairs)})


def check_cylinder_axioms(family: CylinderFamily) -> CheckResult:
  """Each enumerated rough geodesic lies in its cylinder; theta is how far the cylinder reaches."""
  model = family.model
  measurement = family.measurement
  if measurement is None:
    return CheckResult(
      "cylinder axioms", passed=True, partial=True, message="no geodesics measured"
    )
  d = model.dual.dist
  theta = 0
  for (i, j), geodesics in measurement.geodesics.items():
    C = family.mask(i, j)
    for geodesic in geodesics:
      outside = [p for p in geodesic.points if not bitset.has_bit(C, p)]
      if outside:
        return CheckResult(
          "cylinder axioms",
          passed=False,
          witness={
            "pair": _pair_labels(model, i, j),
            "geodesic": [model.label(p) for p in geodesic.points],
            "outside": [model.label(p) for p in outside],
          },
          details={"epsilon": family.epsilon, "measured_epsilon": measurement.epsilon},
          message="rough geodesic leaves its cylinder",
        )
      reach = max(min(d[p][q] for q in geodesic.points) for p in bitset.iter_bits(C))
      theta = max(theta, reach)
  return CheckResult(
    "cylinder axioms",
    passed=True,
    partial=measurement.sampled or measurement.partial,
    details={
      "epsilon": family.epsilon,
      "measured_epsilon": measurement.epsilon,
      "morse": measurement.morse,
      "theta": theta,
      "rough_geodesic_k": 3 * model.m,
    },
  )


def check_epsilon_morse(family: CylinderFamily) -> CheckResult:
  """Measured epsilon against the Morse spread, and the cylinder epsilon against both."""
  model = family.model
  measurement = family.measurement
  if measurement is None:
    return CheckResult(
      "epsilon vs morse", passed=True, partial=True, message="no geodesics measured"
    )
  details = {
    "epsilon": family.epsilon,
    "measured_epsilon": measurement.epsilon,
    "morse": measurement.morse,
    "anchored_pairs": measurement.anchored,
    "pairs": len(measurement.geodesics),
  }
  partial = (
    measurement.sampled or measurement.partial
    or measurement.anchored < len(measurement.geodesics)
  )
  if measurement.stray is not None:
    stray = measurement.stray
    i, j = stray["pair"]
    return CheckResult(
      "epsilon vs morse",
      passed=False,
      partial=partial,
      witness={**stray, "pair": _pair_labels(model, i, j)},
      details=details,
      message="rough geodesic strays from I further than from the geodesic inside it",
    )
  if family.below_measured:
    return CheckResult(
      "epsilon vs morse",
      passed=False,
      partial=partial,
      details=details,
      message=f"epsilon {family.epsilon} is below the measured {measurement.epsilon}",
    )
  return CheckResult("epsilon vs morse", passed=True, partial=partial, details=details)


def check_interval_rough_geodesic(
  model: IntervalModel, pairs: list[tuple[int, int]], budget: int
) -> CheckResult:
  """Every interval contains a 3m-rough geodesic between its endpoints."""
  k = 3 * model.m
  partial = False
  for i, j in pairs:
    allowed = bitset.to_indices(model.interval(i, j).points)
    search = enumerate_rough_geodesics(model.dual.table, i, j, k, 1, allowed, budget)
    if not search.geodesics:
      if search.exhausted_budget:
        partial = True
        continue
      return CheckResult(
        "interval rough geodesic",
        passed=False,
        witness={"pair": _pair_labels(model, i, j)},
        details={"k": k},
      )
  return CheckResult("interval rough geodesic", passed=True, partial=partial, details={"k": k})
