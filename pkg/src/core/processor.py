import logging
from dataclasses import dataclass
from pathlib import Path

from ..cylinders.cylinder import (
  CylinderFamily,
  check_cylinder_axioms,
  check_epsilon_morse,
  check_gate_diameters,
  check_interval_inclusions,
  check_interval_rough_geodesic,
  check_reversibility,
  sample_pairs,
)
from ..cylinders.intervals import IntervalModel
from ..cylinders.stability import (
  StabilityCertificate,
  StabilityEngine,
  TripleCover,
  check_certificate,
  check_stability_lemmas,
  engine_for,
  global_certificate,
  select_triples,
)
from ..cylinders.transfer import (
  check_transfer,
  collapse_map,
  identity_map,
  subdivision_map,
  transfer_cylinders,
)
from ..generator.template_engine import TemplateEngine
from ..parser.instance_parser import ParsedInstance
from ..product.instance import ProductInstance
from ..product.lemmas import verify_dual_SC, verify_system_lemma
from ..product.refinement import check_K_sweep, verify_refinement
from ..quasitree.instance import QuasitreeInstance
from ..quasitree.lemmas import verify_density, verify_lemma_quasitree_system
from ..wallspace.dual import DualSpace
from ..wallspace.verifiers import check_dual_metric, check_dual_suites
from .config import RunConfig
from .report import Report

logger = logging.getLogger(__name__)

TRANSFERS = {"identity": identity_map, "subdivision": subdivision_map, "collapse": collapse_map}

# sampling budget for the median/gate/Helly suites on duals above exhaustive_limit
SAMPLED_SUITE_BUDGET = 20000

Instance = QuasitreeInstance | ProductInstance


@dataclass
class CylinderRun:
  """Everything the cylinder pipeline produced for one instance."""

  report: Report
  certificate: StabilityCertificate
  engine: StabilityEngine
  model: IntervalModel
  family: CylinderFamily
  transfer_certificate: StabilityCertificate | None = None
  transfer_labels: list | None = None


class InstanceProcessor:
  """Runs the verification suites and the cylinder pipeline on parsed instances."""

  def __init__(self, config: RunConfig):
    self.config = config

  def build(self, parsed: ParsedInstance) -> Instance:
    config = self.config
    if parsed.graph is not None:
      source = parsed.graph
      K = source.K if source.K is not None else config.K
      instance = QuasitreeInstance.build(
        source.graph,
        K,
        config.spacing_factor,
        config.include_ball_variant,
        walls=source.walls,
        seed=config.seed,
      )
      if source.spacing is not None:
        instance.spacing = source.spacing
      return instance
    source = parsed.product
    return ProductInstance.build(
      source.factors,
      source.Ks,
      source.points,
      spacing=source.spacing,
      spacing_factor=config.spacing_factor,
      include_ball_variant=config.include_ball_variant,
      L=config.L if config.L is not None else source.L,
      cylinder_inflation=source.cylinder_inflation,
      search_budget=config.search_budget,
      seed=config.seed,
    )

  def working_dual(self, instance: Instance) -> DualSpace:
    """Median closure of the point ultrafilters under the system the cylinders use."""
    if isinstance(instance, QuasitreeInstance):
      metric = instance.chain_index(self.config.search_budget)
    else:
      metric = instance.lchain_index
    return DualSpace.from_points(instance.space, metric, self.config.closure_cap)

  def _report(self, title: str, parsed: ParsedInstance, instance: Instance) -> Report:
    return Report(
      title,
      parameters={
        "instance": parsed.name,
        "kind": parsed.kind,
        "config": self.config.to_dict(),
        "regime": instance.regime(),
      },
    )

  def _note_dual(self, report: Report, dual: DualSpace) -> None:
    report.parameters["dual_points"] = dual.size
    report.parameters["dual_capped"] = dual.capped
    if dual.capped:
      message = f"working dual capped at {self.config.closure_cap} points"
      logger.warning(message)
      report.warn(message)

  def verify(self, parsed: ParsedInstance) -> Report:
    """The lemma suite for the instance kind, then the median/gate/Helly suites on its dual."""
    config = self.config
    instance = self.build(parsed)
    report = self._report(f"verify {parsed.name}", parsed, instance)

    if isinstance(instance, QuasitreeInstance):
      report.extend(verify_lemma_quasitree_system(instance, config))
      dual = self.working_dual(instance)
      self._note_dual(report, dual)
      report.extend(verify_density(instance, dual))
    else:
      report.extend(verify_system_lemma(instance, config))
      dual = self.working_dual(instance)
      self._note_dual(report, dual)
      report.extend(verify_dual_SC(instance, dual, config))
      Ks = config.refine_K or [instance.L]
      for K in Ks:
        report.extend(verify_refinement(instance, K, config))
      if len(set(Ks)) > 1:
        report.add(check_K_sweep(instance, Ks))

    budget = config.search_budget
    if dual.size > config.exhaustive_limit:
      budget = min(budget, SAMPLED_SUITE_BUDGET)
      report.warn(
        f"dual has {dual.size} points, above exhaustive_limit {config.exhaustive_limit}; "
        "median, gate and Helly suites sampled"
      )
    report.add(check_dual_metric(dual, budget, config.seed))
    report.extend(check_dual_suites(dual, budget, config.seed))
    logger.info("verify %s: %d checks, passed=%s", parsed.name, len(report.checks), report.passed)
    return report

  def cylinders(
    self, parsed: ParsedInstance, transfer: str | None = None, kappa: int = 0
  ) -> CylinderRun:
    """Cylinder lemma chain and the global stability certificate, optionally transferred."""
    if transfer is not None and transfer not in TRANSFERS:
      raise ValueError(f"unknown transfer {transfer!r}")
    config = self.config
    instance = self.build(parsed)
    report = self._report(f"cylinders {parsed.name}", parsed, instance)
    dual = self.working_dual(instance)
    self._note_dual(report, dual)

    if isinstance(instance, QuasitreeInstance):
      model = IntervalModel.for_quasitree(instance, dual, config)
    else:
      model = IntervalModel.for_product(instance, dual, config)
    family = CylinderFamily.build(model, config)
    if family.below_measured:
      report.warn(
        f"epsilon {family.epsilon} is below the measured constant {family.measurement.epsilon}"
      )
    report.parameters["cylinders"] = {"L": model.L, "m": model.m, "epsilon": family.epsilon}

    pairs = sample_pairs(model.size, config.seed)
    report.add(check_interval_inclusions(model, pairs))
    report.add(check_gate_diameters(model, pairs))
    report.add(check_reversibility(family, pairs))
    axioms = report.add(check_cylinder_axioms(family))
    report.add(check_epsilon_morse(family))
    report.add(check_interval_rough_geodesic(model, pairs, config.search_budget))

    triples, sampled = select_triples(model.size, config.triple_limit, config.seed)
    engine = engine_for(model, family.mask)
    certificate = global_certificate(engine, triples, sampled, threads=config.threads)
    certificate.epsilon = family.epsilon
    certificate.theta = axioms.details.get("theta")
    certificate.morse = axioms.details.get("morse")
    report.extend(check_stability_lemmas(model, engine, triples, certificate.R))
    report.extend(check_certificate(engine, certificate))

    run = CylinderRun(report, certificate, engine, model, family)
    if transfer is not None:
      mapping = TRANSFERS[transfer](dual.table)
      cylinders = transfer_cylinders(mapping, family.mask, kappa, config.max_distortion)
      y_certificate, checks = check_transfer(
        engine, certificate, mapping, cylinders, config.triple_limit, config.seed, config.threads
      )
      report.extend(checks)
      report.parameters["transfer"] = {"map": transfer, "kappa": kappa}
      if config.max_distortion is not None:
        report.parameters["transfer"]["max_distortion"] = config.max_distortion
      run.transfer_certificate = y_certificate
      run.transfer_labels = list(mapping.source.labels)
    logger.info(
      "cylinders %s: k=%d R=%d passed=%s",
      parsed.name, certificate.k, certificate.R, report.passed,
    )
    return run

  def certificate_json(self, run: CylinderRun) -> dict:
    labels = run.engine.table.labels
    data = {
      "instance": run.report.parameters["instance"],
      "certificate": run.certificate.to_json(labels),
    }
    if run.transfer_certificate is not None:
      data["transfer"] = {
        **run.report.parameters["transfer"],
        "certificate": run.transfer_certificate.to_json(run.transfer_labels),
      }
    return data

  def export_dot(
    self, parsed: ParsedInstance, output_dir: Path, run: CylinderRun | None = None
  ) -> list[Path]:
    """Write the instance, its working dual and one annotated triple as DOT files."""
    engine = TemplateEngine()
    output_dir.mkdir(parents=True, exist_ok=True)
    if run is None:
      run = self.cylinders(parsed)
    factors = [parsed.graph.graph] if parsed.graph is not None else parsed.product.factors
    outputs = {
      f"{parsed.name}.instance.dot": engine.render_graph(parsed.name, factors),
      f"{parsed.name}.dual.dot": engine.render_dual(f"{parsed.name}_dual", run.model.dual),
      f"{parsed.name}.triple.dot": engine.render_triple(
        f"{parsed.name}_triple", run.engine, annotated_triple(run.certificate)
      ),
    }
    written = []
    for filename, text in outputs.items():
      path = output_dir / _safe_filename(filename)
      path.write_text(text, encoding="utf-8")
      written.append(path)
    logger.info("wrote %d DOT files to %s", len(written), output_dir)
    return written


def annotated_triple(certificate: StabilityCertificate) -> TripleCover:
  """The cover with the most balls, preferring triples of distinct points."""
  covers = [c for _, c in sorted(certificate.covers.items())]
  return max(covers, key=lambda c: (c.k, len({c.x, c.y, c.z})))


def _safe_filename(name: str) -> str:
  return "".join(c if c.isalnum() or c in "._-" else "_" for c in name)
