#!/usr/bin/env python3

import functools
import json
import logging
import sys
from pathlib import Path

import click

from . import __version__
from .core.config import RunConfig
from .core.errors import VerificationError
from .core.processor import TRANSFERS, InstanceProcessor
from .core.report import Report
from .generator.instances import list_generators
from .generator.template_engine import TemplateEngine
from .parser.instance_parser import InstanceParser, ParsedInstance
from .utils.formatting import to_jsonable

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def run_options(command):
  """Options shared by every command that runs the pipeline on an instance."""
  options = [
    click.option(
      "--instance", "-i", type=click.Path(exists=True, dir_okay=False, path_type=Path),
      help="Instance JSON file.",
    ),
    click.option("--generate", "-g", "spec", type=str, help="Generator spec, e.g. 'path(20)'."),
    click.option(
      "--config", "-c", type=click.Path(exists=True, path_type=Path),
      help="Path to configuration file.",
    ),
    click.option("--K", "K", type=int, help="Ball radius for quasitree walls."),
    click.option("--L", "L", type=int, help="Grid bound override."),
    click.option("--epsilon", type=int, help="Cylinder thickening override."),
    click.option("--glue-m", type=int, help="Gluability constant to verify."),
    click.option(
      "--refine-K", "refine_K", type=int, multiple=True, help="Refinement radius (repeatable)."
    ),
    click.option("--closure-cap", type=int, help="Largest working dual."),
    click.option("--chain-cap", type=int, help="Largest chain in the gluability search."),
    click.option("--path-budget", type=int, help="Rough geodesics enumerated per pair."),
    click.option("--search-budget", type=int, help="Node budget for exhaustive searches."),
    click.option("--triple-limit", type=int, help="Dual size above which triples are sampled."),
    click.option("--seed", type=int, help="Seed for every sampled check."),
    click.option("--threads", type=int, help="Worker threads (overrides MEDIANWALL_THREADS)."),
    click.option(
      "--out", "-o", type=click.Path(file_okay=False, path_type=Path),
      help="Output directory. If not specified, the report is printed to stdout.",
    ),
    click.option("--dot", is_flag=True, help="Also write DOT exports to the output directory."),
  ]
  for option in reversed(options):
    command = option(command)
  return command


def load_run(options: dict) -> tuple[ParsedInstance, RunConfig]:
  """Resolve the instance and the config: file, then environment, then flags."""
  instance, spec = options.pop("instance"), options.pop("spec")
  if (instance is None) == (spec is None):
    raise click.UsageError("give exactly one of --instance and --generate")
  config_path = options.pop("config")
  config = RunConfig.from_file(config_path) if config_path else RunConfig()
  config = RunConfig.from_env(config)
  out = options.pop("out")
  refine = options.pop("refine_K")
  config = config.merge_with_options(
    output_dir=out, refine_K=list(refine) if refine else None, **options
  )

  parser = InstanceParser()
  parsed = parser.load(instance if instance is not None else spec)
  if options.get("K") is not None:
    parsed.with_K(options["K"])
  return parsed, config


def guarded(command):
  """Map exceptions onto the exit-code contract."""

  @functools.wraps(command)
  def wrapper(*args, **kwargs):
    try:
      return command(*args, **kwargs)
    except click.UsageError:
      raise
    except VerificationError as e:
      click.echo(f"Error: {e}", err=True)
      sys.exit(EXIT_FAILED)
    except (ValueError, OSError) as e:
      click.echo(f"Error: {e}", err=True)
      sys.exit(EXIT_USAGE)

  return wrapper


def emit(report: Report, config: RunConfig, filename: str, extra: dict[str, dict] | None = None):
  """Write the report (and any extra JSON documents) to the output directory, or stdout."""
  output_dir = config.output_dir
  if output_dir is None:
    click.echo(report.to_json(), nl=False)
  else:
    output_dir.mkdir(parents=True, exist_ok=True)
    path = output_dir / filename
    path.write_text(report.to_json(), encoding="utf-8")
    click.echo(f"Wrote {path}")
    for name, document in (extra or {}).items():
      extra_path = output_dir / name
      text = json.dumps(to_jsonable(document), indent=2, sort_keys=True) + "\n"
      extra_path.write_text(text, encoding="utf-8")
      click.echo(f"Wrote {extra_path}")
  for failure in report.failures():
    click.echo(f"FAILED {failure.name}: {json.dumps(failure.to_dict()['witness'])}", err=True)
  for warning in report.warnings:
    click.echo(f"Warning: {warning}", err=True)


def finish(report: Report) -> None:
  sys.exit(EXIT_OK if report.passed else EXIT_FAILED)


@click.group(invoke_without_command=True)
@click.option("--verbose", "-v", count=True, help="More logging (-v info, -vv debug).")
@click.pass_context
def cli(ctx, verbose: int):
  """medianwall: walls, median duals and stable cylinders on finite instances.

  Build dualisable chain systems on quasitrees and products of quasitrees, verify
  their quantitative lemmas exhaustively and certify global stability of cylinders.
  """
  level = logging.WARNING
  if verbose == 1:
    level = logging.INFO
  elif verbose > 1:
    level = logging.DEBUG
  logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
  if ctx.invoked_subcommand is None:
    click.echo(ctx.get_help())


@cli.command()
@click.argument("spec", required=False)
@click.option(
  "--output", "-o", type=click.Path(dir_okay=False, path_type=Path),
  help="Output file path. If not specified, prints to stdout.",
)
@click.option("--list", "list_all", is_flag=True, help="List the bundled generators.")
@guarded
def generate(spec: str | None, output: Path | None, list_all: bool):
  """Write the instance JSON of a bundled generator.

  Examples:

    # Path with 101 vertices
    medianwall generate "path(100)" -o path100.json

    # Staircase in a product of two paths
    medianwall generate "staircase(12)"
  """
  if list_all:
    for name in list_generators():
      click.echo(name)
    return
  if spec is None:
    raise click.UsageError("missing generator spec")
  document = InstanceParser().generate(spec)
  text = json.dumps(document, indent=2) + "\n"
  if output:
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(text, encoding="utf-8")
    click.echo(f"Generated {output}")
  else:
    click.echo(text, nl=False)


@cli.command()
@run_options
@guarded
def verify(dot: bool, **options):
  """Run the lemma suite for the instance kind and exit 1 if a gating check fails.

  Examples:

    medianwall verify -g "path(20)" --K 1

    medianwall verify -i test_fixtures/negative/undersized_L.json -o reports/
  """
  parsed, config = load_run(options)
  processor = InstanceProcessor(config)
  report = processor.verify(parsed)
  emit(report, config, f"{parsed.name}.verify.json")
  if dot:
    _write_dot(processor, parsed, config)
  finish(report)


@cli.command()
@run_options
@click.option(
  "--transfer", type=click.Choice(list(TRANSFERS)), help="Carry the cylinders along a coarse map."
)
@click.option("--kappa", type=int, default=0, show_default=True, help="Transfer thickening.")
@click.option(
  "--max-distortion", type=int, help="Reject a transfer map that distorts distances by more."
)
@guarded
def cylinders(dot: bool, transfer: str | None, kappa: int, **options):
  """Build cylinders, run their lemma chain and certify global stability.

  Examples:

    medianwall cylinders -g "path(20)" -o out/

    medianwall cylinders -g "path(20)" --transfer subdivision
  """
  parsed, config = load_run(options)
  processor = InstanceProcessor(config)
  run = processor.cylinders(parsed, transfer, kappa)
  emit(
    run.report,
    config,
    f"{parsed.name}.cylinders.json",
    {f"{parsed.name}.certificate.json": processor.certificate_json(run)},
  )
  if dot:
    _write_dot(processor, parsed, config, run)
  finish(run.report)


@cli.command("export-dot")
@run_options
@guarded
def export_dot(dot: bool, **options):
  """Write DOT files for the instance, its working dual and one annotated triple.

  Examples:

    medianwall export-dot -g "staircase(6)" -o dot/
  """
  parsed, config = load_run(options)
  _write_dot(InstanceProcessor(config), parsed, config)


def _write_dot(processor: InstanceProcessor, parsed: ParsedInstance, config: RunConfig, run=None):
  output_dir = config.output_dir or Path(".")
  for path in processor.export_dot(parsed, output_dir, run):
    click.echo(f"Wrote {path}")


@cli.command()
def templates():
  """List available built-in DOT templates."""
  available_templates = TemplateEngine().list_available_templates()
  click.echo("Available built-in templates:")
  for template_name in available_templates:
    click.echo(f"  - {template_name}")
  if not available_templates:
    click.echo("No templates found. Please check installation.")


@cli.command()
def version():
  """Show version information."""
  click.echo(f"medianwall v{__version__}")


if __name__ == "__main__":
  cli()
