"""Utility functions for formatting report values."""

from dataclasses import asdict, is_dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any


def format_rational(value: Fraction | int) -> int | str:
  """Format an exact rational for JSON output.

  Args:
    value: The rational to format

  Returns:
    The plain integer when the value is integral, otherwise a "p/q" string
    (e.g. Fraction(3, 2) -> "3/2", Fraction(4, 2) -> 2).
  """
  if isinstance(value, bool):
    return int(value)
  if isinstance(value, int):
    return value
  if value.denominator == 1:
    return value.numerator
  return f"{value.numerator}/{value.denominator}"


def to_jsonable(value: Any) -> Any:
  """Convert report payloads into plain JSON values.

  Sets become sorted lists, tuples become lists, dataclasses become dicts and
  rationals are rendered with format_rational.
  """
  if isinstance(value, bool) or value is None or isinstance(value, str | float):
    return value
  if isinstance(value, int | Fraction):
    return format_rational(value)
  if isinstance(value, Path):
    return str(value)
  if is_dataclass(value) and not isinstance(value, type):
    return to_jsonable(asdict(value))
  if isinstance(value, dict):
    return {str(k): to_jsonable(v) for k, v in value.items()}
  if isinstance(value, set | frozenset):
    items = [to_jsonable(v) for v in value]
    return sorted(items, key=_sort_key)
  if isinstance(value, list | tuple):
    return [to_jsonable(v) for v in value]
  raise TypeError(f"cannot serialise {type(value).__name__}")


def _sort_key(item: Any) -> tuple[int, int, str]:
  if isinstance(item, int) and not isinstance(item, bool):
    return (0, item, "")
  return (1, 0, str(item))


def format_label(label: Any) -> str:
  """Render a vertex label for DOT output (e.g. 3 -> "3", (1, 2) -> "1,2")."""
  if isinstance(label, tuple | list):
    return ",".join(format_label(part) for part in label)
  return str(label)
