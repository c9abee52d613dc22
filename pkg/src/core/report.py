import json
from dataclasses import dataclass, field
from typing import Any

from ..utils.formatting import to_jsonable


@dataclass
class CheckResult:
  """Outcome of one verified property.

  A check is gating unless marked advisory; partial means a cap or budget was hit
  before the search finished, so a pass is only a pass within the budget.
  """

  name: str
  passed: bool
  partial: bool = False
  gating: bool = True
  witness: Any = None
  details: dict[str, Any] = field(default_factory=dict)
  message: str = ""

  def to_dict(self) -> dict[str, Any]:
    return {
      "name": self.name,
      "passed": self.passed,
      "partial": self.partial,
      "gating": self.gating,
      "witness": to_jsonable(self.witness),
      "details": to_jsonable(self.details),
      "message": self.message,
    }


@dataclass
class Report:
  """Ordered collection of check results for one instance."""

  title: str
  parameters: dict[str, Any] = field(default_factory=dict)
  checks: list[CheckResult] = field(default_factory=list)
  warnings: list[str] = field(default_factory=list)

  def add(self, check: CheckResult) -> CheckResult:
    self.checks.append(check)
    return check

  def extend(self, checks: list[CheckResult]) -> None:
    self.checks.extend(checks)

  def warn(self, message: str) -> None:
    self.warnings.append(message)

  @property
  def passed(self) -> bool:
    return all(check.passed for check in self.checks if check.gating)

  @property
  def partial(self) -> bool:
    return any(check.partial for check in self.checks)

  def failures(self) -> list[CheckResult]:
    return [check for check in self.checks if check.gating and not check.passed]

  def get(self, name: str) -> CheckResult:
    """Return the first check with the given name."""
    for check in self.checks:
      if check.name == name:
        return check
    raise KeyError(name)

  def to_dict(self) -> dict[str, Any]:
    return {
      "title": self.title,
      "passed": self.passed,
      "partial": self.partial,
      "parameters": to_jsonable(self.parameters),
      "checks": [check.to_dict() for check in self.checks],
      "warnings": list(self.warnings),
    }

  def to_json(self) -> str:
    return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"
