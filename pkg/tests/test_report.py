import json
from fractions import Fraction
from pathlib import Path

import pytest

from src.core.report import CheckResult, Report
from src.utils.formatting import format_label, format_rational, to_jsonable


class TestReport:
  """Test check results and report aggregation."""

  def test_passed_ignores_advisory_checks(self):
    """Test that only gating checks decide the verdict."""
    report = Report("verify")
    report.add(CheckResult("gating", passed=True))
    report.add(CheckResult("advisory", passed=False, gating=False))

    assert report.passed
    assert report.failures() == []

  def test_failed_gating_check(self):
    report = Report("verify")
    failed = report.add(CheckResult("D 1-gluable", passed=False, witness={"c1": [0, 1]}))

    assert not report.passed
    assert report.failures() == [failed]

  def test_partial(self):
    report = Report("verify")
    report.extend([CheckResult("a", passed=True), CheckResult("b", passed=True, partial=True)])

    assert report.partial
    assert report.passed

  def test_get(self):
    """Test lookup by check name."""
    report = Report("verify")
    report.add(CheckResult("density", passed=True))

    assert report.get("density").passed
    with pytest.raises(KeyError):
      report.get("missing")

  def test_to_json(self):
    """Test JSON output renders rationals and keeps warnings."""
    report = Report("cylinders", parameters={"delta": Fraction(1, 2)})
    report.add(CheckResult("gap", passed=True, details={"worst": Fraction(3, 2)}))
    report.warn("working dual capped at 10 points")

    data = json.loads(report.to_json())

    assert data["passed"] is True
    assert data["parameters"]["delta"] == "1/2"
    assert data["checks"][0]["details"]["worst"] == "3/2"
    assert data["warnings"] == ["working dual capped at 10 points"]


class TestFormatting:
  """Test report value formatting."""

  def test_format_rational(self):
    assert format_rational(Fraction(4, 2)) == 2
    assert format_rational(Fraction(3, 2)) == "3/2"
    assert format_rational(True) == 1

  def test_to_jsonable(self):
    """Test sets, tuples and paths become plain JSON values."""
    value = {"points": {3, 1, 2}, "pair": (1, 2), "path": Path("out"), 4: None}

    assert to_jsonable(value) == {
      "points": [1, 2, 3],
      "pair": [1, 2],
      "path": "out",
      "4": None,
    }

  def test_to_jsonable_rejects_objects(self):
    with pytest.raises(TypeError, match="cannot serialise"):
      to_jsonable(object())

  def test_format_label(self):
    assert format_label(3) == "3"
    assert format_label((1, "a")) == "1,a"
