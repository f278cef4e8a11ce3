#!/usr/bin/env python3
"""
Consistency checks for census reports.

Re-derives what can be re-derived cheaply from a finished report: every
representative must parse, have the census degree and the discriminant of
its row, and lie inside the census box; class counts must fit the form
counts and, for degree at least 3, the class-count bound.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

from binary_forms import BinaryForm, discriminant
from bounds import order_bound
from census import CensusReport, CensusRow
from errors import BinaryFormError

logger = logging.getLogger(__name__)


@dataclass
class ValidationError:
    """Validation error details."""
    discriminant: Optional[int]
    field_name: str
    error_message: str
    severity: str = "error"


@dataclass
class ValidationResult:
    """Result of a validation operation."""
    is_valid: bool
    errors: List[ValidationError] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    total_checked: int = 0
    passed: int = 0
    failed: int = 0

    def merge(self, other: "ValidationResult"):
        self.errors.extend(other.errors)
        self.warnings.extend(other.warnings)
        self.total_checked += other.total_checked
        self.passed += other.passed
        self.failed += other.failed
        self.is_valid = self.is_valid and other.is_valid

    def as_dict(self) -> Dict:
        return {
            "is_valid": self.is_valid,
            "errors": [
                dict(asdict(error), discriminant=None if error.discriminant is None else str(error.discriminant))
                for error in self.errors
            ],
            "warnings": list(self.warnings),
            "total_checked": self.total_checked,
            "passed": self.passed,
            "failed": self.failed,
        }


class ReportValidator:
    """Validation of census reports."""

    def validate(self, report: CensusReport) -> ValidationResult:
        """Validate every row of a report and the row ordering."""
        result = ValidationResult(is_valid=True)

        keys = list(report.rows)
        result.total_checked += 1
        if keys == sorted(keys):
            result.passed += 1
        else:
            result.failed += 1
            result.is_valid = False
            result.errors.append(ValidationError(None, "rows", "rows are not ascending by discriminant"))

        for disc, row in report.rows.items():
            result.merge(self._validate_row(report, disc, row))

        if report.unknown_pairs:
            result.warnings.append(f"{len(report.unknown_pairs)} pairs were left undecided")
        if not result.is_valid:
            logger.warning(f"Census report r={report.degree} H={report.height} failed {result.failed} checks")
        return result

    def _validate_row(self, report: CensusReport, disc: int, row: CensusRow) -> ValidationResult:
        errors = []
        total_checked = 0
        passed = 0
        failed = 0

        def check(condition: bool, field_name: str, message: str):
            nonlocal total_checked, passed, failed
            total_checked += 1
            if condition:
                passed += 1
            else:
                failed += 1
                errors.append(ValidationError(disc, field_name, message))

        check(row.discriminant == disc, "discriminant", f"row keyed {disc} states {row.discriminant}")
        check(1 <= row.class_count <= row.form_count, "class_count",
              f"{row.class_count} classes for {row.form_count} forms")
        check(len(row.representatives) == row.class_count == len(row.class_sizes), "representatives",
              "representatives and class sizes must match the class count")
        check(sum(row.class_sizes) == row.form_count, "class_sizes", "class sizes do not add up to the form count")
        if report.degree >= 3:
            check(row.class_count <= order_bound(report.degree), "class_count",
                  f"{row.class_count} classes exceed the class-count bound")

        for encoding in row.representatives:
            try:
                form = BinaryForm.parse(encoding)
            except BinaryFormError as e:
                check(False, "representatives", f"{encoding!r} does not parse: {e}")
                continue
            check(form.degree == report.degree, "representatives",
                  f"{encoding} has degree {form.degree}, expected {report.degree}")
            check(max(abs(c) for c in form.coeffs) <= report.height, "representatives",
                  f"{encoding} lies outside the height-{report.height} box")
            check(discriminant(form) == disc, "representatives", f"{encoding} does not have discriminant {disc}")

        return ValidationResult(
            is_valid=failed == 0,
            errors=errors,
            warnings=[],
            total_checked=total_checked,
            passed=passed,
            failed=failed,
        )
