"""
Tests for census report validation.
"""

import unittest

from census import CensusFlags, CensusReport, CensusRow, census_by_discriminant
from report_validator import ReportValidator


class TestReportValidator(unittest.TestCase):
    """Checks re-derived from finished reports."""

    def setUp(self):
        """Set up test fixtures."""
        self.validator = ReportValidator()

    def test_real_reports_pass(self):
        for report in (census_by_discriminant(2, 2), census_by_discriminant(3, 1, CensusFlags(irreducible=True))):
            result = self.validator.validate(report)
            self.assertTrue(result.is_valid, result.errors)
            self.assertEqual(result.failed, 0)
            self.assertEqual(result.passed, result.total_checked)

    def test_wrong_discriminant(self):
        report = CensusReport(2, 1, CensusFlags())
        report.rows[-3] = CensusRow(-3, 1, 1, ["2:1,0,1"], [1])
        result = self.validator.validate(report)
        self.assertFalse(result.is_valid)
        self.assertEqual([error.field_name for error in result.errors], ["representatives"])
        self.assertEqual(result.errors[0].discriminant, -3)

    def test_outside_box_and_wrong_degree(self):
        report = CensusReport(2, 1, CensusFlags())
        report.rows[-4] = CensusRow(-4, 2, 2, ["2:1,2,2", "3:1,0,0,1"], [1, 1])
        result = self.validator.validate(report)
        messages = " ".join(error.error_message for error in result.errors)
        self.assertIn("outside the height-1 box", messages)
        self.assertIn("has degree 3", messages)

    def test_count_mismatch(self):
        report = CensusReport(2, 1, CensusFlags())
        report.rows[-4] = CensusRow(-4, 1, 2, ["2:1,0,1"], [1])
        result = self.validator.validate(report)
        self.assertEqual({error.field_name for error in result.errors}, {"class_count", "representatives"})

    def test_row_order(self):
        report = CensusReport(2, 1, CensusFlags())
        report.rows[-3] = CensusRow(-3, 1, 1, ["2:1,1,1"], [1])
        report.rows[-4] = CensusRow(-4, 1, 1, ["2:1,0,1"], [1])
        result = self.validator.validate(report)
        self.assertEqual(result.errors[0].field_name, "rows")

    def test_unknown_pairs_warn(self):
        report = CensusReport(3, 1, CensusFlags(), unknown_pairs=[("3:1,0,0,-2", "3:1,3,3,-1")])
        result = self.validator.validate(report)
        self.assertTrue(result.is_valid)
        self.assertEqual(len(result.warnings), 1)

    def test_result_document(self):
        report = CensusReport(2, 1, CensusFlags())
        report.rows[-3] = CensusRow(-3, 1, 1, ["2:1,0,1"], [1])
        document = self.validator.validate(report).as_dict()
        self.assertFalse(document["is_valid"])
        self.assertEqual(document["errors"][0]["discriminant"], "-3")
        self.assertEqual(document["errors"][0]["severity"], "error")
        self.assertEqual(document["passed"] + document["failed"], document["total_checked"])


if __name__ == "__main__":
    unittest.main()
