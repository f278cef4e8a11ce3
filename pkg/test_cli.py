"""
Tests for the command-line interface: documents, exit codes and option parsing.
"""

import io
import json
import os
import tempfile
import unittest
from fractions import Fraction
from unittest.mock import patch

from binary_forms import make_form
from census import CensusFlags, CensusReport, CensusRow
from cli import BinaryFormsCLI, act_exact, parse_betas, parse_int_list
from errors import EncodingError, ReducibleError


class CLITestCase(unittest.TestCase):

    def run_cli(self, *argv):
        stdout = io.StringIO()
        cli = BinaryFormsCLI(stdout=stdout)
        code = cli.run(list(argv))
        return code, json.loads(stdout.getvalue())


class TestParsing(unittest.TestCase):
    """Option values outside argparse."""

    def test_betas(self):
        self.assertEqual(parse_betas("0..3"), [0, 1, 2, 3])
        self.assertEqual(parse_betas("-1..1"), [-1, 0, 1])
        self.assertEqual(parse_betas("0,5,7"), [0, 5, 7])
        with self.assertRaises(EncodingError):
            parse_betas("3..1")
        with self.assertRaises(EncodingError):
            parse_betas("a..b")

    def test_int_lists(self):
        self.assertEqual(parse_int_list("2,3,5", "prime"), [2, 3, 5])
        with self.assertRaises(EncodingError):
            parse_int_list("2,x", "prime")

    def test_act_with_rational_matrix(self):
        image = act_exact(make_form([1, 0, 1]), (1, 0, 0, Fraction(1, 2)))
        self.assertEqual(image.coeffs, (1, 0, Fraction(1, 4)))


class TestCommands(CLITestCase):
    """One JSON document per command."""

    def test_disc(self):
        code, document = self.run_cli("disc", "3:1,0,0,-2")
        self.assertEqual(code, 0)
        self.assertEqual(document["disc"], "-108")
        self.assertEqual(document["schema_version"], "1")

    def test_resultant(self):
        code, document = self.run_cli("resultant", "3:1,0,0,-2", "1:1,0")
        self.assertEqual((code, document["resultant"]), (0, "2"))

    def test_act(self):
        code, document = self.run_cli("act", "2:1,0,1", "1,1;0,1")
        self.assertEqual(document, {"form": "2:1,2,2", "integral": True, "schema_version": "1"})
        code, document = self.run_cli("act", "2:1,0,1", "1,0;0,1/2")
        self.assertEqual(document["form"], "2:1,0,1/4")
        self.assertFalse(document["integral"])

    def test_equiv_self(self):
        code, document = self.run_cli("equiv", "3:1,0,0,-2", "3:1,0,0,-2")
        self.assertEqual(code, 0)
        self.assertEqual(document["status"], "Equivalent")
        self.assertEqual(document["U"], "1,0;0,1")

    def test_equiv_different_discriminants(self):
        code, document = self.run_cli("equiv", "3:1,0,0,-2", "3:1,0,0,-3", "--precision", "128")
        self.assertEqual(document["status"], "NotEquivalent")
        self.assertEqual(document["separating_invariant"], "discriminant")
        self.assertNotIn("U", document)

    def test_order(self):
        code, document = self.run_cli("order", "3:1,0,0,-2")
        self.assertEqual(document["discriminant"], "-108")
        self.assertEqual(document["degree"], 3)

    def test_order_eq(self):
        code, document = self.run_cli("order-eq", "3:1,0,0,-2", "3:1,3,3,-1")
        self.assertEqual(document["status"], "Equivalent")
        self.assertTrue(document["order_equal"])

    def test_bound(self):
        code, document = self.run_cli("bound", "--degree", "3", "--c", "1")
        self.assertEqual(code, 0)
        self.assertEqual(document["bound"], str(2 ** 648))

    def test_census(self):
        with tempfile.TemporaryDirectory() as directory:
            out = os.path.join(directory, "report.json")
            csv_path = os.path.join(directory, "report.csv")
            code, document = self.run_cli(
                "census", "--degree", "2", "--height", "2", "--out", out, "--csv", csv_path,
            )
            with open(out, encoding="utf-8") as handle:
                self.assertEqual(json.load(handle), document)
            self.assertTrue(os.path.exists(csv_path))
        row = next(row for row in document["rows"] if row["discriminant"] == "-4")
        self.assertEqual(row["class_count"], 1)
        self.assertEqual(row["representatives"], ["2:1,0,1"])

    def test_census_ring_check(self):
        code, document = self.run_cli("census", "--degree", "3", "--height", "1", "--irreducible", "--check-rings")
        self.assertEqual(code, 0)
        self.assertEqual(document["ring_findings"], [])

    def test_family(self):
        code, document = self.run_cli("family", "--form", "3:1,0,0,-2", "--a", "2", "--betas", "0..1")
        self.assertEqual(document["class_count"], 1)
        self.assertEqual(document["collapsed_pairs"], [[0, 1]])
        code, document = self.run_cli(
            "family", "--form", "3:1,0,0,-2", "--a", "2", "--betas", "0..1", "--variant", "x-scaled",
        )
        self.assertEqual(document["class_count"], 2)

    def test_growth(self):
        code, document = self.run_cli("growth", "--form", "3:1,0,0,-2", "--a-values", "2,3")
        self.assertEqual([row["class_count"] for row in document["rows"]], [2, 3])

    def test_runit(self):
        code, document = self.run_cli("runit", "--form", "3:1,0,0,-2", "--deg", "1", "--height", "3")
        self.assertEqual(document["count"], 2)
        self.assertEqual(document["forms"][0], {"form": "1:0,1", "resultant": "1"})

    def test_sunit(self):
        code, document = self.run_cli("sunit", "--primes", "2", "--bound", "4", "--stabilization")
        self.assertEqual(document["count"], 3)
        self.assertTrue(document["holds"])
        self.assertEqual(document["bound"], str(2 ** 24))
        self.assertEqual([entry["count"] for entry in document["stabilization"]], [3, 3, 3, 3])


class TestExitCodes(CLITestCase):
    """0 success, 1 domain error, 2 usage error."""

    def test_malformed_form(self):
        code, document = self.run_cli("disc", "3:1,0")
        self.assertEqual(code, 2)
        self.assertEqual(document["error"]["type"], "EncodingError")

    def test_unknown_command(self):
        code, document = self.run_cli("frobnicate")
        self.assertEqual(code, 2)
        self.assertEqual(document["error"]["type"], "UsageError")

    def test_bad_prime_set(self):
        code, document = self.run_cli("sunit", "--primes", "2,4", "--bound", "3")
        self.assertEqual(code, 2)

    def test_domain_error(self):
        code, document = self.run_cli("order", "3:1,0,0,-1")
        self.assertEqual(code, 1)
        self.assertEqual(document["error"]["type"], "ReducibleError")

    def test_singular_matrix(self):
        code, _ = self.run_cli("act", "2:1,0,1", "1,2;2,4")
        self.assertEqual(code, 1)

    def test_errors_from_the_library_are_mapped(self):
        with patch("cli.discriminant", side_effect=ReducibleError("boom")):
            code, document = self.run_cli("disc", "3:1,0,0,-2")
        self.assertEqual(code, 1)
        self.assertEqual(document["error"]["message"], "boom")

    def test_census_failing_its_checks(self):
        report = CensusReport(2, 1, CensusFlags())
        report.rows[-3] = CensusRow(-3, 1, 1, ["2:1,0,1"], [1])
        with patch("cli.census_by_discriminant", return_value=report):
            code, document = self.run_cli("census", "--degree", "2", "--height", "1")
        self.assertEqual(code, 1)
        self.assertEqual(document["rows"][0]["discriminant"], "-3")
        validation = document["validation"]
        self.assertFalse(validation["is_valid"])
        self.assertEqual(validation["failed"], 1)
        self.assertEqual(validation["errors"][0]["field_name"], "representatives")
        self.assertEqual(validation["errors"][0]["discriminant"], "-3")


if __name__ == "__main__":
    unittest.main()
