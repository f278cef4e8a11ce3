"""
Tests for censuses, the lower-bound families and unit-resultant searches.
"""

import json
import os
import tempfile
import unittest
from itertools import product
from unittest.mock import patch

from binary_forms import BinaryForm, IntMatrix2, discriminant, evaluate, make_form, transform
from census import (
    X_SCALED,
    Y_SCALED,
    CensusFlags,
    augmented_equivalent,
    census_by_discriminant,
    delone_faddeev_findings,
    enumerate_forms,
    family_growth_report,
    family_inequivalence_check,
    family_matrix,
    lower_bound_family,
    resultant_unit_search,
    thue_identity_holds,
)
from census_cache import CacheKey, CensusCache, export_csv, read_csv
from config import CODE_VERSION
from equivalence import VerdictStatus
from errors import BinaryFormError, CacheError, DegreeTooSmallError, NotSquarefreeError
from invariant_order import is_irreducible
from models import CensusReportModel

PURE_CUBIC = make_form([1, 0, 0, -2])


class TestEnumeration(unittest.TestCase):

    def test_box_size(self):
        self.assertEqual(len(list(enumerate_forms(2, 1))), 1 * 3 * 3)
        self.assertEqual(len(list(enumerate_forms(3, 2))), 2 * 5 ** 3)

    def test_empty_box(self):
        self.assertEqual(list(enumerate_forms(3, 0)), [])

    def test_degree_zero_rejected(self):
        with self.assertRaises(DegreeTooSmallError):
            list(enumerate_forms(0, 1))

    def test_flags(self):
        forms = list(enumerate_forms(3, 1, CensusFlags(irreducible=True)))
        self.assertTrue(forms)
        self.assertTrue(all(is_irreducible(F) for F in forms))
        primitive = list(enumerate_forms(2, 2, CensusFlags(primitive=True)))
        self.assertNotIn(make_form([2, 0, 2]), primitive)
        self.assertIn(make_form([2, 1, 2]), primitive)

    def test_leading_zero_band(self):
        band = [F for F in enumerate_forms(2, 1, CensusFlags(leading_zero_band=True)) if F.coeffs[0] == 0]
        self.assertEqual([F.coeffs for F in band], [(0, 1, -1), (0, 1, 0)])


class TestCensus(unittest.TestCase):
    """Per-discriminant class counts."""

    def test_sum_of_two_squares_row(self):
        report = census_by_discriminant(2, 2)
        row = report.rows[-4]
        self.assertEqual(row.form_count, 5)
        self.assertEqual(row.class_count, 1)
        self.assertEqual(row.representatives, ["2:1,0,1"])

    def test_discriminant_minus_three_row(self):
        row = census_by_discriminant(2, 1).rows[-3]
        self.assertEqual((row.form_count, row.class_count), (2, 1))

    def test_empty_box(self):
        report = census_by_discriminant(3, 0)
        self.assertEqual(report.rows, {})
        self.assertEqual(report.form_count, 0)

    def test_rows_ascend_and_cover_the_box(self):
        flags = CensusFlags(irreducible=True)
        report = census_by_discriminant(3, 1, flags)
        self.assertEqual(list(report.rows), sorted(report.rows))
        self.assertEqual(report.form_count, len(list(enumerate_forms(3, 1, flags))))
        for disc, row in report.rows.items():
            for encoding in row.representatives:
                self.assertEqual(discriminant(BinaryForm.parse(encoding)), disc)
        self.assertEqual(report.unknown_pairs, [])

    def test_degenerate_forms_are_skipped(self):
        report = census_by_discriminant(3, 1)
        degenerate = sum(1 for F in enumerate_forms(3, 1) if discriminant(F) == 0)
        self.assertEqual(report.skipped_degenerate, degenerate)
        self.assertNotIn(0, report.rows)

    def test_determinism(self):
        flags = CensusFlags(irreducible=True)
        first = CensusReportModel.from_report(census_by_discriminant(3, 1, flags)).to_document()
        second = CensusReportModel.from_report(census_by_discriminant(3, 1, flags)).to_document()
        self.assertEqual(json.dumps(first, sort_keys=True), json.dumps(second, sort_keys=True))

    def test_cache_resume_matches_cold_run(self):
        flags = CensusFlags(irreducible=True)
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "census.jsonl")
            cold = census_by_discriminant(3, 1, flags, cache_path=path)
            with open(path, encoding="utf-8") as handle:
                self.assertEqual(sum(1 for _ in handle), cold.form_count)
            with patch("census._classify_row", side_effect=AssertionError("row was recomputed")):
                warm = census_by_discriminant(3, 1, flags, cache_path=path)
        self.assertEqual(
            CensusReportModel.from_report(cold).to_document(),
            CensusReportModel.from_report(warm).to_document(),
        )

    def test_torn_cache_line_is_ignored(self):
        flags = CensusFlags(irreducible=True)
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "census.jsonl")
            cold = census_by_discriminant(3, 1, flags, cache_path=path)
            with open(path, "a", encoding="utf-8") as handle:
                handle.write('{"form": "3:1,0')
            warm = census_by_discriminant(3, 1, flags, cache_path=path)
        self.assertEqual(cold.rows, warm.rows)

    def test_rows_with_undecided_pairs_are_recomputed(self):
        flags = CensusFlags(irreducible=True)
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "census.jsonl")
            with patch("equivalence._match_at_precision", return_value=(None, False, 6)):
                cold = census_by_discriminant(3, 1, flags, jobs=1, cache_path=path)
                warm = census_by_discriminant(3, 1, flags, jobs=1, cache_path=path)
            decided = census_by_discriminant(3, 1, flags, jobs=1, cache_path=path)
        self.assertTrue(cold.unknown_pairs)
        self.assertEqual(warm.unknown_pairs, cold.unknown_pairs)
        self.assertEqual(
            CensusReportModel.from_report(cold).to_document(),
            CensusReportModel.from_report(warm).to_document(),
        )
        self.assertEqual(decided.unknown_pairs, [])
        self.assertEqual(decided.rows, census_by_discriminant(3, 1, flags, jobs=1).rows)

    def test_csv_export(self):
        report = census_by_discriminant(2, 2)
        rows = [row.as_dict() for row in report.rows.values()]
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "census.csv")
            export_csv(rows, path)
            back = read_csv(path)
        self.assertEqual([row["discriminant"] for row in back], list(report.rows))
        self.assertEqual(back[0]["representatives"], rows[0]["representatives"])

    def test_ring_findings_are_empty_for_small_cubics(self):
        report = census_by_discriminant(3, 1, CensusFlags(irreducible=True))
        self.assertEqual(delone_faddeev_findings(report), [])
        self.assertEqual(delone_faddeev_findings(census_by_discriminant(2, 1)), [])

    def test_ring_findings_for_height_two_cubics(self):
        report = census_by_discriminant(3, 2, CensusFlags(irreducible=True), jobs=1)
        self.assertEqual(report.unknown_pairs, [])
        findings = delone_faddeev_findings(report)
        self.assertEqual([finding for finding in findings if finding["kind"] == "index-form-mismatch"], [])
        self.assertTrue(all(finding["kind"] == "fingerprint-coincidence" for finding in findings))


class TestCensusCache(unittest.TestCase):
    """Corrupt lines are skipped and counted; write failures raise."""

    KEY = CacheKey(3, 1, CensusFlags().key(), CODE_VERSION)

    def test_corrupt_lines_are_counted(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "census.jsonl")
            cache = CensusCache(path)
            cache.append(self.KEY, [("3:1,0,0,-2", -108, "3:1,0,0,-2")])
            with open(path, "a", encoding="utf-8") as handle:
                handle.write("not json\n")
                handle.write('{"form": "3:1,0')
            loaded = cache.load(self.KEY)
        self.assertEqual(loaded, {"3:1,0,0,-2": ("-108", "3:1,0,0,-2")})
        self.assertEqual(cache.stats.malformed_lines, 2)
        self.assertEqual(cache.stats.records_matched, 1)

    def test_unwritable_cache_raises(self):
        with tempfile.TemporaryDirectory() as directory:
            cache = CensusCache(directory)
            with self.assertRaises(CacheError):
                cache.append(self.KEY, [("3:1,0,0,-2", -108, "3:1,0,0,-2")])


class TestLowerBoundFamily(unittest.TestCase):
    """The families F(X + βY, aY) and F(aX + βY, Y)."""

    def test_members(self):
        members = lower_bound_family(PURE_CUBIC, 2, [0, 1])
        self.assertEqual(members[0].coeffs, (1, 0, 0, -16))
        self.assertEqual(members[1].coeffs, (1, 3, 3, -15))
        self.assertTrue(all(discriminant(F) == -6912 for F in members))

    def test_preconditions(self):
        with self.assertRaises(BinaryFormError):
            lower_bound_family(PURE_CUBIC, 0, [0])
        with self.assertRaises(NotSquarefreeError):
            lower_bound_family(make_form([1, -2, 1, 0]), 2, [0])
        with self.assertRaises(BinaryFormError):
            family_matrix(2, 0, "z-scaled")

    def test_y_scaled_family_collapses(self):
        for a in (2, 3):
            report = family_inequivalence_check(PURE_CUBIC, a, range(a), Y_SCALED)
            self.assertEqual(report.class_count, 1)
            self.assertEqual(len(report.collapsed_pairs), a * (a - 1) // 2)
            for pair in report.pairs:
                first = dict(report.members)[pair.first_beta]
                second = dict(report.members)[pair.second_beta]
                self.assertEqual(transform(first, pair.certificate), second)

    def test_x_scaled_family_separates_residues(self):
        for a in (2, 3):
            report = family_inequivalence_check(PURE_CUBIC, a, range(a), X_SCALED)
            self.assertEqual(report.class_count, a)
            self.assertEqual(report.collapsed_pairs, [])
            self.assertEqual(report.common_discriminant, a ** 6 * -108)

    def test_congruent_betas_are_equivalent(self):
        report = family_inequivalence_check(PURE_CUBIC, 2, [0, 2], X_SCALED)
        self.assertEqual(report.class_count, 1)
        self.assertTrue(report.pairs[0].congruent)
        self.assertEqual(report.pairs[0].status, VerdictStatus.EQUIVALENT)

    def test_trivial_scaling(self):
        report = family_inequivalence_check(PURE_CUBIC, 1, [0, 1, 2])
        self.assertEqual(report.class_count, 1)
        self.assertEqual(report.classes, [[0, 1, 2]])

    def test_augmented_equivalence(self):
        self.assertEqual(
            augmented_equivalent(family_matrix(2, 0, Y_SCALED), family_matrix(2, 1, Y_SCALED)),
            IntMatrix2(1, 1, 0, 1),
        )
        self.assertIsNone(augmented_equivalent(family_matrix(2, 0, X_SCALED), family_matrix(2, 1, X_SCALED)))
        self.assertEqual(
            augmented_equivalent(family_matrix(2, 0, X_SCALED), family_matrix(2, 2, X_SCALED)),
            IntMatrix2(1, 1, 0, 1),
        )

    def test_growth_report(self):
        rows = family_growth_report(PURE_CUBIC, [1, 2, 3])
        self.assertEqual([row["class_count"] for row in rows], [1, 2, 3])
        self.assertEqual([row["norm"] for row in rows], [1, 8, 27])

    def test_report_document(self):
        document = family_inequivalence_check(PURE_CUBIC, 2, [0, 1], Y_SCALED).as_dict()
        self.assertEqual(document["discriminant"], "-6912")
        self.assertEqual(document["collapsed_pairs"], [[0, 1]])
        self.assertEqual(document["pairs"][0]["certificate"], "1,1;0,1")


class TestUnitResultants(unittest.TestCase):
    """Forms with resultant ±1 against a fixed form."""

    def test_linear_companions(self):
        found = resultant_unit_search(PURE_CUBIC, 1, 3)
        self.assertEqual([(F.coeffs, value) for F, value in found], [((0, 1), 1), ((1, -1), 1)])

    def test_against_brute_force(self):
        F0 = make_form([1, 1, -2, -1])
        expected = set()
        for c, d in product(range(-3, 4), repeat=2):
            if (c, d) == (0, 0) or evaluate(F0, d, -c) not in (1, -1):
                continue
            expected.add((c, d) if (c > 0 or (c == 0 and d > 0)) else (-c, -d))
        self.assertEqual({F.coeffs for F, _ in resultant_unit_search(F0, 1, 3)}, expected)

    def test_preconditions(self):
        with self.assertRaises(DegreeTooSmallError):
            resultant_unit_search(make_form([1, 0, 1]), 1, 2)
        with self.assertRaises(NotSquarefreeError):
            resultant_unit_search(make_form([1, -2, 1, 0]), 1, 2)

    def test_thue_identity(self):
        self.assertTrue(thue_identity_holds(PURE_CUBIC, 3))
        self.assertTrue(thue_identity_holds(make_form([2, -1, 0, 5, 1]), 2))


if __name__ == "__main__":
    unittest.main()
