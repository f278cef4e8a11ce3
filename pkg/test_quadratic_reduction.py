"""
Tests for exact reduction of linear and quadratic forms.
"""

import unittest
from functools import reduce

from hypothesis import given, settings, strategies as st

from binary_forms import IntMatrix2, make_form, transform
from errors import DegreeTooSmallError
from quadratic_reduction import canonical_form, class_key, quadratic_equivalence

GENERATORS = [IntMatrix2(0, -1, 1, 0), IntMatrix2(1, 1, 0, 1), IntMatrix2(1, -1, 0, 1), IntMatrix2(1, 0, 0, -1)]

unimodular_strategy = st.lists(st.sampled_from(GENERATORS), min_size=0, max_size=8).map(
    lambda factors: reduce(lambda left, right: left @ right, factors, IntMatrix2.identity())
)

quadratic_strategy = st.tuples(*(st.integers(-12, 12) for _ in range(3))).filter(any).map(make_form)


class TestLinear(unittest.TestCase):

    def test_content_is_the_invariant(self):
        self.assertEqual(class_key(make_form([4, 6])), ("linear", 2))
        self.assertEqual(class_key(make_form([0, -5])), ("linear", 5))
        self.assertEqual(canonical_form(make_form([4, 6])).representative.coeffs, (2, 0))

    def test_equivalent_linear_forms(self):
        F, G = make_form([3, 5]), make_form([-7, 2])
        U = quadratic_equivalence(F, G)
        self.assertIsNotNone(U)
        self.assertEqual(transform(F, U), G)


class TestQuadratic(unittest.TestCase):
    """Definite, indefinite and split classes."""

    def test_sum_of_squares(self):
        forms = [make_form(c) for c in ([1, 0, 1], [1, 2, 2], [1, -2, 2], [2, 2, 1], [2, -2, 1])]
        self.assertEqual(len({class_key(F) for F in forms}), 1)
        self.assertEqual(canonical_form(make_form([2, 2, 1])).representative.coeffs, (1, 0, 1))

    def test_sign_separates_definite_forms(self):
        self.assertNotEqual(class_key(make_form([1, 0, 1])), class_key(make_form([-1, 0, -1])))

    def test_discriminant_minus_twenty(self):
        self.assertIsNone(quadratic_equivalence(make_form([1, 0, 5]), make_form([2, 2, 3])))

    def test_improper_equivalence_is_allowed(self):
        F, G = make_form([2, 1, 3]), make_form([2, -1, 3])
        U = quadratic_equivalence(F, G)
        self.assertEqual(transform(F, U), G)
        self.assertNotEqual(class_key(F), class_key(make_form([1, 1, 6])))

    def test_indefinite_classes(self):
        # x^2 - 2y^2 = -1 is solvable, x^2 - 3y^2 = -1 is not
        U = quadratic_equivalence(make_form([1, 0, -2]), make_form([-1, 0, 2]))
        self.assertEqual(transform(make_form([1, 0, -2]), U), make_form([-1, 0, 2]))
        self.assertIsNone(quadratic_equivalence(make_form([1, 0, -3]), make_form([-1, 0, 3])))

    def test_split_classes(self):
        # XY and XY + Y^2 share discriminant 1; 2XY and 2XY + Y^2 are distinct at D = 4
        self.assertEqual(class_key(make_form([0, 1, 0])), class_key(make_form([0, 1, 1])))
        self.assertNotEqual(class_key(make_form([0, 2, 0])), class_key(make_form([0, 2, 1])))
        self.assertEqual(class_key(make_form([1, 2, 1])), ("split", 0, 1))

    def test_degree_three_rejected(self):
        with self.assertRaises(DegreeTooSmallError):
            canonical_form(make_form([1, 0, 0, -2]))

    @settings(max_examples=150, deadline=None)
    @given(quadratic_strategy, unimodular_strategy)
    def test_orbit_members_share_a_key(self, F, U):
        G = transform(F, U)
        self.assertEqual(class_key(F), class_key(G))
        certificate = quadratic_equivalence(F, G)
        self.assertIsNotNone(certificate)
        self.assertEqual(transform(F, certificate), G)


if __name__ == "__main__":
    unittest.main()
