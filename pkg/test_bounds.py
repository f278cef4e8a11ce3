"""
Tests for the arithmetic functions and class-count bound evaluators.
"""

import unittest

from hypothesis import given, settings, strategies as st

from bounds import BoundInputs, bound_evaluator, divisor_power_sum, omega, order_bound, reducible_bound, tau_alpha
from errors import BinaryFormError, DegreeTooSmallError


def tuples_dividing(c, alpha):
    """Count alpha-tuples of positive integers whose product divides c, one factor at a time."""
    if alpha == 0:
        return 1
    return sum(tuples_dividing(c // d, alpha - 1) for d in range(1, c + 1) if c % d == 0)


class TestArithmeticFunctions(unittest.TestCase):
    """ω, τ_α and divisor-power sums."""

    def test_omega(self):
        self.assertEqual(omega(1), 0)
        self.assertEqual(omega(12), 2)
        self.assertEqual(omega(30), 3)
        self.assertEqual(omega(2 ** 10), 1)

    def test_tau_alpha_small_values(self):
        self.assertEqual(tau_alpha(1, 3), 1)
        self.assertEqual(tau_alpha(4, 3), 10)
        # alpha = 1 is the ordinary divisor count
        self.assertEqual(tau_alpha(12, 1), 6)

    def test_tau_alpha_against_enumeration(self):
        for alpha in range(1, 5):
            for c in range(1, 201):
                self.assertEqual(tau_alpha(c, alpha), tuples_dividing(c, alpha), f"c={c} alpha={alpha}")

    def test_divisor_power_sum(self):
        self.assertEqual(divisor_power_sum(2, 3), 1)
        self.assertEqual(divisor_power_sum(8, 3), 3)
        self.assertEqual(divisor_power_sum(12, 1), 28)
        self.assertEqual(divisor_power_sum(36, 2), 1 + 2 + 3 + 6)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 500), st.integers(1, 4))
    def test_divisor_power_sum_by_definition(self, c, k):
        expected = sum(d for d in range(1, c + 1) if c % d ** k == 0)
        self.assertEqual(divisor_power_sum(c, k), expected)

    def test_rejects_non_positive(self):
        with self.assertRaises(BinaryFormError):
            omega(0)
        with self.assertRaises(BinaryFormError):
            tau_alpha(4, 0)
        with self.assertRaises(BinaryFormError):
            divisor_power_sum(-3, 1)


class TestBounds(unittest.TestCase):
    """Exact bound values."""

    def test_index_one_collapses(self):
        self.assertEqual(bound_evaluator(3, 1), 2 ** 648)
        self.assertEqual(bound_evaluator(4, 1), order_bound(4))

    def test_index_two_cubic(self):
        self.assertEqual(bound_evaluator(3, 2), 2 ** 1296 * 10)

    def test_inputs(self):
        inputs = BoundInputs.compute(3, 2)
        self.assertEqual((inputs.alpha, inputs.omega, inputs.tau, inputs.divisor_sum), (3, 1, 10, 1))

    def test_degree_too_small(self):
        with self.assertRaises(DegreeTooSmallError):
            bound_evaluator(2, 1)
        with self.assertRaises(DegreeTooSmallError):
            order_bound(1)

    def test_reducible_bound(self):
        self.assertEqual(reducible_bound([3, 1], 1), bound_evaluator(4, 1))
        self.assertEqual(reducible_bound([3, 2, 1], 5), bound_evaluator(6, 5))
        with self.assertRaises(DegreeTooSmallError):
            reducible_bound([2, 2], 1)
        with self.assertRaises(BinaryFormError):
            reducible_bound([], 1)


if __name__ == "__main__":
    unittest.main()
