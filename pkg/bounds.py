"""
Arithmetic functions and the explicit class-count bounds.

For degree r and a positive integer c, forms with invariant order of index
c lie in at most

    2^(24 r^3 (1 + ω(c))) * τ_α(c^2) * Σ_{d^α | c} d,   α = r(r-1)/2,

classes; with c = 1 this collapses to 2^(24 r^3). The same expression,
with r the total degree, bounds squarefree reducible forms whose largest
irreducible factor has degree at least 3.
"""

import logging
from dataclasses import dataclass
from math import comb, prod
from typing import Sequence

from sympy import factorint

from errors import BinaryFormError, DegreeTooSmallError

logger = logging.getLogger(__name__)


def _check_positive(name: str, value: int):
    if not isinstance(value, int) or value < 1:
        raise BinaryFormError(f"{name} must be a positive integer, got {value!r}")


def omega(c: int) -> int:
    """Number of distinct primes dividing c."""
    _check_positive("c", c)
    return len(factorint(c))


def tau_alpha(c: int, alpha: int) -> int:
    """Number of alpha-tuples of positive integers whose product divides c."""
    _check_positive("c", c)
    _check_positive("alpha", alpha)
    return prod(comb(e + alpha, alpha) for e in factorint(c).values())


def divisor_power_sum(c: int, k: int) -> int:
    """Sum of the d >= 1 with d^k dividing c."""
    _check_positive("c", c)
    _check_positive("k", k)
    divisors = [1]
    for p, e in factorint(c).items():
        divisors = [d * p ** j for d in divisors for j in range(e // k + 1)]
    return sum(divisors)


@dataclass(frozen=True)
class BoundInputs:
    """Arithmetic data entering the bound for degree r and index c."""
    r: int
    c: int
    omega: int
    tau: int
    divisor_sum: int

    @property
    def alpha(self) -> int:
        return self.r * (self.r - 1) // 2

    @classmethod
    def compute(cls, r: int, c: int) -> "BoundInputs":
        _check_positive("r", r)
        _check_positive("c", c)
        alpha = r * (r - 1) // 2
        return cls(r, c, omega(c), tau_alpha(c * c, alpha), divisor_power_sum(c, alpha))


def order_bound(r: int) -> int:
    """2^(24 r^3), the bound for forms with a given invariant order."""
    if r < 3:
        raise DegreeTooSmallError("the class-count bounds need degree at least 3")
    return 2 ** (24 * r ** 3)


def bound_evaluator(r: int, c: int) -> int:
    """Exact value of the index-c class-count bound for degree r."""
    if r < 3:
        raise DegreeTooSmallError("the class-count bounds need degree at least 3")
    inputs = BoundInputs.compute(r, c)
    return 2 ** (24 * r ** 3 * (1 + inputs.omega)) * inputs.tau * inputs.divisor_sum


def reducible_bound(factor_degrees: Sequence[int], c: int) -> int:
    """Bound for squarefree reducible forms with the given irreducible factor degrees."""
    if not factor_degrees or any(d < 1 for d in factor_degrees):
        raise BinaryFormError(f"invalid factor degrees {factor_degrees!r}")
    if max(factor_degrees) < 3:
        raise DegreeTooSmallError("some irreducible factor must have degree at least 3")
    return bound_evaluator(sum(factor_degrees), c)
