"""
Rational S-unit equation x + y = 1.

S-units here are the rationals ±∏ p^e over a finite prime set. The solver
walks all x with exponents bounded by E and keeps those for which 1 - x is
again an S-unit, tested by trial division over the primes.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import prod
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator
from sympy import isprime

from utils import FormCodec, parallel_map

logger = logging.getLogger(__name__)


class SUnitGroupSpec(BaseModel):
    """Prime set and exponent bound of the search."""

    primes: List[int] = Field(default_factory=list, description="Distinct primes generating the group with -1")
    exponent_bound: int = Field(..., ge=1, description="Bound E on |exponent| of every prime in x")

    @field_validator('primes')
    @classmethod
    def validate_primes(cls, v):
        """Primes must be distinct primes; they are kept sorted."""
        if len(set(v)) != len(v):
            raise ValueError("primes must be pairwise distinct")
        for p in v:
            if p < 2 or not isprime(p):
                raise ValueError(f"{p} is not a prime")
        return sorted(v)

    @property
    def rank(self) -> int:
        """Generator count n, with -1 counted as a generator."""
        return len(self.primes) + 1


@dataclass(frozen=True)
class SUnitSolution:
    """One solution with the exponent vectors of both terms."""
    x: Fraction
    y: Fraction
    ex: Dict[int, int] = field(default_factory=dict, compare=False)
    ey: Dict[int, int] = field(default_factory=dict, compare=False)

    def as_dict(self) -> Dict:
        return {
            "x": FormCodec.encode_rational(self.x),
            "y": FormCodec.encode_rational(self.y),
            "ex": {str(p): e for p, e in self.ex.items()},
            "ey": {str(p): e for p, e in self.ey.items()},
        }


@dataclass
class BoundCheck:
    """Solution count against the 2^(8(n+1)) bound."""
    holds: bool
    count: int
    bound: int
    ratio: Fraction


def exponent_vector(value: Fraction, primes: List[int]) -> Optional[Dict[int, int]]:
    """Exponents of value over primes, or None when value is not supported on them."""
    if value == 0:
        return None
    numerator, denominator = abs(value.numerator), value.denominator
    exponents = {}
    for p in primes:
        e = 0
        while numerator % p == 0:
            numerator //= p
            e += 1
        while denominator % p == 0:
            denominator //= p
            e -= 1
        exponents[p] = e
    if numerator != 1 or denominator != 1:
        return None
    return exponents


def _solutions_for_sign(task: Tuple[int, Tuple[int, ...], int]) -> List[SUnitSolution]:
    sign, primes, bound = task
    primes = list(primes)
    found = []
    for exponents in product(range(-bound, bound + 1), repeat=len(primes)):
        x = sign * prod((Fraction(p) ** e for p, e in zip(primes, exponents)), start=Fraction(1))
        y = 1 - x
        ey = exponent_vector(y, primes)
        if ey is None:
            continue
        found.append(SUnitSolution(x, y, dict(zip(primes, exponents)), ey))
    return found


def sunit_solutions(spec: SUnitGroupSpec, jobs: int = 1) -> List[SUnitSolution]:
    """All solutions with x inside the exponent box, sorted by (x, y)."""
    tasks = [(sign, tuple(spec.primes), spec.exponent_bound) for sign in (1, -1)]
    chunks = parallel_map(_solutions_for_sign, tasks, jobs)
    unique = {}
    for solution in (s for chunk in chunks for s in chunk):
        unique.setdefault((solution.x, solution.y), solution)
    solutions = [unique[key] for key in sorted(unique)]
    logger.debug(f"{len(solutions)} S-unit solutions for primes {spec.primes} at E={spec.exponent_bound}")
    return solutions


def verify_bs_bound(spec: SUnitGroupSpec, solutions: List[SUnitSolution]) -> BoundCheck:
    """Compare the solution count with 2^(8(n+1)), n the generator count."""
    bound = 2 ** (8 * (spec.rank + 1))
    count = len(solutions)
    check = BoundCheck(count <= bound, count, bound, Fraction(count, bound))
    if not check.holds:
        logger.warning(f"{count} solutions exceed the bound {bound} for primes {spec.primes}")
    return check


def symmetry_images(x: Fraction, y: Fraction) -> List[Tuple[Fraction, Fraction]]:
    """The six images of a solution under the symmetries of x + y = 1."""
    return [
        (x, y),
        (y, x),
        (1 / x, -y / x),
        (-y / x, 1 / x),
        (1 / y, -x / y),
        (-x / y, 1 / y),
    ]


def stabilization_report(primes: List[int], max_bound: int, jobs: int = 1) -> List[Tuple[int, int]]:
    """(E, solution count) for E = 1..max_bound."""
    return [
        (bound, len(sunit_solutions(SUnitGroupSpec(primes=primes, exponent_bound=bound), jobs)))
        for bound in range(1, max_bound + 1)
    ]
