"""
Utility functions for the binary forms toolkit.
Provides exact linear algebra, text codecs, a union-find structure and a
deterministic parallel map.
"""

import logging
import math
import re
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Any, Callable, Dict, Hashable, Iterable, List, Sequence, Tuple, TypeVar, Union

from sympy import Matrix, Rational, ZZ
from sympy.matrices.normalforms import hermite_normal_form
from sympy.polys.matrices import DomainMatrix

from errors import EncodingError, SingularMatrixError

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]
T = TypeVar("T")
R = TypeVar("R")

FORM_PATTERN = re.compile(r"^\s*(\d+)\s*:\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*$")
MATRIX_PATTERN = re.compile(
    r"^\s*(-?\d+(?:/\d+)?)\s*,\s*(-?\d+(?:/\d+)?)\s*;\s*(-?\d+(?:/\d+)?)\s*,\s*(-?\d+(?:/\d+)?)\s*$"
)
RATIONAL_PATTERN = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


def to_fraction(value: Any) -> Fraction:
    """Convert an int, Fraction or sympy Rational to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if hasattr(value, "p") and hasattr(value, "q"):
        return Fraction(int(value.p), int(value.q))
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot convert {value!r} to an exact rational")


def to_rational(value: Number) -> Rational:
    """Convert an int or Fraction to a sympy Rational."""
    value = Fraction(value)
    return Rational(value.numerator, value.denominator)


def normalize_number(value: Number) -> Number:
    """Return ints for integral Fractions, Fractions otherwise."""
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return value


class ExactLinearAlgebra:
    """Exact determinants, inverses, Hermite normal forms and characteristic polynomials."""

    @staticmethod
    def clear_denominators(rows: Sequence[Sequence[Number]]) -> Tuple[List[List[int]], int]:
        """
        Scale every row to integers.

        Returns the integer rows and the product of the row scale factors.
        """
        integer_rows = []
        scale = 1
        for row in rows:
            row_lcm = 1
            for entry in row:
                row_lcm = math.lcm(row_lcm, Fraction(entry).denominator)
            integer_rows.append([int(Fraction(entry) * row_lcm) for entry in row])
            scale *= row_lcm
        return integer_rows, scale

    @staticmethod
    def determinant(rows: Sequence[Sequence[Number]]) -> Number:
        """Exact determinant of a square integer or rational matrix."""
        size = len(rows)
        if size == 0:
            return 1
        if any(len(row) != size for row in rows):
            raise ValueError("determinant needs a square matrix")

        integer_rows, scale = ExactLinearAlgebra.clear_denominators(rows)
        matrix = DomainMatrix([[ZZ(entry) for entry in row] for row in integer_rows], (size, size), ZZ)
        value = int(matrix.det())
        return normalize_number(Fraction(value, scale))

    @staticmethod
    def inverse(rows: Sequence[Sequence[Number]]) -> List[List[Fraction]]:
        """Exact inverse of a square rational matrix."""
        matrix = Matrix([[to_rational(entry) for entry in row] for row in rows])
        if matrix.det() == 0:
            raise SingularMatrixError("matrix is singular")
        inverse = matrix.inv()
        return [[to_fraction(inverse[i, j]) for j in range(inverse.cols)] for i in range(inverse.rows)]

    @staticmethod
    def lattice_hnf(rows: Sequence[Sequence[int]]) -> Tuple[Tuple[int, ...], ...]:
        """
        Canonical basis of the integer lattice spanned by the rows.

        The Hermite normal form acts on columns, so the rows are passed in
        transposed and the resulting basis columns are returned as rows.
        """
        columns = Matrix(rows).T
        normal_form = hermite_normal_form(columns)
        return tuple(
            tuple(int(normal_form[i, j]) for i in range(normal_form.rows))
            for j in range(normal_form.cols)
        )

    @staticmethod
    def charpoly(rows: Sequence[Sequence[Number]]) -> List[Fraction]:
        """Characteristic polynomial coefficients, leading coefficient first."""
        matrix = Matrix([[to_rational(entry) for entry in row] for row in rows])
        return [to_fraction(coefficient) for coefficient in matrix.charpoly().all_coeffs()]

    @staticmethod
    def multiply(left: Sequence[Sequence[Number]], right: Sequence[Sequence[Number]]) -> List[List[Number]]:
        """Plain matrix product, exact for ints and Fractions."""
        inner = len(right)
        width = len(right[0]) if right else 0
        return [
            [sum((row[k] * right[k][j] for k in range(inner)), 0) for j in range(width)]
            for row in left
        ]


class FormCodec:
    """Text encodings used by the CLI and the census cache."""

    @staticmethod
    def decode_form(text: str) -> Tuple[int, ...]:
        """Parse `r:a0,a1,...,ar` into a coefficient tuple."""
        match = FORM_PATTERN.match(text or "")
        if not match:
            raise EncodingError(f"malformed form encoding: {text!r} (expected r:a0,...,ar)")
        degree = int(match.group(1))
        coeffs = tuple(int(part) for part in match.group(2).split(","))
        if len(coeffs) != degree + 1:
            raise EncodingError(
                f"form {text!r} declares degree {degree} but has {len(coeffs)} coefficients"
            )
        return coeffs

    @staticmethod
    def encode_form(coeffs: Sequence[Number]) -> str:
        """Render a coefficient sequence as `r:a0,...,ar`."""
        return f"{len(coeffs) - 1}:" + ",".join(FormCodec.encode_rational(c) for c in coeffs)

    @staticmethod
    def decode_matrix(text: str) -> Tuple[Number, Number, Number, Number]:
        """Parse `a,b;c,d` (entries may be rationals `p/q`)."""
        match = MATRIX_PATTERN.match(text or "")
        if not match:
            raise EncodingError(f"malformed matrix encoding: {text!r} (expected a,b;c,d)")
        return tuple(normalize_number(FormCodec.decode_rational(part)) for part in match.groups())

    @staticmethod
    def encode_matrix(entries: Sequence[Number]) -> str:
        a, b, c, d = (FormCodec.encode_rational(entry) for entry in entries)
        return f"{a},{b};{c},{d}"

    @staticmethod
    def decode_rational(text: str) -> Fraction:
        match = RATIONAL_PATTERN.match(text or "")
        if not match:
            raise EncodingError(f"malformed rational: {text!r}")
        denominator = int(match.group(2) or 1)
        if denominator == 0:
            raise EncodingError(f"zero denominator in {text!r}")
        return Fraction(int(match.group(1)), denominator)

    @staticmethod
    def encode_rational(value: Number) -> str:
        value = Fraction(value)
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"


class UnionFind:
    """Disjoint sets with path compression and union by weight."""

    def __init__(self):
        self.weights: Dict[Hashable, int] = {}
        self.parents: Dict[Hashable, Hashable] = {}

    def find(self, obj: Hashable) -> Hashable:
        if obj not in self.parents:
            self.parents[obj] = obj
            self.weights[obj] = 1
            return obj

        path = [obj]
        root = self.parents[obj]
        while root != path[-1]:
            path.append(root)
            root = self.parents[root]

        for ancestor in path:
            self.parents[ancestor] = root
        return root

    def union(self, first: Hashable, second: Hashable) -> Hashable:
        roots = [self.find(first), self.find(second)]
        # Ties go to the earlier root so merges are order-deterministic
        heaviest = max(roots, key=lambda r: self.weights[r])

        for r in roots:
            if r != heaviest:
                self.weights[heaviest] += self.weights[r]
                self.parents[r] = heaviest
                del self.weights[r]

        return heaviest

    def component_dict(self) -> Dict[Hashable, List[Hashable]]:
        result = defaultdict(list)
        for k in self.parents.keys():
            result[self.find(k)].append(k)
        return result


def parallel_map(func: Callable[[T], R], items: Iterable[T], jobs: int = 1) -> List[R]:
    """
    Map func over items, in worker processes when jobs > 1.

    Results come back in input order regardless of completion order.
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    logger.debug(f"Dispatching {len(items)} tasks to {jobs} workers")
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(func, items))
