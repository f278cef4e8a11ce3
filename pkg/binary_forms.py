"""
Exact representation and arithmetic of integer binary forms.

A form of degree r is stored as its coefficient vector (a0, ..., ar) with
F(X, Y) = a0 X^r + a1 X^(r-1) Y + ... + ar Y^r. Matrices act by
substitution: transform(F, U)(X, Y) = F(aX + bY, cX + dY), so that
transform(transform(F, U), V) == transform(F, U @ V).
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import List, Sequence, Tuple, Union

from errors import AllZeroError, BinaryFormError, SingularMatrixError
from utils import ExactLinearAlgebra, FormCodec, Number, normalize_number

logger = logging.getLogger(__name__)


def _poly_mul(p: Sequence[Number], q: Sequence[Number]) -> List[Number]:
    product = [0] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        if x == 0:
            continue
        for j, y in enumerate(q):
            product[i + j] += x * y
    return product


def _poly_pow(p: Sequence[Number], exponent: int) -> List[Number]:
    result: List[Number] = [1]
    for _ in range(exponent):
        result = _poly_mul(result, p)
    return result


def _expand(coeffs: Sequence[Number], a: Number, b: Number, c: Number, d: Number) -> List[Number]:
    """Coefficients of F(aX + bY, cX + dY) in the X-descending convention."""
    degree = len(coeffs) - 1
    first, second = (a, b), (c, d)
    first_powers = [_poly_pow(first, k) for k in range(degree + 1)]
    second_powers = [_poly_pow(second, k) for k in range(degree + 1)]

    result: List[Number] = [0] * (degree + 1)
    for i, coefficient in enumerate(coeffs):
        if coefficient == 0:
            continue
        term = _poly_mul(first_powers[degree - i], second_powers[i])
        for k, value in enumerate(term):
            result[k] += coefficient * value
    return result


def _sylvester_determinant(p: Sequence[Number], q: Sequence[Number]) -> Number:
    """Determinant of the Sylvester matrix of two coefficient vectors of declared degree."""
    r, s = len(p) - 1, len(q) - 1
    size = r + s
    rows = []
    for shift in range(s):
        rows.append([0] * shift + list(p) + [0] * (size - r - 1 - shift))
    for shift in range(r):
        rows.append([0] * shift + list(q) + [0] * (size - s - 1 - shift))
    return ExactLinearAlgebra.determinant(rows)


@dataclass(frozen=True)
class BinaryForm:
    """Integer binary form given by its coefficients a0..ar."""

    coeffs: Tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if not coeffs:
            raise AllZeroError("a form needs at least one coefficient")
        if any(isinstance(c, bool) or not isinstance(c, int) for c in coeffs):
            raise TypeError(f"form coefficients must be integers: {coeffs!r}")
        if all(c == 0 for c in coeffs):
            raise AllZeroError("all coefficients are zero")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def parse(cls, text: str) -> "BinaryForm":
        """Build a form from its `r:a0,...,ar` encoding."""
        return cls(FormCodec.decode_form(text))

    def encode(self) -> str:
        return FormCodec.encode_form(self.coeffs)

    def __str__(self) -> str:
        return self.encode()


@dataclass(frozen=True)
class RationalForm:
    """Binary form with rational coefficients, produced by rational substitutions."""

    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        if not coeffs or all(c == 0 for c in coeffs):
            raise AllZeroError("all coefficients are zero")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def scale(self, factor: Number) -> "RationalForm":
        return RationalForm(tuple(c * factor for c in self.coeffs))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def as_binary_form(self) -> BinaryForm:
        if not self.is_integral():
            raise BinaryFormError(f"form {self} has non-integral coefficients")
        return BinaryForm(tuple(c.numerator for c in self.coeffs))

    def encode(self) -> str:
        return FormCodec.encode_form(self.coeffs)

    def __str__(self) -> str:
        return self.encode()


@dataclass(frozen=True)
class IntMatrix2:
    """Integer 2x2 matrix (a b; c d)."""

    a: int
    b: int
    c: int
    d: int

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def entries(self) -> Tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def is_unimodular(self) -> bool:
        return self.det in (1, -1)

    def adjugate(self) -> "IntMatrix2":
        return IntMatrix2(self.d, -self.b, -self.c, self.a)

    def __neg__(self) -> "IntMatrix2":
        return IntMatrix2(-self.a, -self.b, -self.c, -self.d)

    def __matmul__(self, other: "IntMatrix2") -> "IntMatrix2":
        return IntMatrix2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    @classmethod
    def identity(cls) -> "IntMatrix2":
        return cls(1, 0, 0, 1)

    @classmethod
    def parse(cls, text: str) -> "IntMatrix2":
        entries = FormCodec.decode_matrix(text)
        if any(isinstance(e, Fraction) for e in entries):
            raise BinaryFormError(f"matrix {text!r} is not integral")
        return cls(*entries)

    def encode(self) -> str:
        return FormCodec.encode_matrix(self.entries)

    def __str__(self) -> str:
        return self.encode()


@dataclass(frozen=True)
class RatMatrix2:
    """
    Rational 2x2 matrix up to scalars.

    Entries are divided by the first nonzero entry, so two matrices inducing
    the same projective map compare equal.
    """

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        entries = [Fraction(x) for x in (self.a, self.b, self.c, self.d)]
        if entries[0] * entries[3] - entries[1] * entries[2] == 0:
            raise SingularMatrixError(f"matrix {entries} is singular")
        pivot = next(x for x in entries if x != 0)
        for name, value in zip("abcd", entries):
            object.__setattr__(self, name, value / pivot)

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    @property
    def entries(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c, self.d)

    def inverse(self) -> "RatMatrix2":
        return RatMatrix2(self.d, -self.b, -self.c, self.a)

    def encode(self) -> str:
        return FormCodec.encode_matrix(self.entries)

    def __str__(self) -> str:
        return self.encode()


Matrix2 = Union[IntMatrix2, RatMatrix2]
AnyForm = Union[BinaryForm, RationalForm]


def make_form(coeffs: Sequence[int]) -> BinaryForm:
    """Build a form of degree len(coeffs) - 1."""
    return BinaryForm(tuple(coeffs))


def content(F: BinaryForm) -> int:
    """Gcd of the coefficients."""
    return reduce(math.gcd, F.coeffs, 0)


def primitive_part(F: BinaryForm) -> BinaryForm:
    g = content(F)
    return BinaryForm(tuple(c // g for c in F.coeffs))


def negate(F: BinaryForm) -> BinaryForm:
    return BinaryForm(tuple(-c for c in F.coeffs))


def evaluate(F: AnyForm, x: Number, y: Number) -> Number:
    """Exact value F(x, y)."""
    r = F.degree
    return normalize_number(sum(
        (Fraction(c) * Fraction(x) ** (r - i) * Fraction(y) ** i for i, c in enumerate(F.coeffs)),
        Fraction(0),
    ))


def multiply(F: BinaryForm, G: BinaryForm) -> BinaryForm:
    """Product form of degree deg F + deg G."""
    return BinaryForm(tuple(_poly_mul(F.coeffs, G.coeffs)))


def transform(F: AnyForm, U: Matrix2) -> AnyForm:
    """
    The form F(aX + bY, cX + dY).

    Integer matrices on integer forms give a BinaryForm, anything rational
    gives a RationalForm.
    """
    if U.det == 0:
        raise SingularMatrixError(f"cannot transform by singular matrix {U}")

    if isinstance(U, IntMatrix2) and isinstance(F, BinaryForm):
        return BinaryForm(tuple(_expand(F.coeffs, *U.entries)))

    entries = [Fraction(x) for x in U.entries]
    coeffs = [Fraction(c) for c in F.coeffs]
    return RationalForm(tuple(_expand(coeffs, *entries)))


def discriminant(F: AnyForm) -> Number:
    """
    Discriminant D(F), equal to disc(F(X, 1)) when a0 = 1.

    Computed as (-1)^(r(r-1)/2) Res(f, f') / a0 with f = F(X, 1). A form
    with a0 = 0 is first moved by the det-1 substitution Y -> kX + Y, with
    k the least positive integer giving a nonzero leading coefficient.
    """
    r = F.degree
    if r < 1:
        raise BinaryFormError("discriminant needs degree at least 1")
    if r == 1:
        return 1

    if F.coeffs[0] == 0:
        k = 1
        while evaluate(F, 1, k) == 0:
            k += 1
        logger.debug(f"Shifting {F} by Y -> {k}X + Y before taking the discriminant")
        shift = IntMatrix2(1, 0, k, 1) if isinstance(F, BinaryForm) else RatMatrix2(1, 0, k, 1)
        F = transform(F, shift)

    coeffs = F.coeffs
    derivative = [(r - i) * c for i, c in enumerate(coeffs[:-1])]
    value = Fraction(_sylvester_determinant(coeffs, derivative)) / coeffs[0]
    if (r * (r - 1) // 2) % 2:
        value = -value
    if isinstance(F, BinaryForm):
        if value.denominator != 1:
            raise BinaryFormError(f"non-integral discriminant for integer form {F}")
        return value.numerator
    return normalize_number(value)


def resultant(F: AnyForm, G: AnyForm) -> Number:
    """Resultant R(F, G) from the homogeneous Sylvester matrix of the declared degrees."""
    if F.degree < 1 or G.degree < 1:
        raise BinaryFormError("resultant needs degrees at least 1")
    return _sylvester_determinant(F.coeffs, G.coeffs)


def discriminant_product(Fs: Sequence[BinaryForm]) -> Tuple[int, int, int]:
    """
    Both sides of D(F1...Fn) = prod D(Fi) * prod_{i<j} R(Fi, Fj)^2.

    Returns (D(product), product of discriminants, product of squared
    resultants) and raises if the identity fails.
    """
    if not Fs:
        raise BinaryFormError("discriminant_product needs at least one factor")
    if any(F.degree < 1 for F in Fs):
        raise BinaryFormError("every factor must have degree at least 1")

    product = reduce(multiply, Fs)
    lhs = discriminant(product)
    discriminants = math.prod(discriminant(F) for F in Fs)
    resultants = math.prod(resultant(F, G) ** 2 for F, G in combinations(Fs, 2))
    if lhs != discriminants * resultants:
        raise BinaryFormError(
            f"discriminant product identity fails: {lhs} != {discriminants} * {resultants}"
        )
    return lhs, discriminants, resultants


def is_squarefree(F: BinaryForm) -> bool:
    return F.degree >= 1 and discriminant(F) != 0
