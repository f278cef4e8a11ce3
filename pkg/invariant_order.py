"""
Invariant orders of irreducible binary forms.

For F = a0 X^r + ... + ar irreducible with a root θ of F(X, 1), the order
O_F has the Z-basis

    ω1 = 1, ω(k+1) = a0 θ^k + a1 θ^(k-1) + ... + a(k-1) θ   (k = 1, ..., r-1)

It is closed under multiplication and its trace-form discriminant equals
D(F). Elements are handled as rational coordinate vectors in the power
basis 1, θ, ..., θ^(r-1); field arithmetic goes through sympy polynomials
over QQ.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, List, Sequence, Tuple

from sympy import Poly, QQ, Symbol

from binary_forms import BinaryForm, IntMatrix2, Matrix2, primitive_part, transform
from errors import BinaryFormError, ClosureViolationError, DegreeTooSmallError, FieldMismatchError, ReducibleError
from utils import ExactLinearAlgebra, FormCodec, to_fraction, to_rational

logger = logging.getLogger(__name__)

x = Symbol("x")

Vector = Tuple[Fraction, ...]


@dataclass(frozen=True)
class OrderPresentation:
    """Z-basis of an order in power-basis coordinates plus its multiplication table."""

    degree: int
    minimal_field_poly: Tuple[Fraction, ...]
    basis_matrix: Tuple[Vector, ...]
    structure_constants: Tuple[Tuple[Tuple[int, ...], ...], ...]

    def as_dict(self) -> Dict:
        encode = FormCodec.encode_rational
        return {
            "degree": self.degree,
            "minimal_polynomial": [encode(c) for c in self.minimal_field_poly],
            "basis_matrix": [[encode(c) for c in row] for row in self.basis_matrix],
            "structure_constants": [
                [list(cell) for cell in plane] for plane in self.structure_constants
            ],
        }


def _field_poly(coefficients: Sequence[Fraction]) -> Poly:
    return Poly([to_rational(c) for c in coefficients], x, domain=QQ)


def _element(vector: Sequence[Fraction]) -> Poly:
    """Power-basis vector (constant term first) as a polynomial in x."""
    return Poly([to_rational(c) for c in reversed(vector)], x, domain=QQ)


def _vector(element: Poly, degree: int) -> Vector:
    coefficients = [to_fraction(c) for c in reversed(element.all_coeffs())]
    coefficients += [Fraction(0)] * (degree - len(coefficients))
    return tuple(coefficients[:degree])


def is_irreducible(F: BinaryForm) -> bool:
    """Exact irreducibility over Q, a root at infinity counting as a linear factor."""
    if F.degree < 1:
        return False
    if F.degree == 1:
        return True
    if F.coeffs[0] == 0:
        return False
    _, factors = Poly(list(primitive_part(F).coeffs), x, domain=QQ).factor_list()
    return len(factors) == 1 and factors[0][1] == 1 and factors[0][0].degree() == F.degree


def monic_field_poly(F: BinaryForm) -> Tuple[Fraction, ...]:
    """F(X, 1) / a0, leading coefficient first."""
    lead = F.coeffs[0]
    return tuple(Fraction(c, lead) for c in F.coeffs)


def present_order(basis: Sequence[Sequence[Fraction]], field_poly: Sequence[Fraction]) -> OrderPresentation:
    """
    Multiplication table of the lattice spanned by basis rows.

    Raises ClosureViolationError when a product leaves the lattice.
    """
    degree = len(field_poly) - 1
    basis = tuple(tuple(Fraction(c) for c in row) for row in basis)
    modulus = _field_poly(field_poly)
    inverse = ExactLinearAlgebra.inverse(basis)
    elements = [_element(row) for row in basis]

    constants = []
    for i in range(degree):
        plane = []
        for j in range(degree):
            power_vector = _vector((elements[i] * elements[j]).rem(modulus), degree)
            coordinates = [
                sum((power_vector[m] * inverse[m][k] for m in range(degree)), Fraction(0))
                for k in range(degree)
            ]
            if any(c.denominator != 1 for c in coordinates):
                raise ClosureViolationError(
                    f"product of basis elements {i} and {j} has coordinates {coordinates}"
                )
            plane.append(tuple(c.numerator for c in coordinates))
        constants.append(tuple(plane))

    return OrderPresentation(degree, tuple(Fraction(c) for c in field_poly), basis, tuple(constants))


def _order_basis(coeffs: Sequence[int], theta: Sequence[Fraction], modulus: Poly, degree: int) -> List[Vector]:
    """ω1 = 1 and ω(k+1) = sum_{i<k} a_i θ^(k-i), with θ given in power-basis coordinates."""
    theta_element = _element(theta)
    powers = [Poly([1], x, domain=QQ)]
    for _ in range(1, degree):
        powers.append((powers[-1] * theta_element).rem(modulus))

    one = tuple(Fraction(int(k == 0)) for k in range(degree))
    rows = [one]
    for k in range(1, degree):
        element = Poly([0], x, domain=QQ)
        for i in range(k):
            element += powers[k - i] * int(coeffs[i])
        rows.append(_vector(element.rem(modulus), degree))
    return rows


def invariant_order(F: BinaryForm) -> OrderPresentation:
    """The invariant order of an irreducible form of degree at least 2."""
    if F.degree < 2:
        raise DegreeTooSmallError("invariant orders need degree at least 2")
    if not is_irreducible(F):
        raise ReducibleError(f"form {F} is reducible over Q")

    field_poly = monic_field_poly(F)
    theta = tuple(Fraction(int(k == 1)) for k in range(F.degree))
    basis = _order_basis(F.coeffs, theta, _field_poly(field_poly), F.degree)
    return present_order(basis, field_poly)


def order_discriminant(order: OrderPresentation) -> int:
    """det(Tr(ωi ωj)) from the structure constants."""
    r = order.degree
    c = order.structure_constants
    traces = [sum(c[i][j][j] for j in range(r)) for i in range(r)]
    gram = [[sum(c[i][j][k] * traces[k] for k in range(r)) for j in range(r)] for i in range(r)]
    return int(ExactLinearAlgebra.determinant(gram))


def _integral_lattice(order: OrderPresentation, common: int) -> List[List[int]]:
    return [[int(entry * common) for entry in row] for row in order.basis_matrix]


def _common_denominator(*orders: OrderPresentation) -> int:
    rows = [row for order in orders for row in order.basis_matrix]
    _, scale = ExactLinearAlgebra.clear_denominators([[entry for row in rows for entry in row]])
    return scale


def order_equal(first: OrderPresentation, second: OrderPresentation) -> bool:
    """Equality of the two lattices via Hermite normal forms."""
    if first.minimal_field_poly != second.minimal_field_poly:
        raise FieldMismatchError("orders are presented over different field polynomials")
    common = _common_denominator(first, second)
    return (
        ExactLinearAlgebra.lattice_hnf(_integral_lattice(first, common))
        == ExactLinearAlgebra.lattice_hnf(_integral_lattice(second, common))
    )


def induced_root_map(T: Matrix2, field_poly: Sequence[Fraction]) -> Vector:
    """(aθ + b) / (cθ + d) in power-basis coordinates for T = (a b; c d)."""
    modulus = _field_poly(field_poly)
    degree = len(field_poly) - 1
    a, b, c, d = (to_rational(entry) for entry in T.entries)
    numerator = Poly([a, b], x, domain=QQ)
    denominator = Poly([c, d], x, domain=QQ)
    if denominator.is_zero:
        raise BinaryFormError(f"matrix {T} sends θ to infinity")
    image = (numerator * denominator.invert(modulus)).rem(modulus)
    return _vector(image, degree)


def order_in_field(G: BinaryForm, theta_g: Sequence[Fraction], field_poly: Sequence[Fraction]) -> OrderPresentation:
    """The invariant order of G built on the root θ_G, given in coordinates of another field presentation."""
    if G.degree != len(field_poly) - 1:
        raise FieldMismatchError(f"form {G} does not match a field of degree {len(field_poly) - 1}")
    basis = _order_basis(G.coeffs, theta_g, _field_poly(field_poly), G.degree)
    return present_order(basis, field_poly)


def transformed_order(F: BinaryForm, U: IntMatrix2) -> OrderPresentation:
    """Order of F_U on the root U^-1 θ_F, presented in the field of F."""
    field_poly = monic_field_poly(F)
    theta_g = induced_root_map(U.adjugate(), field_poly)
    return order_in_field(transform(F, U), theta_g, field_poly)


def _multiplication_matrix(vector: Sequence[Fraction], companion_powers: Sequence[List[List[Fraction]]]) -> List[List[Fraction]]:
    degree = len(vector)
    matrix = [[Fraction(0)] * degree for _ in range(degree)]
    for k, coefficient in enumerate(vector):
        if coefficient == 0:
            continue
        for i in range(degree):
            for j in range(degree):
                matrix[i][j] += coefficient * companion_powers[k][i][j]
    return matrix


def order_fingerprint(order: OrderPresentation, height_bound: int) -> Tuple[Tuple[int, ...], ...]:
    """
    Sorted characteristic polynomials of all Σ xi hi with |xi| <= height_bound.

    The hi are the Hermite-normal-form basis of the lattice in the power-basis
    coordinates, so presentations of the same lattice in the same field give
    the same fingerprint. Orders of different fields are compared through
    index_form instead.
    """
    degree = order.degree
    common = _common_denominator(order)
    hnf = ExactLinearAlgebra.lattice_hnf(_integral_lattice(order, common))
    basis = [[Fraction(entry, common) for entry in row] for row in hnf]

    monic = order.minimal_field_poly
    # Multiplication by θ on the power basis, acting on column vectors
    companion = [[Fraction(0)] * degree for _ in range(degree)]
    for i in range(1, degree):
        companion[i][i - 1] = Fraction(1)
    for i in range(degree):
        companion[i][degree - 1] = -monic[degree - i]
    powers = [[[Fraction(int(i == j)) for j in range(degree)] for i in range(degree)]]
    for _ in range(1, degree):
        powers.append(ExactLinearAlgebra.multiply(powers[-1], companion))

    polynomials = []
    for weights in product(range(-height_bound, height_bound + 1), repeat=degree):
        vector = [
            sum((w * basis[i][k] for i, w in enumerate(weights)), Fraction(0)) for k in range(degree)
        ]
        coefficients = ExactLinearAlgebra.charpoly(_multiplication_matrix(vector, powers))
        if any(c.denominator != 1 for c in coefficients):
            raise ClosureViolationError(f"element {vector} of the order is not integral")
        polynomials.append(tuple(c.numerator for c in coefficients))
    return tuple(sorted(polynomials))


def index_form(order: OrderPresentation) -> BinaryForm:
    """
    Index form of a cubic order with basis 1, ω2, ω3.

    For u = x ω2 + y ω3 this is det(1, u, u^2) in the basis coordinates, a
    binary cubic in (x, y). For the invariant order of F it equals F.
    """
    if order.degree != 3:
        raise DegreeTooSmallError(f"index forms are computed for cubic orders, got degree {order.degree}")
    c = order.structure_constants
    return BinaryForm((
        c[1][1][2],
        2 * c[1][2][2] - c[1][1][1],
        c[2][2][2] - 2 * c[1][2][1],
        -c[2][2][1],
    ))
