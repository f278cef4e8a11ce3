"""
Exact GL2(Z) classification of linear and quadratic forms.

canonical_form(F) returns a class key together with a unimodular U such
that transform(F, U) is the canonical representative of the class; two
forms of degree at most 2 are equivalent exactly when their keys agree.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from binary_forms import BinaryForm, IntMatrix2, content, discriminant, transform
from errors import BinaryFormError, DegreeTooSmallError

logger = logging.getLogger(__name__)

FLIP = IntMatrix2(1, 0, 0, -1)
TURN = IntMatrix2(0, -1, 1, 0)


@dataclass(frozen=True)
class QuadraticClass:
    """Class key plus the matrix carrying the input form to the representative."""
    key: Tuple
    matrix: IntMatrix2
    representative: BinaryForm


def _extended_gcd(x: int, y: int) -> Tuple[int, int, int]:
    """(g, s, t) with s*x + t*y == g >= 0."""
    old_r, r = x, y
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _shift(k: int) -> IntMatrix2:
    return IntMatrix2(1, k, 0, 1)


def _linear_class(F: BinaryForm) -> QuadraticClass:
    a0, a1 = F.coeffs
    g, s, t = _extended_gcd(a0, a1)
    U = IntMatrix2(s, -a1 // g, t, a0 // g)
    return QuadraticClass(("linear", g), U, transform(F, U))


def _reduce_definite(F: BinaryForm) -> Tuple[BinaryForm, IntMatrix2]:
    """Reduce a positive definite form to -a < b <= a <= c, b >= 0 when a == c."""
    U = IntMatrix2.identity()

    def normalized(form, matrix):
        a, b, c = form.coeffs
        if -a < b <= a:
            return form, matrix
        r = (a - b) // (2 * a)
        step = _shift(r)
        return transform(form, step), matrix @ step

    form, U = normalized(F, U)
    while True:
        a, b, c = form.coeffs
        if not (a > c or (a == c and b < 0)):
            break
        s = (c + b) // (c + c)
        step = IntMatrix2(0, -1, 1, s)
        form, U = normalized(transform(form, step), U @ step)
    return form, U


def _definite_class(F: BinaryForm) -> QuadraticClass:
    sign = 1 if F.coeffs[0] > 0 else -1
    positive = F if sign > 0 else BinaryForm(tuple(-c for c in F.coeffs))
    reduced, U = _reduce_definite(positive)
    if reduced.coeffs[1] < 0:
        reduced, U = transform(reduced, FLIP), U @ FLIP
    a, b, c = reduced.coeffs
    representative = transform(F, U)
    return QuadraticClass(("definite", sign, a, b, c), U, representative)


def _normalize_indefinite(form: BinaryForm, D: int) -> Tuple[BinaryForm, IntMatrix2]:
    a, b, _ = form.coeffs
    modulus = 2 * abs(a)
    if a * a < D:
        root = math.isqrt(D)
        target = root - ((root - b) % modulus)
    else:
        target = ((b + abs(a) - 1) % modulus) - abs(a) + 1
    step = _shift((target - b) // (2 * a))
    return transform(form, step), step


def _is_reduced_indefinite(form: BinaryForm, D: int) -> bool:
    a, b, _ = form.coeffs
    if b <= 0 or b * b >= D:
        return False
    upper = b + 2 * abs(a)
    lower = 2 * abs(a) - b
    return upper * upper > D and (lower < 0 or lower * lower < D)


def _rho(form: BinaryForm, D: int) -> Tuple[BinaryForm, IntMatrix2]:
    turned = transform(form, TURN)
    normal, step = _normalize_indefinite(turned, D)
    return normal, TURN @ step


def _indefinite_cycle_minimum(F: BinaryForm, D: int) -> Tuple[Tuple[int, int, int], IntMatrix2]:
    form, U = _normalize_indefinite(F, D) if F.coeffs[0] != 0 else _rho(F, D)
    guard = 0
    while not _is_reduced_indefinite(form, D):
        form, step = _rho(form, D)
        U = U @ step
        guard += 1
        if guard > 10 * (D + 10):
            raise BinaryFormError(f"indefinite reduction of {F} did not terminate")

    start = form.coeffs
    best = (start, U)
    while True:
        form, step = _rho(form, D)
        U = U @ step
        if form.coeffs == start:
            break
        if form.coeffs < best[0]:
            best = (form.coeffs, U)
    return best


def _indefinite_class(F: BinaryForm, D: int) -> QuadraticClass:
    key, U = _indefinite_cycle_minimum(F, D)
    flipped_key, flipped_U = _indefinite_cycle_minimum(transform(F, FLIP), D)
    if flipped_key < key:
        key, U = flipped_key, FLIP @ flipped_U
    return QuadraticClass(("indefinite",) + tuple(key), U, transform(F, U))


def _rational_roots(F: BinaryForm) -> List[Tuple[int, int]]:
    """Primitive integer points (x, y) with F(x, y) == 0 for a quadratic with square discriminant."""
    a, b, c = F.coeffs
    if a == 0:
        points = [(1, 0)]
        if b != 0:
            points.append((-c // math.gcd(b, c), b // math.gcd(b, c)))
        return points
    root = math.isqrt(b * b - 4 * a * c)
    points = []
    for numerator in (-b + root, -b - root):
        g = math.gcd(numerator, 2 * a)
        point = (numerator // g, 2 * a // g)
        if point not in points:
            points.append(point)
    return points


def _split_class(F: BinaryForm) -> QuadraticClass:
    best: Optional[QuadraticClass] = None
    for x0, y0 in _rational_roots(F):
        _, s, t = _extended_gcd(x0, y0)
        # First column is the root, so the transformed form vanishes at infinity
        U = IntMatrix2(x0, -t, y0, s)
        moved = transform(F, U)
        _, b, c = moved.coeffs
        if b < 0:
            U = U @ IntMatrix2(-1, 0, 0, 1)
            moved = transform(F, U)
            _, b, c = moved.coeffs
        if b != 0:
            U = U @ _shift(-(c // b))
            moved = transform(F, U)
            _, b, c = moved.coeffs
        candidate = QuadraticClass(("split", b, c), U, moved)
        if best is None or candidate.key < best.key:
            best = candidate
    return best


def canonical_form(F: BinaryForm) -> QuadraticClass:
    """Class key, reducing matrix and representative of a form of degree 1 or 2."""
    if F.degree == 1:
        return _linear_class(F)
    if F.degree != 2:
        raise DegreeTooSmallError(f"quadratic reduction handles degrees 1 and 2, got {F.degree}")

    D = discriminant(F)
    if D < 0:
        result = _definite_class(F)
    elif math.isqrt(D) ** 2 == D:
        result = _split_class(F)
    else:
        result = _indefinite_class(F, D)

    if transform(F, result.matrix) != result.representative or not result.matrix.is_unimodular():
        raise BinaryFormError(f"reduction of {F} produced an invalid matrix {result.matrix}")
    logger.debug(f"Reduced {F} to {result.representative} with key {result.key}")
    return result


def class_key(F: BinaryForm) -> Tuple:
    return canonical_form(F).key


def quadratic_equivalence(F: BinaryForm, G: BinaryForm) -> Optional[IntMatrix2]:
    """A unimodular U with transform(F, U) == G, or None when F and G are inequivalent."""
    if F.degree != G.degree or content(F) != content(G):
        return None
    first, second = canonical_form(F), canonical_form(G)
    if first.key != second.key:
        return None
    # G = C_{V^-1} where C = F_U and V is the reducing matrix of G
    inverse = second.matrix.adjugate()
    if second.matrix.det == -1:
        inverse = -inverse
    U = first.matrix @ inverse
    if transform(F, U) != G:
        raise BinaryFormError(f"equal keys for {F} and {G} but {U} does not map one to the other")
    return U
