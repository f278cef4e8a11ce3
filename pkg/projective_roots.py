"""
High-precision projective roots of binary forms and their cross-ratio invariants.

A root of F is a point (x : y) of the projective line with F(x, y) = 0,
stored as the finite value x/y or as infinity. Roots are computed with the
Aberth-Ehrlich iteration in mpmath at a given binary precision and come
with error radii from the Weierstrass inclusion disks; a root set is only
returned when those disks are pairwise well separated.
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import permutations
from typing import List, Optional, Sequence, Tuple

import mpmath as mp

from binary_forms import BinaryForm, RatMatrix2, discriminant, transform
from config_manager import get_precision_config
from errors import DegenerateError, DegreeTooSmallError, NotSquarefreeError, PrecisionExhaustedError

logger = logging.getLogger(__name__)

# Matching outcomes shared with the equivalence decision
MATCH_HOLDS = "holds"
MATCH_FAILS = "fails"
MATCH_UNCLEAR = "unclear"


@dataclass(frozen=True)
class ProjectivePoint:
    """A point of the complex projective line; value None stands for infinity."""

    value: Optional[mp.mpc]
    error: mp.mpf = field(default_factory=lambda: mp.mpf(0))
    precision_bits: int = 53

    @classmethod
    def finite(cls, value, error=0, precision_bits: int = 53) -> "ProjectivePoint":
        with mp.workprec(precision_bits):
            return cls(mp.mpc(value), mp.mpf(error), precision_bits)

    @classmethod
    def infinity(cls, precision_bits: int = 53) -> "ProjectivePoint":
        return cls(None, mp.mpf(0), precision_bits)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def homogeneous(self) -> Tuple[mp.mpc, mp.mpc]:
        """Homogeneous coordinates (x, y) with value x / y."""
        if self.value is None:
            return (mp.mpc(1), mp.mpc(0))
        return (self.value, mp.mpc(1))


@dataclass(frozen=True)
class RootSet:
    """The r projective roots of a degree-r form at a given precision."""

    points: Tuple[ProjectivePoint, ...]
    precision_bits: int

    @property
    def certified_error(self) -> Tuple[mp.mpf, ...]:
        return tuple(point.error for point in self.points)

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class CrossRatioProfile:
    """Cross ratios of all ordered 4-tuples of distinct roots."""

    values: Tuple[mp.mpc, ...]
    errors: Tuple[mp.mpf, ...]
    precision_bits: int
    digest: str

    def as_dict(self, digits: int = 20) -> dict:
        return {
            "values": [[mp.nstr(v.real, digits), mp.nstr(v.imag, digits)] for v in self.values],
            "hash": self.digest,
        }


def _horner(coeffs: Sequence[mp.mpc], z: mp.mpc) -> Tuple[mp.mpc, mp.mpc]:
    value = mp.mpc(0)
    slope = mp.mpc(0)
    for c in coeffs:
        slope = slope * z + value
        value = value * z + c
    return value, slope


def _initial_guesses(coeffs: Sequence[mp.mpf], degree: int) -> List[mp.mpc]:
    lead = abs(coeffs[0])
    radius = max(
        (abs(c) / lead) ** (mp.mpf(1) / i) for i, c in enumerate(coeffs) if i > 0 and c != 0
    )
    offset = mp.mpf(7) / (10 * degree)
    return [
        radius * mp.expj(2 * mp.pi * k / degree + offset) for k in range(degree)
    ]


def _evaluation_noise(poly: Sequence[mp.mpc], z: mp.mpc, unit: mp.mpf) -> mp.mpf:
    """Bound on the rounding error of a Horner evaluation at z."""
    degree = len(poly) - 1
    magnitude = abs(z)
    return unit * 4 * degree * mp.fsum(abs(c) * magnitude ** (degree - i) for i, c in enumerate(poly))


def _aberth(coeffs: Sequence[int], bits: int, start: Optional[List[mp.mpc]] = None):
    """
    One Aberth run at the given precision.

    An approximation is settled once its residual is below the evaluation
    noise; the run also stops when the steps stop shrinking near the
    working precision. Returns (approximations, radii) when the inclusion
    disks are certified and separated, None otherwise.
    """
    degree = len(coeffs) - 1
    with mp.workprec(bits):
        poly = [mp.mpc(c) for c in coeffs]
        if degree == 0:
            return [], []
        if degree == 1:
            z = -poly[1] / poly[0]
            return [z], [mp.mpf(2) ** (-(bits - 8)) * max(1, abs(z))]

        z = list(start) if start else _initial_guesses([mp.mpf(c) for c in coeffs], degree)
        z = [mp.mpc(value) for value in z]
        unit = mp.mpf(2) ** (-bits)
        tolerance = mp.mpf(2) ** (-(bits - 8))
        stall_zone = mp.mpf(2) ** (-(bits // 2))
        previous_step = None
        stalls = 0
        converged = False
        for _ in range(100 + bits // 4):
            largest_step = mp.mpf(0)
            settled = 0
            for k in range(degree):
                value, slope = _horner(poly, z[k])
                if abs(value) <= _evaluation_noise(poly, z[k], unit):
                    settled += 1
                    continue
                if slope == 0:
                    slope = mp.mpc(tolerance)
                ratio = value / slope
                repulsion = mp.fsum(1 / (z[k] - z[j]) for j in range(degree) if j != k)
                step = ratio / (1 - ratio * repulsion)
                z[k] -= step
                largest_step = max(largest_step, abs(step) / max(1, abs(z[k])))
            if settled == degree or largest_step < tolerance:
                converged = True
                break
            if previous_step is not None and largest_step < stall_zone and 2 * largest_step >= previous_step:
                stalls += 1
                if stalls >= 3:
                    converged = True
                    break
            else:
                stalls = 0
            previous_step = largest_step

        if not converged:
            return None

        slack = mp.mpf(2) ** (-(bits - 8))
        radii = []
        for k in range(degree):
            value, _ = _horner(poly, z[k])
            rounding = _evaluation_noise(poly, z[k], unit)
            denominator = abs(poly[0])
            for j in range(degree):
                if j != k:
                    denominator *= abs(z[k] - z[j])
            if denominator == 0:
                return None
            radii.append(degree * (abs(value) + rounding) / denominator + slack * max(1, abs(z[k])))

        for i in range(degree):
            for j in range(i + 1, degree):
                if abs(z[i] - z[j]) <= 2 * (radii[i] + radii[j]):
                    return None
        return z, radii


def roots(F: BinaryForm, precision_bits: Optional[int] = None, max_bits: Optional[int] = None) -> RootSet:
    """
    Projective roots of a squarefree form with certified error radii.

    Precision is doubled on failure up to max_bits.
    """
    config = get_precision_config()
    bits = precision_bits or config.ladder[0]
    cap = max(max_bits or config.max_bits, bits)

    if discriminant(F) == 0:
        raise NotSquarefreeError(f"form {F} has a repeated root")

    at_infinity = F.coeffs[0] == 0
    finite_coeffs = F.coeffs[1:] if at_infinity else F.coeffs

    start = None
    while True:
        result = _aberth(finite_coeffs, bits, start)
        if result is not None:
            values, radii = result
            points = [ProjectivePoint(v, e, bits) for v, e in zip(values, radii)]
            if at_infinity:
                points.append(ProjectivePoint.infinity(bits))
            return RootSet(tuple(points), bits)

        if bits >= cap:
            raise PrecisionExhaustedError(
                f"could not certify the roots of {F} within {cap} bits", precision_bits=cap
            )
        logger.debug(f"Root certification failed for {F} at {bits} bits, doubling")
        bits = min(2 * bits, cap)
        start = None


def _working_bits(points: Sequence[ProjectivePoint]) -> int:
    return max(point.precision_bits for point in points)


def _check_distinct(points: Sequence[ProjectivePoint]):
    if len(points) != 4:
        raise DegenerateError("cross ratio needs exactly four points")
    if sum(point.is_infinite for point in points) > 1:
        raise DegenerateError("at most one point may be infinity")
    finite = [point.value for point in points if not point.is_infinite]
    for i in range(len(finite)):
        for j in range(i + 1, len(finite)):
            if finite[i] == finite[j]:
                raise DegenerateError("cross ratio needs four distinct points")


def cross_ratio(p1: ProjectivePoint, p2: ProjectivePoint, p3: ProjectivePoint, p4: ProjectivePoint) -> mp.mpc:
    """
    (a1 - a2)(a3 - a4) / ((a1 - a3)(a2 - a4)).

    A point at infinity cancels the two factors it appears in.
    """
    points = (p1, p2, p3, p4)
    _check_distinct(points)
    with mp.workprec(_working_bits(points)):
        a1, a2, a3, a4 = (point.value for point in points)
        if p1.is_infinite:
            return (a3 - a4) / (a2 - a4)
        if p2.is_infinite:
            return -(a3 - a4) / (a1 - a3)
        if p3.is_infinite:
            return -(a1 - a2) / (a2 - a4)
        if p4.is_infinite:
            return (a1 - a2) / (a1 - a3)
        return (a1 - a2) * (a3 - a4) / ((a1 - a3) * (a2 - a4))


def cross_ratio_error(p1: ProjectivePoint, p2: ProjectivePoint, p3: ProjectivePoint, p4: ProjectivePoint) -> mp.mpf:
    """First-order error bound of cross_ratio from the point error radii."""
    points = (p1, p2, p3, p4)
    with mp.workprec(_working_bits(points)):
        value = abs(cross_ratio(*points))
        relative = mp.mpf(0)
        for i, j in ((0, 1), (2, 3), (0, 2), (1, 3)):
            if points[i].is_infinite or points[j].is_infinite:
                continue
            relative += (points[i].error + points[j].error) / abs(points[i].value - points[j].value)
        rounding = mp.mpf(2) ** (-(_working_bits(points) - 4))
        return value * (2 * relative + rounding)


def _quantize(value: mp.mpc, digits: int) -> Tuple[int, int]:
    scale = mp.mpf(10) ** digits
    return (int(mp.nint(value.real * scale)), int(mp.nint(value.imag * scale)))


def cross_ratio_profile(F: BinaryForm, precision_bits: Optional[int] = None, digits: Optional[int] = None) -> CrossRatioProfile:
    """Multiset of cross ratios over all ordered 4-tuples of distinct roots, with a quantized hash."""
    if F.degree < 4:
        raise DegreeTooSmallError("cross-ratio profiles need degree at least 4")
    digits = digits or get_precision_config().profile_digits
    root_set = roots(F, precision_bits)
    return profile_of_roots(root_set, digits)


def profile_of_roots(root_set: RootSet, digits: int) -> CrossRatioProfile:
    points = root_set.points
    values, errors = [], []
    with mp.workprec(root_set.precision_bits):
        for i, j, k, l in permutations(range(len(points)), 4):
            quadruple = (points[i], points[j], points[k], points[l])
            values.append(cross_ratio(*quadruple))
            errors.append(cross_ratio_error(*quadruple))
        quantized = sorted(_quantize(value, digits) for value in values)
    digest = hashlib.sha256(json.dumps(quantized).encode("ascii")).hexdigest()
    return CrossRatioProfile(tuple(values), tuple(errors), root_set.precision_bits, digest)


def profiles_match(first: CrossRatioProfile, second: CrossRatioProfile) -> bool:
    """Tolerant multiset comparison: every value pairs with a distinct value within twice the summed errors."""
    if len(first.values) != len(second.values):
        return False
    bits = max(first.precision_bits, second.precision_bits)
    with mp.workprec(bits):
        remaining = list(range(len(second.values)))
        approximations = [complex(v) for v in second.values]
        for value, error in zip(first.values, first.errors):
            rough = complex(value)
            found = None
            for position, index in enumerate(remaining):
                if abs(approximations[index] - rough) > 1e-6 * (1 + abs(rough)):
                    continue
                if abs(second.values[index] - value) <= 2 * (error + second.errors[index]):
                    found = position
                    break
            if found is None:
                return False
            remaining.pop(found)
    return True


def pairing_identity_holds(root_set: RootSet) -> bool:
    """Check cross_ratio(i,j;k,l) + cross_ratio(i,l;k,j) == 1 within twice the error for every 4-tuple."""
    points = root_set.points
    with mp.workprec(root_set.precision_bits):
        for i, j, k, l in permutations(range(len(points)), 4):
            x_points = (points[i], points[j], points[k], points[l])
            y_points = (points[i], points[l], points[k], points[j])
            defect = abs(cross_ratio(*x_points) + cross_ratio(*y_points) - 1)
            if defect > 2 * (cross_ratio_error(*x_points) + cross_ratio_error(*y_points)):
                logger.debug(f"Pairing identity defect {mp.nstr(defect, 5)} at tuple {(i, j, k, l)}")
                return False
    return True


def mobius_from_triples(source: Sequence[ProjectivePoint], target: Sequence[ProjectivePoint]):
    """
    Matrix M (as a 4-tuple a, b, c, d) with M . source[i] proportional to target[i].

    Must be called inside an mpmath precision context.
    """
    def frame(points):
        (x1, y1), (x2, y2), (x3, y3) = (point.homogeneous() for point in points)
        base = x1 * y2 - x2 * y1
        l1 = (x3 * y2 - x2 * y3) / base
        l2 = (x1 * y3 - x3 * y1) / base
        return (l1 * x1, l2 * x2, l1 * y1, l2 * y2)

    a, b, c, d = frame(source)
    # Inverse of the source frame up to a scalar
    ia, ib, ic, id_ = d, -b, -c, a
    p, q, r, s = frame(target)
    return (p * ia + q * ic, p * ib + q * id_, r * ia + s * ic, r * ib + s * id_)


def apply_mobius(matrix, point: ProjectivePoint) -> Tuple[mp.mpc, mp.mpc]:
    a, b, c, d = matrix
    x, y = point.homogeneous()
    return (a * x + b * y, c * x + d * y)


def chordal_distance(first: Tuple[mp.mpc, mp.mpc], second: Tuple[mp.mpc, mp.mpc]) -> mp.mpf:
    (x1, y1), (x2, y2) = first, second
    norm = mp.sqrt(abs(x1) ** 2 + abs(y1) ** 2) * mp.sqrt(abs(x2) ** 2 + abs(y2) ** 2)
    return abs(x1 * y2 - x2 * y1) / norm


@dataclass(frozen=True)
class MatchingEstimate:
    """
    One matching of the first three source roots onto a triple of target roots.

    matrix is the Möbius map scaled so that its pivot entry is 1, and
    distances[k][m] is the chordal distance from the image of source root k
    to target root m. The error fields bound both to first order in the
    certified root radii, plus the rounding of the working precision.
    """

    matrix: Tuple[mp.mpc, mp.mpc, mp.mpc, mp.mpc]
    matrix_error: mp.mpf
    distances: Tuple[Tuple[mp.mpf, ...], ...]
    distance_errors: Tuple[Tuple[mp.mpf, ...], ...]
    precision_bits: int


def _matching_values(source: Sequence[ProjectivePoint], target: Sequence[ProjectivePoint], triple, pivot=None):
    matrix = mobius_from_triples(source[:3], [target[i] for i in triple])
    if pivot is None:
        pivot = max(range(4), key=lambda index: abs(matrix[index]))
    normalized = tuple(entry / matrix[pivot] for entry in matrix)
    targets = [point.homogeneous() for point in target]
    distances = [[chordal_distance(apply_mobius(normalized, point), t) for t in targets] for point in source]
    return normalized, distances, pivot


def _nudged(points: Sequence[ProjectivePoint], index: int, delta: mp.mpc) -> List[ProjectivePoint]:
    moved = list(points)
    moved[index] = replace(moved[index], value=moved[index].value + delta)
    return moved


def estimate_matching(source: RootSet, target: RootSet, triple: Sequence[int]) -> MatchingEstimate:
    """
    Möbius map of a matching with error bounds from the root radii.

    Each finite root is moved by its radius along the real and the imaginary
    axis and the resulting changes are summed, which bounds the change of
    the matrix and of every distance to first order. The work runs at twice
    the root precision.
    """
    bits = min(source.precision_bits, target.precision_bits)
    rounding = mp.mpf(2) ** (-(bits - 8))
    with mp.workprec(2 * bits):
        sides = [list(source.points), list(target.points)]
        matrix, distances, pivot = _matching_values(sides[0], sides[1], triple)
        matrix_shift = mp.mpf(0)
        distance_shift = [[mp.mpf(0) for _ in sides[1]] for _ in sides[0]]

        for side, points in enumerate(sides):
            for index, point in enumerate(points):
                if point.is_infinite or point.error == 0:
                    continue
                for direction in (mp.mpc(1, 0), mp.mpc(0, 1)):
                    moved = _nudged(points, index, direction * point.error)
                    pair = (moved, sides[1]) if side == 0 else (sides[0], moved)
                    moved_matrix, moved_distances, _ = _matching_values(pair[0], pair[1], triple, pivot)
                    matrix_shift += max(abs(a - b) for a, b in zip(moved_matrix, matrix))
                    for k, row in enumerate(moved_distances):
                        for m, value in enumerate(row):
                            distance_shift[k][m] += abs(value - distances[k][m])

        return MatchingEstimate(
            matrix=matrix,
            matrix_error=2 * matrix_shift + rounding,
            distances=tuple(tuple(row) for row in distances),
            distance_errors=tuple(tuple(2 * shift + rounding for shift in row) for row in distance_shift),
            precision_bits=bits,
        )


def match_roots(estimate: MatchingEstimate) -> str:
    """
    Whether the Möbius map of a matching carries the source roots onto the target roots.

    A target is compatible with a source root when their distance is within
    its error bound. MATCH_FAILS is returned only when some source root has
    no compatible target or two source roots are forced onto the same one;
    MATCH_UNCLEAR when some source root has several compatible targets.
    """
    slack = mp.mpf(2) ** (-(estimate.precision_bits // 2))
    used = set()
    unclear = False
    for row, errors in zip(estimate.distances, estimate.distance_errors):
        compatible = [m for m, (distance, error) in enumerate(zip(row, errors)) if distance <= error + slack]
        if not compatible:
            return MATCH_FAILS
        if len(compatible) > 1:
            unclear = True
            continue
        if compatible[0] in used:
            return MATCH_FAILS
        used.add(compatible[0])
    return MATCH_UNCLEAR if unclear else MATCH_HOLDS


def _exact(value: mp.mpf) -> Fraction:
    """The binary fraction an mpf stores, sign included."""
    sign, mantissa, exponent, _ = value._mpf_
    if mantissa == 0:
        return Fraction(0)
    exact = Fraction(mantissa) * Fraction(2) ** exponent
    return -exact if sign else exact


def _rationalize(estimate: MatchingEstimate, denominator_bound: int) -> Optional[RatMatrix2]:
    """Recover a rational matrix from a matching, or None when it is not rational at this precision."""
    tolerance = mp.mpf(2) ** (-(estimate.precision_bits // 2)) + estimate.matrix_error
    if any(abs(entry.imag) > tolerance for entry in estimate.matrix):
        return None

    entries = []
    for entry in estimate.matrix:
        exact = _exact(entry.real)
        candidate = exact.limit_denominator(denominator_bound)
        if abs(candidate - exact) > _exact(tolerance):
            return None
        entries.append(candidate)
    if entries[0] * entries[3] - entries[1] * entries[2] == 0:
        return None
    return RatMatrix2(*entries)


def _scalar_between(G: BinaryForm, H) -> Optional[Fraction]:
    """The rational λ with G == λ H, if there is one."""
    pivot = next(i for i, c in enumerate(H.coeffs) if c != 0)
    scalar = Fraction(G.coeffs[pivot]) / H.coeffs[pivot]
    if scalar == 0:
        return None
    if all(Fraction(g) == scalar * h for g, h in zip(G.coeffs, H.coeffs)):
        return scalar
    return None


def weak_equivalence_transform(
    F: BinaryForm,
    G: BinaryForm,
    precision_bits: Optional[int] = None,
    denominator_bound: Optional[int] = None,
) -> Optional[Tuple[RatMatrix2, Fraction]]:
    """
    Find rational T and λ with G == λ F_{T^-1}, so that T maps the roots of F to those of G.

    T^-1 is the normalized inverse RatMatrix2 of T. Three roots of F are
    matched against every ordered triple of roots of G; the Möbius map of a
    matching whose full root correspondence holds is rationalized and then
    verified by exact expansion. Returns None when no matching verifies.
    """
    if F.degree < 3:
        raise DegreeTooSmallError("weak equivalence reconstruction needs degree at least 3")
    if F.degree != G.degree:
        return None

    config = get_precision_config()
    bound = denominator_bound or config.denominator_bound
    roots_f = roots(F, precision_bits)
    roots_g = roots(G, precision_bits)
    bits = min(roots_f.precision_bits, roots_g.precision_bits)

    suspicious = False
    with mp.workprec(bits):
        for triple in permutations(range(G.degree), 3):
            estimate = estimate_matching(roots_f, roots_g, triple)
            if match_roots(estimate) != MATCH_HOLDS:
                continue
            candidate = _rationalize(estimate, bound)
            if candidate is None:
                continue
            scalar = _scalar_between(G, transform(F, candidate.inverse()))
            if scalar is not None:
                logger.debug(f"Weak equivalence {F} -> {G} via T={candidate}, lambda={scalar}")
                return candidate, scalar
            suspicious = True

    if suspicious:
        raise PrecisionExhaustedError(
            f"rationalized candidates for {F} ~ {G} failed exact verification at {bits} bits",
            precision_bits=bits,
        )
    return None
