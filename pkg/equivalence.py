"""
GL2(Z)-equivalence decision for binary forms with exact certificates.

Forms of degree at least 3 are decided by matching three roots of F against
every ordered triple of roots of G. If G = F_U then the roots of G are the
images of the roots of F under U^-1, so each matching determines U up to
sign; the numeric candidate is rounded to an integer matrix and checked by
exact expansion. A matching counts as refuted only when it misses every
integer matrix by more than the error carried over from the root radii.
Forms of degree 1 and 2 go through exact reduction.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from itertools import permutations
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath as mp

from binary_forms import BinaryForm, IntMatrix2, content, discriminant, transform
from config_manager import get_precision_config
from errors import DegreeTooSmallError, NotSquarefreeError, PrecisionExhaustedError, UnknownPairError
from projective_roots import (
    MATCH_FAILS,
    MATCH_HOLDS,
    MatchingEstimate,
    cross_ratio_profile,
    estimate_matching,
    match_roots,
    profiles_match,
    roots,
)
from quadratic_reduction import quadratic_equivalence
from utils import UnionFind

logger = logging.getLogger(__name__)


class VerdictStatus(str, Enum):
    """Three-valued outcome of an equivalence decision."""
    EQUIVALENT = "Equivalent"
    NOT_EQUIVALENT = "NotEquivalent"
    UNKNOWN = "Unknown"


class SeparatingInvariant(str, Enum):
    """What told two forms apart."""
    DEGREE = "degree"
    CONTENT = "content"
    DISCRIMINANT = "discriminant"
    CROSS_RATIO_PROFILE = "cross-ratio-profile"
    MATCHING_EXHAUSTED = "matching-exhausted"
    REDUCED_FORM = "reduced-form"


@dataclass(frozen=True)
class EquivalenceVerdict:
    """Decision with its certificate."""
    status: VerdictStatus
    certificate: Optional[IntMatrix2] = None
    separating_invariant: Optional[SeparatingInvariant] = None
    precision_bits: Optional[int] = None
    matchings_tried: int = 0

    @property
    def is_equivalent(self) -> bool:
        return self.status == VerdictStatus.EQUIVALENT

    def as_dict(self) -> Dict:
        document = {"status": self.status.value, "matchings_tried": self.matchings_tried}
        if self.certificate is not None:
            document["certificate"] = self.certificate.encode()
        if self.separating_invariant is not None:
            document["separating_invariant"] = self.separating_invariant.value
        if self.precision_bits is not None:
            document["precision_bits"] = self.precision_bits
        return document


def _not_equivalent(invariant: SeparatingInvariant, **extra) -> EquivalenceVerdict:
    return EquivalenceVerdict(VerdictStatus.NOT_EQUIVALENT, separating_invariant=invariant, **extra)


def equivalence_filters(F: BinaryForm, G: BinaryForm, precision_bits: Optional[int] = None) -> Optional[EquivalenceVerdict]:
    """A NotEquivalent verdict when a cheap invariant separates F and G, else None."""
    if F.degree != G.degree:
        return _not_equivalent(SeparatingInvariant.DEGREE)
    if content(F) != content(G):
        return _not_equivalent(SeparatingInvariant.CONTENT)
    disc_f, disc_g = discriminant(F), discriminant(G)
    if disc_f != disc_g:
        return _not_equivalent(SeparatingInvariant.DISCRIMINANT)

    if F.degree >= 4 and disc_f != 0:
        try:
            profile_f = cross_ratio_profile(F, precision_bits)
            profile_g = cross_ratio_profile(G, precision_bits)
        except PrecisionExhaustedError as e:
            logger.debug(f"Skipping the profile filter for {F}, {G}: {e}")
            return None
        # Hashes only ever prove inequality after the tolerant comparison agrees
        if profile_f.digest != profile_g.digest and not profiles_match(profile_f, profile_g):
            return _not_equivalent(SeparatingInvariant.CROSS_RATIO_PROFILE)
    return None


def _candidate_from_matching(estimate: MatchingEstimate):
    """
    Integer candidate U for one matching, or a refutation.

    The error bound of the matching is carried through the scaling to
    determinant ±1. A matching is refuted only when its scaled matrix lies
    outside that bound from every real integer matrix. Returns
    ("candidate", IntMatrix2), ("refuted", None) or ("undecided", None).
    """
    slack = mp.mpf(2) ** (-(estimate.precision_bits // 2))
    a, b, c, d = estimate.matrix
    adjugate = (d, -b, -c, a)
    pivot = max(adjugate, key=abs)
    normalized = [entry / pivot for entry in adjugate]
    error = 2 * estimate.matrix_error

    imaginary = max(abs(entry.imag) for entry in normalized)
    if imaginary > 2 * error + slack:
        return "refuted", None

    real = [entry.real for entry in normalized]
    determinant = real[0] * real[3] - real[1] * real[2]
    determinant_error = 4 * error * (1 + error)
    if abs(determinant) <= 2 * determinant_error:
        return "undecided", None
    scale = mp.sqrt(abs(determinant))
    scaled = [entry / scale for entry in real]
    magnitude = max(abs(entry) for entry in scaled)
    scaled_error = error / scale + magnitude * determinant_error / abs(determinant)
    if scaled_error >= mp.mpf(1) / 8:
        return "undecided", None

    rounded = [int(mp.nint(entry)) for entry in scaled]
    offset = max(abs(entry - value) for entry, value in zip(scaled, rounded))
    if offset > 2 * scaled_error + slack:
        return "refuted", None
    return "candidate", IntMatrix2(*rounded)


def _match_at_precision(F: BinaryForm, G: BinaryForm, bits: int) -> Tuple[Optional[IntMatrix2], bool, int]:
    """Run every matching at one precision: (certificate, all_refuted, matchings_tried)."""
    try:
        roots_f = roots(F, bits, max_bits=bits)
        roots_g = roots(G, bits, max_bits=bits)
    except PrecisionExhaustedError:
        return None, False, 0

    tried = 0
    undecided = False
    with mp.workprec(bits):
        for triple in permutations(range(G.degree), 3):
            tried += 1
            estimate = estimate_matching(roots_f, roots_g, triple)
            outcome = match_roots(estimate)
            if outcome == MATCH_FAILS:
                continue
            if outcome != MATCH_HOLDS:
                undecided = True
                continue

            kind, U = _candidate_from_matching(estimate)
            if kind == "undecided":
                undecided = True
                continue
            if kind == "refuted" or not U.is_unimodular():
                continue
            for signed in (U, -U):
                if transform(F, signed) == G:
                    return signed, False, tried
    return None, not undecided, tried


def find_equivalence(F: BinaryForm, G: BinaryForm, ladder: Optional[Sequence[int]] = None) -> EquivalenceVerdict:
    """
    Decide F ~ G for squarefree forms of degree at least 3 by root matching.

    Precision climbs the ladder until every matching is either verified or
    refuted; Unknown is returned when the ladder runs out.
    """
    if F.degree < 3 or G.degree < 3:
        raise DegreeTooSmallError("root matching needs degree at least 3")
    if discriminant(F) == 0 or discriminant(G) == 0:
        raise NotSquarefreeError(f"{F} or {G} has a repeated root")
    if F.degree != G.degree:
        return _not_equivalent(SeparatingInvariant.DEGREE)

    ladder = tuple(ladder or get_precision_config().ladder)
    total_tried = 0
    for bits in ladder:
        certificate, refuted, tried = _match_at_precision(F, G, bits)
        total_tried += tried
        if certificate is not None:
            return EquivalenceVerdict(
                VerdictStatus.EQUIVALENT, certificate=certificate,
                precision_bits=bits, matchings_tried=total_tried,
            )
        if refuted:
            return _not_equivalent(
                SeparatingInvariant.MATCHING_EXHAUSTED, precision_bits=bits, matchings_tried=total_tried,
            )
        logger.debug(f"Matchings for {F} ~ {G} undecided at {bits} bits, escalating")

    logger.warning(f"Equivalence of {F} and {G} undecided after {ladder[-1]} bits")
    return EquivalenceVerdict(VerdictStatus.UNKNOWN, precision_bits=ladder[-1], matchings_tried=total_tried)


def decide_equivalence(F: BinaryForm, G: BinaryForm, ladder: Optional[Sequence[int]] = None) -> EquivalenceVerdict:
    """Filters, then exact reduction for degree at most 2 or root matching above."""
    ladder = tuple(ladder or get_precision_config().ladder)
    verdict = equivalence_filters(F, G, ladder[0])
    if verdict is not None:
        return verdict

    if F.degree <= 2:
        U = quadratic_equivalence(F, G)
        if U is None:
            return _not_equivalent(SeparatingInvariant.REDUCED_FORM)
        return EquivalenceVerdict(VerdictStatus.EQUIVALENT, certificate=U)

    if F == G:
        return EquivalenceVerdict(VerdictStatus.EQUIVALENT, certificate=IntMatrix2.identity())
    return find_equivalence(F, G, ladder)


@dataclass
class Classification:
    """Partition of a list of forms into GL2(Z) classes."""
    classes: List[List[BinaryForm]]
    comparisons: int
    unknown_pairs: List[Tuple[BinaryForm, BinaryForm]]

    @property
    def class_count(self) -> int:
        return len(self.classes)


def classify(
    forms: Sequence[BinaryForm],
    ladder: Optional[Sequence[int]] = None,
    raise_on_unknown: bool = True,
) -> Classification:
    """
    Union-find partition of forms into equivalence classes.

    Each form is compared with one member of every class sharing its
    content and discriminant. An Unknown pair raises UnknownPairError unless
    raise_on_unknown is False, in which case it is recorded and the form
    opens its own class.
    """
    forms = list(forms)
    union_find = UnionFind()
    buckets: Dict[Tuple[int, int, int], List[int]] = {}
    comparisons = 0
    unknown_pairs: List[Tuple[BinaryForm, BinaryForm]] = []

    for index, form in enumerate(forms):
        union_find.find(index)
        bucket = buckets.setdefault((form.degree, content(form), discriminant(form)), [])
        for leader in bucket:
            comparisons += 1
            verdict = decide_equivalence(forms[leader], form, ladder)
            if verdict.status == VerdictStatus.EQUIVALENT:
                union_find.union(leader, index)
                break
            if verdict.status == VerdictStatus.UNKNOWN:
                if raise_on_unknown:
                    raise UnknownPairError(forms[leader], form, verdict.precision_bits)
                unknown_pairs.append((forms[leader], form))
        else:
            bucket.append(index)

    components = union_find.component_dict()
    ordered = sorted(components.values(), key=min)
    classes = [[forms[i] for i in sorted(members)] for members in ordered]
    logger.debug(f"Classified {len(forms)} forms into {len(classes)} classes with {comparisons} comparisons")
    return Classification(classes, comparisons, unknown_pairs)
