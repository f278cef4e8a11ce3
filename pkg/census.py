"""
Discriminant censuses, the lower-bound family and unit-resultant searches.

Forms are enumerated in the box |ai| <= H with 0 < a0 <= H, grouped by
exact discriminant and classified row by row. Rows are independent, so
they may be classified in worker processes; the report is sorted by
discriminant and never depends on completion order.
"""

import logging
import time
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from binary_forms import (
    BinaryForm,
    IntMatrix2,
    content,
    discriminant,
    evaluate,
    make_form,
    negate,
    resultant,
    transform,
)
from census_cache import CacheKey, CensusCache
from config import CODE_VERSION
from config_manager import get_config_manager
from equivalence import VerdictStatus, classify, decide_equivalence
from errors import BinaryFormError, DegreeTooSmallError, NotSquarefreeError, UnknownPairError
from invariant_order import index_form, invariant_order, is_irreducible, order_fingerprint
from quadratic_reduction import class_key
from utils import UnionFind, parallel_map

logger = logging.getLogger(__name__)

Y_SCALED = "y-scaled"
X_SCALED = "x-scaled"
FAMILY_VARIANTS = (Y_SCALED, X_SCALED)


@dataclass(frozen=True)
class CensusFlags:
    """Filters applied while enumerating the box."""
    irreducible: bool = False
    primitive: bool = False
    squarefree: bool = False
    leading_zero_band: bool = False

    def key(self) -> str:
        names = [name for name in ("irreducible", "primitive", "squarefree", "leading_zero_band") if getattr(self, name)]
        return ",".join(names) or "none"


@dataclass
class CensusRow:
    """Forms of one discriminant and their classes."""
    discriminant: int
    form_count: int
    class_count: int
    representatives: List[str]
    class_sizes: List[int]

    def as_dict(self) -> Dict:
        return {
            "discriminant": self.discriminant,
            "form_count": self.form_count,
            "class_count": self.class_count,
            "representatives": list(self.representatives),
            "class_sizes": list(self.class_sizes),
        }


@dataclass
class CensusReport:
    """Per-discriminant class counts of a coefficient box."""
    degree: int
    height: int
    flags: CensusFlags
    rows: Dict[int, CensusRow] = field(default_factory=dict)
    skipped_degenerate: int = 0
    unknown_pairs: List[Tuple[str, str]] = field(default_factory=list)
    version: str = CODE_VERSION

    @property
    def form_count(self) -> int:
        return sum(row.form_count for row in self.rows.values())


def height_key(F: BinaryForm) -> Tuple:
    """Order used to pick class representatives: smallest height first."""
    return (max(abs(c) for c in F.coeffs), sum(abs(c) for c in F.coeffs), F.coeffs)


def _passes(F: BinaryForm, flags: CensusFlags) -> bool:
    if flags.primitive and content(F) != 1:
        return False
    if flags.squarefree and discriminant(F) == 0:
        return False
    if flags.irreducible and not is_irreducible(F):
        return False
    return True


def enumerate_forms(r: int, H: int, flags: Optional[CensusFlags] = None) -> Iterator[BinaryForm]:
    """
    All forms with 0 < a0 <= H and |ai| <= H passing the flags, in lexicographic order.

    The leading-zero band adds forms with a0 = 0 and a1 > 0 whose X <-> Y
    swap is not already in the main box (that is, ar <= 0).
    """
    flags = flags or CensusFlags()
    if r < 1:
        raise DegreeTooSmallError("census degree must be at least 1")
    if H < 1:
        return
    span = range(-H, H + 1)
    for lead in range(1, H + 1):
        for rest in product(span, repeat=r):
            F = BinaryForm((lead,) + rest)
            if _passes(F, flags):
                yield F

    if flags.leading_zero_band:
        for second in range(1, H + 1):
            for rest in product(span, repeat=r - 1):
                coeffs = (0, second) + rest
                if coeffs[-1] > 0:
                    continue
                F = BinaryForm(coeffs)
                if _passes(F, flags):
                    yield F


def _representative(members: Sequence[BinaryForm]) -> BinaryForm:
    return min(members, key=height_key)


def _classify_row(task: Tuple[int, List[Tuple[int, ...]], Tuple[int, ...]]) -> Tuple[int, List[List[Tuple[int, ...]]], List[Tuple[str, str]]]:
    """Worker: classify one discriminant row given as coefficient tuples."""
    disc, coefficient_lists, ladder = task
    forms = [BinaryForm(coeffs) for coeffs in coefficient_lists]
    if forms and forms[0].degree <= 2:
        groups: Dict[Tuple, List[BinaryForm]] = {}
        for form in forms:
            groups.setdefault(class_key(form), []).append(form)
        classes = list(groups.values())
        unknown: List[Tuple[str, str]] = []
    else:
        result = classify(forms, ladder, raise_on_unknown=False)
        classes = result.classes
        unknown = [(first.encode(), second.encode()) for first, second in result.unknown_pairs]
    return disc, [[form.coeffs for form in members] for members in classes], unknown


def _row_from_classes(disc: int, classes: Sequence[Sequence[BinaryForm]]) -> CensusRow:
    summary = sorted((_representative(members).encode(), len(members)) for members in classes)
    return CensusRow(
        discriminant=disc,
        form_count=sum(len(members) for members in classes),
        class_count=len(classes),
        representatives=[rep for rep, _ in summary],
        class_sizes=[size for _, size in summary],
    )


def census_by_discriminant(
    r: int,
    H: int,
    flags: Optional[CensusFlags] = None,
    ladder: Optional[Sequence[int]] = None,
    jobs: Optional[int] = None,
    cache_path: Optional[str] = None,
) -> CensusReport:
    """
    Group the box by discriminant and count GL2(Z) classes in every row.

    Degree 1 and 2 rows are classified by exact reduction, higher degrees by
    root matching; forms of degree at least 3 with zero discriminant are
    skipped and counted. Undecided pairs are listed in the report.
    """
    manager = get_config_manager()
    flags = flags or CensusFlags()
    ladder = tuple(ladder or manager.precision.ladder)
    jobs = jobs or manager.census.jobs
    cache_path = cache_path or manager.census.cache_path
    report = CensusReport(r, H, flags)
    if H < 1:
        return report

    started = time.perf_counter()
    grouped: Dict[int, List[BinaryForm]] = {}
    for F in enumerate_forms(r, H, flags):
        disc = discriminant(F)
        if r >= 3 and disc == 0:
            report.skipped_degenerate += 1
            continue
        grouped.setdefault(disc, []).append(F)

    cache = CensusCache(cache_path) if cache_path else None
    key = CacheKey(r, H, flags.key(), CODE_VERSION)
    cached = cache.load(key) if cache else {}

    pending = []
    for disc in sorted(grouped):
        members = grouped[disc]
        encodings = [F.encode() for F in members]
        if encodings and all(encoding in cached for encoding in encodings):
            by_rep: Dict[str, List[BinaryForm]] = {}
            for F, encoding in zip(members, encodings):
                by_rep.setdefault(cached[encoding][1], []).append(F)
            report.rows[disc] = _row_from_classes(disc, list(by_rep.values()))
        else:
            pending.append((disc, [F.coeffs for F in members], ladder))

    logger.info(f"Census r={r} H={H}: {len(grouped)} rows, {len(grouped) - len(pending)} from cache")
    for disc, class_lists, unknown in parallel_map(_classify_row, pending, jobs):
        classes = [[BinaryForm(coeffs) for coeffs in members] for members in class_lists]
        report.rows[disc] = _row_from_classes(disc, classes)
        report.unknown_pairs.extend(unknown)
        if unknown:
            logger.debug(f"Row {disc} has {len(unknown)} undecided pairs, leaving it out of the cache")
        elif cache:
            cache.append(key, [
                (F.encode(), disc, _representative(members).encode())
                for members in classes for F in members
            ])

    report.rows = {disc: report.rows[disc] for disc in sorted(report.rows)}
    report.unknown_pairs.sort()
    logger.info(
        f"Census r={r} H={H} finished: {report.form_count} forms in {len(report.rows)} rows "
        f"({time.perf_counter() - started:.2f}s)"
    )
    return report


def family_matrix(a: int, beta: int, variant: str = Y_SCALED) -> IntMatrix2:
    """(1 β; 0 a) for the y-scaled family, (a β; 0 1) for the x-scaled one."""
    if variant == Y_SCALED:
        return IntMatrix2(1, beta, 0, a)
    if variant == X_SCALED:
        return IntMatrix2(a, beta, 0, 1)
    raise BinaryFormError(f"unknown family variant {variant!r}, expected one of {FAMILY_VARIANTS}")


def lower_bound_family(F: BinaryForm, a: int, betas: Sequence[int], variant: str = Y_SCALED) -> List[BinaryForm]:
    """
    The forms F(X + βY, aY) (y-scaled) or F(aX + βY, Y) (x-scaled) for β in betas.

    Every member has discriminant a^(r(r-1)) D(F).
    """
    if a < 1:
        raise BinaryFormError(f"family parameter a must be positive, got {a}")
    if discriminant(F) == 0:
        raise NotSquarefreeError(f"family base {F} has a repeated root")
    return [transform(F, family_matrix(a, beta, variant)) for beta in betas]


def augmented_equivalent(first: IntMatrix2, second: IntMatrix2) -> Optional[IntMatrix2]:
    """
    The transformation between augmented forms (F_A1, A1^-1 θ) and (F_A2, A2^-1 θ).

    Up to sign it can only be A1^-1 A2; returned when integral and unimodular.
    """
    product_matrix = first.adjugate() @ second
    det = first.det
    if any(entry % det for entry in product_matrix.entries):
        return None
    U = IntMatrix2(*(entry // det for entry in product_matrix.entries))
    return U if U.is_unimodular() else None


@dataclass
class FamilyPair:
    """Verdicts for one pair of family members."""
    first_beta: int
    second_beta: int
    congruent: bool
    status: VerdictStatus
    certificate: Optional[IntMatrix2]
    augmented_certificate: Optional[IntMatrix2]

    def as_dict(self) -> Dict:
        return {
            "betas": [self.first_beta, self.second_beta],
            "congruent": self.congruent,
            "status": self.status.value,
            "certificate": self.certificate.encode() if self.certificate else None,
            "augmented_certificate": self.augmented_certificate.encode() if self.augmented_certificate else None,
        }


@dataclass
class FamilyReport:
    """Pairwise classification of a lower-bound family."""
    base: BinaryForm
    a: int
    variant: str
    members: List[Tuple[int, BinaryForm]]
    common_discriminant: Optional[int]
    classes: List[List[int]]
    pairs: List[FamilyPair]

    @property
    def class_count(self) -> int:
        return len(self.classes)

    @property
    def collapsed_pairs(self) -> List[Tuple[int, int]]:
        """Pairs with β1 and β2 incongruent mod a that are nevertheless equivalent."""
        return [
            (pair.first_beta, pair.second_beta) for pair in self.pairs
            if not pair.congruent and pair.status == VerdictStatus.EQUIVALENT
        ]

    def as_dict(self) -> Dict:
        return {
            "form": self.base.encode(),
            "a": self.a,
            "variant": self.variant,
            "members": [{"beta": beta, "form": form.encode()} for beta, form in self.members],
            "discriminant": str(self.common_discriminant) if self.common_discriminant is not None else None,
            "class_count": self.class_count,
            "classes": self.classes,
            "collapsed_pairs": [list(pair) for pair in self.collapsed_pairs],
            "pairs": [pair.as_dict() for pair in self.pairs],
        }


def family_inequivalence_check(
    F: BinaryForm,
    a: int,
    betas: Sequence[int],
    variant: str = Y_SCALED,
    ladder: Optional[Sequence[int]] = None,
) -> FamilyReport:
    """
    Decide every pair of family members, plain and augmented.

    Equivalent pairs with β1 and β2 incongruent mod a are reported as
    collapsed, never treated as errors.
    """
    betas = list(betas)
    members = lower_bound_family(F, a, betas, variant)
    discriminants = {discriminant(member) for member in members}
    union_find = UnionFind()
    pairs = []

    for i in range(len(betas)):
        union_find.find(i)
    for i, j in combinations(range(len(betas)), 2):
        verdict = decide_equivalence(members[i], members[j], ladder)
        if verdict.status == VerdictStatus.UNKNOWN:
            raise UnknownPairError(members[i], members[j], verdict.precision_bits)
        if verdict.is_equivalent:
            union_find.union(i, j)
        pairs.append(FamilyPair(
            betas[i], betas[j],
            congruent=(betas[i] - betas[j]) % a == 0,
            status=verdict.status,
            certificate=verdict.certificate,
            augmented_certificate=augmented_equivalent(
                family_matrix(a, betas[i], variant), family_matrix(a, betas[j], variant)
            ),
        ))

    classes = sorted(
        (sorted(betas[i] for i in members_) for members_ in union_find.component_dict().values()),
        key=lambda group: group[0],
    )
    report = FamilyReport(
        F, a, variant, list(zip(betas, members)),
        discriminants.pop() if len(discriminants) == 1 else None,
        classes, pairs,
    )
    if report.collapsed_pairs:
        logger.warning(
            f"{variant} family of {F} with a={a}: {len(report.collapsed_pairs)} incongruent pairs are equivalent"
        )
    return report


def family_growth_report(
    F: BinaryForm,
    a_values: Sequence[int],
    variant: str = X_SCALED,
    ladder: Optional[Sequence[int]] = None,
) -> List[Dict]:
    """Observed class counts of the family over the full residue range, per a."""
    rows = []
    alpha = F.degree * (F.degree - 1) // 2
    for a in a_values:
        report = family_inequivalence_check(F, a, range(a), variant, ladder)
        rows.append({
            "a": a,
            "norm": a ** alpha,
            "members": len(report.members),
            "class_count": report.class_count,
            "collapsed_pairs": len(report.collapsed_pairs),
        })
    return rows


def _sign_normalized(F: BinaryForm) -> BinaryForm:
    leading = next(c for c in F.coeffs if c != 0)
    return F if leading > 0 else negate(F)


def resultant_unit_search(F0: BinaryForm, s: int, H: int) -> List[Tuple[BinaryForm, int]]:
    """
    Degree-s forms F1 with |coefficients| <= H and R(F0, F1) = ±1, up to sign.

    Each class is represented by the member whose first nonzero coefficient
    is positive, paired with its resultant.
    """
    if F0.degree < 3:
        raise DegreeTooSmallError("unit-resultant search needs deg F0 >= 3")
    if discriminant(F0) == 0:
        raise NotSquarefreeError(f"{F0} has a repeated root")
    if s < 1:
        raise DegreeTooSmallError("companion degree must be at least 1")

    found: Dict[Tuple[int, ...], int] = {}
    for coeffs in product(range(-H, H + 1), repeat=s + 1):
        if not any(coeffs):
            continue
        F1 = _sign_normalized(make_form(coeffs))
        if F1.coeffs in found:
            continue
        value = resultant(F0, F1)
        if value in (1, -1):
            found[F1.coeffs] = value
    return [(BinaryForm(coeffs), found[coeffs]) for coeffs in sorted(found)]


def thue_identity_holds(F0: BinaryForm, H: int) -> bool:
    """R(F0, cX + dY) == F0(d, -c) for every nonzero (c, d) in the height-H box."""
    for c, d in product(range(-H, H + 1), repeat=2):
        if c == 0 and d == 0:
            continue
        if resultant(F0, make_form((c, d))) != evaluate(F0, d, -c):
            logger.warning(f"Resultant identity fails for {F0} at ({c}, {d})")
            return False
    return True


def delone_faddeev_findings(report: CensusReport, height_bound: Optional[int] = None) -> List[Dict]:
    """
    Check the cubic rings attached to the representatives of a cubic census.

    Every irreducible representative must be recovered as the index form of
    its invariant order ("index-form-mismatch" otherwise). Two inequivalent
    representatives of one row whose orders share a fingerprint are listed
    as "fingerprint-coincidence"; fingerprints are computed in different
    fields, so a coincidence is inconclusive and only flagged for inspection.
    """
    bound = height_bound if height_bound is not None else get_config_manager().census.fingerprint_bound
    findings: List[Dict] = []
    if report.degree != 3:
        return findings
    for disc, row in report.rows.items():
        forms = [F for F in (BinaryForm.parse(rep) for rep in row.representatives) if is_irreducible(F)]
        orders = [invariant_order(F) for F in forms]
        for F, order in zip(forms, orders):
            recovered = index_form(order)
            if recovered != F:
                findings.append({
                    "kind": "index-form-mismatch",
                    "discriminant": disc,
                    "forms": [F.encode(), recovered.encode()],
                })
        if len(forms) < 2:
            continue
        prints = [order_fingerprint(order, bound) for order in orders]
        for i, j in combinations(range(len(forms)), 2):
            if prints[i] == prints[j]:
                findings.append({
                    "kind": "fingerprint-coincidence",
                    "discriminant": disc,
                    "forms": [forms[i].encode(), forms[j].encode()],
                    "height_bound": bound,
                })
    if findings:
        logger.warning(f"{len(findings)} cubic ring findings in census r=3 H={report.height}")
    return findings
