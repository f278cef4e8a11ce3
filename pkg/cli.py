#!/usr/bin/env python3
"""
Command-line interface for the binary forms toolkit.

Every subcommand prints one JSON document on stdout; diagnostics go to
stderr. Exit codes: 0 success, 1 domain error, 2 usage error.

Encodings:
    form    r:a0,a1,...,ar   for a0 X^r + a1 X^(r-1) Y + ... + ar Y^r
    matrix  a,b;c,d          acting as F(aX + bY, cX + dY); entries may be p/q
"""

import argparse
import json
import logging
import math
import sys
from fractions import Fraction
from functools import reduce
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pythonjsonlogger import jsonlogger

from binary_forms import BinaryForm, IntMatrix2, RationalForm, discriminant, resultant, transform
from bounds import BoundInputs, bound_evaluator
from census import (
    FAMILY_VARIANTS,
    X_SCALED,
    Y_SCALED,
    CensusFlags,
    census_by_discriminant,
    delone_faddeev_findings,
    family_growth_report,
    family_inequivalence_check,
    resultant_unit_search,
)
from census_cache import export_csv
from config import SCHEMA_VERSION
from config_manager import get_config_manager
from equivalence import decide_equivalence
from errors import BinaryFormError, EncodingError, ReportValidationError
from invariant_order import invariant_order, order_discriminant, order_equal, transformed_order
from models import BoundInputsModel, CensusReportModel, ErrorDetail, ErrorResult, SUnitResultModel, VerdictModel
from report_validator import ReportValidator
from sunit import SUnitGroupSpec, stabilization_report, sunit_solutions, verify_bs_bound
from utils import FormCodec


class UsageError(Exception):
    """Raised by the argument parser instead of exiting."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_form(text: str) -> BinaryForm:
    return BinaryForm.parse(text)


def parse_betas(text: str) -> List[int]:
    """`LO..HI` (inclusive) or a comma list."""
    if ".." in text:
        low, _, high = text.partition("..")
        try:
            low_value, high_value = int(low), int(high)
        except ValueError:
            raise EncodingError(f"malformed beta range {text!r} (expected LO..HI)")
        if high_value < low_value:
            raise EncodingError(f"empty beta range {text!r}")
        return list(range(low_value, high_value + 1))
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise EncodingError(f"malformed beta list {text!r}")


def parse_int_list(text: str, what: str = "integer") -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise EncodingError(f"malformed {what} list {text!r}")


def act_exact(F: BinaryForm, entries: Sequence) -> Any:
    """F_M for the literal matrix M, which may have rational entries."""
    if all(isinstance(entry, int) for entry in entries):
        return transform(F, IntMatrix2(*entries))
    common = reduce(math.lcm, (Fraction(entry).denominator for entry in entries), 1)
    scaled = IntMatrix2(*(int(Fraction(entry) * common) for entry in entries))
    image = transform(F, scaled)
    return RationalForm(image.coeffs).scale(Fraction(1, common ** F.degree))


class BinaryFormsCLI:
    """Command-line interface for the toolkit."""

    def __init__(self, stdout=None):
        """Initialize the CLI."""
        self.stdout = stdout or sys.stdout
        self.config = get_config_manager()
        self.logger = logging.getLogger(__name__)

    def setup_logging(self, level: Optional[str] = None, json_format: Optional[bool] = None):
        """Setup logging configuration: one handler on stderr."""
        settings = self.config.logging
        handler = logging.StreamHandler(sys.stderr)
        if json_format if json_format is not None else settings.json:
            handler.setFormatter(jsonlogger.JsonFormatter('%(asctime)s %(name)s %(levelname)s %(message)s'))
        else:
            handler.setFormatter(logging.Formatter(settings.format))

        root = logging.getLogger()
        for existing in list(root.handlers):
            root.removeHandler(existing)
        root.addHandler(handler)
        root.setLevel((level or settings.level.value).upper())

    def build_parser(self) -> argparse.ArgumentParser:
        parser = _Parser(
            prog="binforms",
            description="Exact classification of integer binary forms up to GL2(Z)-equivalence",
            formatter_class=argparse.RawDescriptionHelpFormatter,
            epilog=__doc__,
        )
        parser.add_argument('--jobs', type=int, default=None, help='Worker processes for census and sunit')
        parser.add_argument('--cache', default=None, help='JSONL census cache path')
        parser.add_argument('--log-level', default=None, choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
        parser.add_argument('--log-json', action='store_true', default=None, help='Log JSON records on stderr')

        subparsers = parser.add_subparsers(dest='command', required=True)

        disc_parser = subparsers.add_parser('disc', help='Discriminant of a form')
        disc_parser.add_argument('form')

        resultant_parser = subparsers.add_parser('resultant', help='Resultant of two forms')
        resultant_parser.add_argument('first')
        resultant_parser.add_argument('second')

        act_parser = subparsers.add_parser('act', help='Apply a matrix to a form')
        act_parser.add_argument('form')
        act_parser.add_argument('matrix')

        equiv_parser = subparsers.add_parser('equiv', help='Decide GL2(Z)-equivalence')
        equiv_parser.add_argument('first')
        equiv_parser.add_argument('second')
        equiv_parser.add_argument('--precision', type=int, default=None, help='Starting precision in bits')

        order_parser = subparsers.add_parser('order', help='Invariant order of an irreducible form')
        order_parser.add_argument('form')

        order_eq_parser = subparsers.add_parser('order-eq', help='Compare invariant orders of equivalent forms')
        order_eq_parser.add_argument('first')
        order_eq_parser.add_argument('second')

        census_parser = subparsers.add_parser('census', help='Class counts per discriminant')
        census_parser.add_argument('--degree', type=int, required=True)
        census_parser.add_argument('--height', type=int, required=True)
        census_parser.add_argument('--irreducible', action='store_true')
        census_parser.add_argument('--primitive', action='store_true')
        census_parser.add_argument('--out', default=None, help='Also write the report JSON to this file')
        census_parser.add_argument('--csv', default=None, help='Also write the rows as CSV')
        census_parser.add_argument('--check-rings', action='store_true', help='Add cubic ring findings for degree 3')

        family_parser = subparsers.add_parser('family', help='Lower-bound family and its classification')
        family_parser.add_argument('--form', required=True)
        family_parser.add_argument('--a', type=int, required=True)
        family_parser.add_argument('--betas', required=True, help='LO..HI inclusive, or a comma list')
        family_parser.add_argument('--variant', choices=FAMILY_VARIANTS, default=Y_SCALED)

        growth_parser = subparsers.add_parser('growth', help='Family class counts over full residue ranges')
        growth_parser.add_argument('--form', required=True)
        growth_parser.add_argument('--a-values', required=True, help='Comma separated positive integers')
        growth_parser.add_argument('--variant', choices=FAMILY_VARIANTS, default=X_SCALED)

        runit_parser = subparsers.add_parser('runit', help='Forms with unit resultant against F0')
        runit_parser.add_argument('--form', required=True)
        runit_parser.add_argument('--deg', type=int, required=True)
        runit_parser.add_argument('--height', type=int, required=True)

        sunit_parser = subparsers.add_parser('sunit', help='Solutions of x + y = 1 in S-units')
        sunit_parser.add_argument('--primes', required=True, help='Comma separated primes')
        sunit_parser.add_argument('--bound', type=int, required=True, help='Exponent bound E')
        sunit_parser.add_argument('--stabilization', action='store_true', help='Also list counts for E = 1..bound')

        bound_parser = subparsers.add_parser('bound', help='Class-count bound for degree r and index c')
        bound_parser.add_argument('--degree', type=int, required=True)
        bound_parser.add_argument('--c', type=int, required=True)

        return parser

    def emit(self, document: Dict[str, Any]):
        document.setdefault("schema_version", SCHEMA_VERSION)
        self.stdout.write(json.dumps(document, sort_keys=True) + "\n")

    def cmd_disc(self, args) -> Dict[str, Any]:
        return {"disc": str(discriminant(parse_form(args.form)))}

    def cmd_resultant(self, args) -> Dict[str, Any]:
        return {"resultant": str(resultant(parse_form(args.first), parse_form(args.second)))}

    def cmd_act(self, args) -> Dict[str, Any]:
        image = act_exact(parse_form(args.form), FormCodec.decode_matrix(args.matrix))
        if isinstance(image, RationalForm) and image.is_integral():
            image = image.as_binary_form()
        return {"form": image.encode(), "integral": isinstance(image, BinaryForm)}

    def _ladder(self, precision: Optional[int]) -> Tuple[int, ...]:
        ladder = tuple(self.config.precision.ladder)
        if precision is None:
            return ladder
        if precision < 1:
            raise UsageError("--precision must be positive")
        return (precision,) + tuple(bits for bits in ladder if bits > precision)

    def cmd_equiv(self, args) -> Dict[str, Any]:
        verdict = decide_equivalence(parse_form(args.first), parse_form(args.second), self._ladder(args.precision))
        model = VerdictModel(
            status=verdict.status.value,
            U=verdict.certificate.encode() if verdict.certificate else None,
            separating_invariant=verdict.separating_invariant.value if verdict.separating_invariant else None,
            precision_bits=verdict.precision_bits,
            matchings_tried=verdict.matchings_tried,
        )
        return model.to_document()

    def cmd_order(self, args) -> Dict[str, Any]:
        order = invariant_order(parse_form(args.form))
        document = order.as_dict()
        document["discriminant"] = str(order_discriminant(order))
        return document

    def cmd_order_eq(self, args) -> Dict[str, Any]:
        F, G = parse_form(args.first), parse_form(args.second)
        verdict = decide_equivalence(F, G, self._ladder(None))
        document: Dict[str, Any] = {"status": verdict.status.value, "order_equal": None}
        if verdict.certificate is not None:
            document["U"] = verdict.certificate.encode()
            document["order_equal"] = order_equal(invariant_order(F), transformed_order(F, verdict.certificate))
        return document

    def cmd_census(self, args) -> Dict[str, Any]:
        flags = CensusFlags(irreducible=args.irreducible, primitive=args.primitive)
        report = census_by_discriminant(
            args.degree, args.height, flags, jobs=args.jobs, cache_path=args.cache,
        )
        validation = ReportValidator().validate(report)
        for warning in validation.warnings:
            self.logger.warning(f"Census check: {warning}")
        document = CensusReportModel.from_report(report).to_document()
        if not validation.is_valid:
            document["validation"] = validation.as_dict()
        if args.check_rings:
            document["ring_findings"] = [
                dict(finding, discriminant=str(finding["discriminant"])) for finding in delone_faddeev_findings(report)
            ]
        if args.out:
            with open(args.out, 'w', encoding='utf-8') as handle:
                handle.write(json.dumps(document, sort_keys=True) + "\n")
            self.logger.info(f"Census report written to {args.out}")
        if args.csv:
            export_csv([row.as_dict() for row in report.rows.values()], args.csv)
        if not validation.is_valid:
            raise ReportValidationError(
                f"census report failed {validation.failed} of {validation.total_checked} checks", document,
            )
        return document

    def cmd_family(self, args) -> Dict[str, Any]:
        report = family_inequivalence_check(
            parse_form(args.form), args.a, parse_betas(args.betas), args.variant, self._ladder(None),
        )
        return report.as_dict()

    def cmd_growth(self, args) -> Dict[str, Any]:
        a_values = parse_int_list(args.a_values, "a-value")
        if not a_values:
            raise EncodingError("at least one a-value is required")
        if any(a < 1 for a in a_values):
            raise EncodingError(f"a-values must be positive, got {args.a_values!r}")
        rows = family_growth_report(parse_form(args.form), a_values, args.variant, self._ladder(None))
        return {
            "form": args.form,
            "variant": args.variant,
            "rows": [dict(row, norm=str(row["norm"])) for row in rows],
        }

    def cmd_runit(self, args) -> Dict[str, Any]:
        found = resultant_unit_search(parse_form(args.form), args.deg, args.height)
        return {
            "count": len(found),
            "forms": [{"form": form.encode(), "resultant": str(value)} for form, value in found],
        }

    def cmd_sunit(self, args) -> Dict[str, Any]:
        try:
            spec = SUnitGroupSpec(primes=parse_int_list(args.primes, "prime"), exponent_bound=args.bound)
        except ValueError as e:
            raise EncodingError(f"invalid S-unit group: {e}")
        jobs = args.jobs or self.config.census.jobs
        solutions = sunit_solutions(spec, jobs)
        check = verify_bs_bound(spec, solutions)
        model = SUnitResultModel(
            primes=spec.primes,
            exponent_bound=spec.exponent_bound,
            count=check.count,
            bound=str(check.bound),
            holds=check.holds,
            solutions=[solution.as_dict() for solution in solutions],
            stabilization=[
                {"bound": bound, "count": count}
                for bound, count in stabilization_report(spec.primes, spec.exponent_bound, jobs)
            ] if args.stabilization else None,
        )
        return model.to_document()

    def cmd_bound(self, args) -> Dict[str, Any]:
        value = bound_evaluator(args.degree, args.c)
        inputs = BoundInputs.compute(args.degree, args.c)
        model = BoundInputsModel(
            degree=args.degree,
            c=args.c,
            omega=inputs.omega,
            tau=str(inputs.tau),
            divisor_sum=str(inputs.divisor_sum),
            bound=str(value),
        )
        return model.to_document()

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        """Parse argv, dispatch, print the result; returns the exit code."""
        parser = self.build_parser()
        try:
            args = parser.parse_args(argv)
        except UsageError as e:
            self.setup_logging()
            self.logger.error(f"Usage error: {e}")
            self.emit(ErrorResult(error=ErrorDetail(type="UsageError", message=str(e))).to_document())
            return 2

        self.setup_logging(args.log_level, args.log_json)
        handler = getattr(self, "cmd_" + args.command.replace("-", "_"))
        try:
            document = handler(args)
        except (UsageError, EncodingError) as e:
            self.logger.error(f"Usage error: {e}")
            self.emit(ErrorResult(error=ErrorDetail(type=type(e).__name__, message=str(e))).to_document())
            return 2
        except ReportValidationError as e:
            self.logger.error(f"{args.command} failed: {e}")
            self.emit(e.document)
            return 1
        except BinaryFormError as e:
            self.logger.error(f"{args.command} failed: {e}")
            self.emit(ErrorResult(error=ErrorDetail(type=type(e).__name__, message=str(e))).to_document())
            return 1
        except KeyboardInterrupt:
            self.logger.info("Operation cancelled by user")
            return 1

        self.emit(document)
        return 0


def main():
    """Main entry point."""
    cli = BinaryFormsCLI()
    sys.exit(cli.run())


if __name__ == "__main__":
    main()
