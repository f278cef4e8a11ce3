"""
Pydantic models for the documents the toolkit emits.

Every command result is a JSON object carrying schema_version. Integers that
can grow without bound (discriminants, resultants, bounds) are serialized as
decimal strings; forms and matrices use their text encodings.
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config import CODE_VERSION, SCHEMA_VERSION
from utils import FORM_PATTERN, MATRIX_PATTERN


class VerdictStatusModel(str, Enum):
    """Status strings of an equivalence verdict."""
    EQUIVALENT = "Equivalent"
    NOT_EQUIVALENT = "NotEquivalent"
    UNKNOWN = "Unknown"


def _check_integer_string(value: str) -> str:
    text = value.strip()
    if not text.lstrip("-").isdigit():
        raise ValueError(f"expected a decimal integer string, got {value!r}")
    return text


class CommandResult(BaseModel):
    """Envelope shared by every command output."""

    model_config = ConfigDict(extra="allow")

    schema_version: str = Field(default=SCHEMA_VERSION, description="Output schema version")

    def to_document(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude_none=True)


class ErrorDetail(BaseModel):
    """Error type and message of a failed command."""
    type: str = Field(..., min_length=1)
    message: str = Field(..., description="Human readable explanation")


class ErrorResult(CommandResult):
    """Document printed when a command fails."""
    error: ErrorDetail


class VerdictModel(CommandResult):
    """Equivalence verdict with its certificate."""

    status: VerdictStatusModel
    U: Optional[str] = Field(None, description="Matrix with F_U = G, as a,b;c,d")
    separating_invariant: Optional[str] = None
    precision_bits: Optional[int] = Field(None, ge=1)
    matchings_tried: int = Field(default=0, ge=0)

    @field_validator('U')
    @classmethod
    def validate_matrix(cls, v):
        if v is not None and not MATRIX_PATTERN.match(v):
            raise ValueError(f"malformed matrix encoding {v!r}")
        return v

    @model_validator(mode='after')
    def validate_certificate(self):
        """Equivalent verdicts carry a certificate; the others never do."""
        if self.status == VerdictStatusModel.EQUIVALENT and self.U is None:
            raise ValueError("an Equivalent verdict needs a certificate")
        if self.status != VerdictStatusModel.EQUIVALENT and self.U is not None:
            raise ValueError(f"a {self.status.value} verdict cannot carry a certificate")
        return self


class CensusRowModel(BaseModel):
    """One discriminant row of a census."""

    discriminant: str
    form_count: int = Field(..., ge=1)
    class_count: int = Field(..., ge=1)
    representatives: List[str]
    class_sizes: List[int]

    @field_validator('discriminant')
    @classmethod
    def validate_discriminant(cls, v):
        return _check_integer_string(v)

    @field_validator('representatives')
    @classmethod
    def validate_representatives(cls, v):
        for encoding in v:
            if not FORM_PATTERN.match(encoding):
                raise ValueError(f"malformed form encoding {encoding!r}")
        if v != sorted(v):
            raise ValueError("representatives must be sorted")
        return v

    @model_validator(mode='after')
    def validate_counts(self):
        if len(self.representatives) != self.class_count or len(self.class_sizes) != self.class_count:
            raise ValueError("one representative and one class size per class")
        if sum(self.class_sizes) != self.form_count:
            raise ValueError("class sizes must add up to the form count")
        return self


class CensusReportModel(CommandResult):
    """Census of a coefficient box, rows ascending by discriminant."""

    degree: int = Field(..., ge=1)
    height: int = Field(..., ge=0)
    flags: str
    version: str = CODE_VERSION
    rows: List[CensusRowModel] = Field(default_factory=list)
    skipped_degenerate: int = Field(default=0, ge=0)
    unknown_pairs: List[List[str]] = Field(default_factory=list)

    @field_validator('rows')
    @classmethod
    def validate_row_order(cls, v):
        keys = [int(row.discriminant) for row in v]
        if keys != sorted(keys) or len(set(keys)) != len(keys):
            raise ValueError("rows must be strictly ascending by discriminant")
        return v

    @classmethod
    def from_report(cls, report) -> "CensusReportModel":
        return cls(
            degree=report.degree,
            height=report.height,
            flags=report.flags.key(),
            version=report.version,
            rows=[
                CensusRowModel(
                    discriminant=str(row.discriminant),
                    form_count=row.form_count,
                    class_count=row.class_count,
                    representatives=row.representatives,
                    class_sizes=row.class_sizes,
                )
                for row in report.rows.values()
            ],
            skipped_degenerate=report.skipped_degenerate,
            unknown_pairs=[list(pair) for pair in report.unknown_pairs],
        )


class BoundInputsModel(CommandResult):
    """Exact bound value and the arithmetic data behind it."""

    degree: int = Field(..., ge=3)
    c: int = Field(..., ge=1)
    omega: int = Field(..., ge=0)
    tau: str
    divisor_sum: str
    bound: str

    @field_validator('tau', 'divisor_sum', 'bound')
    @classmethod
    def validate_integers(cls, v):
        return _check_integer_string(v)


class SUnitSolutionModel(BaseModel):
    """One solution of x + y = 1."""
    x: str
    y: str
    ex: Dict[str, int] = Field(default_factory=dict)
    ey: Dict[str, int] = Field(default_factory=dict)


class SUnitResultModel(CommandResult):
    """Solutions of the S-unit equation with the count check."""

    primes: List[int]
    exponent_bound: int = Field(..., ge=1)
    count: int = Field(..., ge=0)
    bound: str
    holds: bool
    solutions: List[SUnitSolutionModel] = Field(default_factory=list)
    stabilization: Optional[List[Dict[str, int]]] = None

    @model_validator(mode='after')
    def validate_count(self):
        if self.count != len(self.solutions):
            raise ValueError("count must equal the number of listed solutions")
        return self
