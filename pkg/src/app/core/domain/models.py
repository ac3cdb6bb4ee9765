"""Report models shared by the verification services and the CLI."""
from enum import StrEnum
from fractions import Fraction
from typing import Annotated, Any

from pydantic import BaseModel, Field, PlainSerializer, PlainValidator, WithJsonSchema, computed_field


def format_fraction(value: Fraction) -> str:
    """Render an exact rational as "p/q", or "p" for integers."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(value: Any) -> Fraction:
    """Accept Fraction, int, Dyadic-like values (to_fraction) and "p/q" strings."""
    if isinstance(value, bool):
        raise ValueError("booleans are not exact rationals")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if hasattr(value, "to_fraction"):
        return value.to_fraction()
    if isinstance(value, str):
        try:
            numerator, _, denominator = value.strip().partition("/")
            return Fraction(int(numerator), int(denominator) if denominator else 1)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"not an exact fraction string: {value!r}") from e
    raise ValueError(f"cannot interpret {value!r} as an exact rational")


ExactFraction = Annotated[
    Fraction,
    PlainValidator(parse_fraction),
    PlainSerializer(format_fraction, return_type=str),
    WithJsonSchema({"type": "string", "pattern": r"^-?\d+(/\d+)?$"}),
]


class FamilyName(StrEnum):
    """Packing families the toolkit can build."""
    MAIN = "main"
    LINES = "lines"
    PLANES2 = "planes2"
    QUARTER = "quarter"


class ClaimStatus(StrEnum):
    """Whether a family's count and distance are established or only observed."""
    PROVED = "proved"
    CONJECTURED = "conjectured"


class CheckResult(BaseModel):
    """One named pass/fail check with the values it compared."""
    name: str = Field(..., description="Short identifier of the check")
    passed: bool
    expected: str | None = None
    observed: str | None = None
    detail: str | None = None


class HistogramBin(BaseModel):
    """Number of unordered pairs at one exact squared distance."""
    d_squared: ExactFraction
    pairs: int = Field(..., ge=0)


class BoundApplicability(BaseModel):
    """Whether the orthoplex bound applies to N subspaces and can be attained."""
    applicable: bool = Field(..., description="N > m(m+1)/2")
    equality_possible: bool = Field(..., description="N <= (m-1)(m+2)")

    model_config = {"frozen": True}


class BoundComparison(BaseModel):
    """Observed minimum squared distance against the orthoplex bound."""
    rankin_bound: ExactFraction
    min_d_squared: ExactFraction
    meets_bound: bool
    gap: ExactFraction = Field(..., description="rankin_bound - min_d_squared")
    applicable: bool
    equality_possible: bool


class OffendingPair(BaseModel):
    """A pair of members that violated a check, with their generators."""
    first_index: int
    second_index: int
    d_squared: ExactFraction | None = None
    reason: str
    first_generator: list[list[int]]
    first_sqrt2_exponent: int
    second_generator: list[list[int]]
    second_sqrt2_exponent: int


class FamilyClaim(BaseModel):
    """Closed-form prediction for an orbit family at one level."""
    name: FamilyName
    level: int = Field(..., ge=1)
    ambient_dim: int
    dim: int
    predicted_count: int
    predicted_min_d_squared: ExactFraction
    claim_status: ClaimStatus
    gated: bool = Field(default=True, description="Whether this level counts toward pass/fail")

    model_config = {"frozen": True}


class CheckedReport(BaseModel):
    """Base for reports that pass iff every recorded check passed."""
    checks: list[CheckResult] = Field(default_factory=list)

    @computed_field
    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add_check(
        self,
        name: str,
        passed: bool,
        expected: Any = None,
        observed: Any = None,
        detail: str | None = None,
    ) -> CheckResult:
        check = CheckResult(
            name=name,
            passed=bool(passed),
            expected=None if expected is None else str(expected),
            observed=None if observed is None else str(observed),
            detail=detail,
        )
        self.checks.append(check)
        return check


class VerificationReport(CheckedReport):
    """Structured record of a verification run."""
    subject: str
    level: int | None = None
    ambient_dim: int | None = None
    dim: int | None = None
    count: int = 0
    min_d_squared: ExactFraction | None = None
    histogram: list[HistogramBin] = Field(default_factory=list)
    bound: BoundComparison | None = None
    status: str | None = None
    offending_pairs: list[OffendingPair] = Field(default_factory=list)
    details: dict[str, Any] = Field(default_factory=dict)
    certificate: list[list[int]] | None = Field(
        default=None, description="Generator word reaching each member from the seed"
    )

    def histogram_dict(self) -> dict[Fraction, int]:
        return {b.d_squared: b.pairs for b in self.histogram}


class OrderReport(CheckedReport):
    """Group orders from the closed form, the stabilizer chain and brute force."""
    level: int
    formula_h_order: int
    formula_g_order: int
    chain_g_order: int | None = None
    chain_h_order: int | None = None
    brute_force_g_order: int | None = None
    degree: int | None = None

    @computed_field
    @property
    def index(self) -> int | None:
        if self.chain_g_order is None or not self.chain_h_order:
            return None
        return self.chain_g_order // self.chain_h_order


class FamilyComparison(BaseModel):
    """Set comparison of two realized families, by projector."""
    first: str
    second: str
    first_count: int
    second_count: int
    shared_count: int
    same_set: bool
