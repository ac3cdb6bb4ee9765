"""Data models for packing exports."""
import hashlib
import json

from pydantic import BaseModel, Field

from src.app.core.domain.exact import ScaledIntMatrix
from src.app.core.domain.models import ExactFraction, HistogramBin

FORMAT_VERSION = "1"


class FamilyDescriptor(BaseModel):
    """Which packing an export holds."""

    name: str = Field(..., description="main, lines, planes2, quarter or orbit")
    level: int = Field(..., ge=1)
    ambient_dim: int = Field(..., ge=1)
    dim: int = Field(..., ge=0)
    count: int = Field(..., ge=0)


class SubspaceRecord(BaseModel):
    """One generator matrix: rows / √2^sqrt2_exponent."""

    rows: list[list[int]]
    sqrt2_exponent: int = Field(default=0, ge=0)

    @classmethod
    def from_matrix(cls, matrix: ScaledIntMatrix) -> "SubspaceRecord":
        return cls(rows=matrix.integer_rows(), sqrt2_exponent=matrix.sqrt2_exponent)

    def to_matrix(self) -> ScaledIntMatrix:
        return ScaledIntMatrix(self.rows, self.sqrt2_exponent)


class ExportSummary(BaseModel):
    """Exact distance statistics of the exported packing."""

    min_d_squared: ExactFraction | None = None
    histogram: list[HistogramBin] = Field(default_factory=list)


class ExportMeta(BaseModel):
    """Everything outside the hashed payload."""

    format_version: str = FORMAT_VERSION
    generated_at: str
    sha256: str = Field(..., description="Digest of the canonical family/subspaces/summary payload")


class ExportRecord(BaseModel):
    """A packing with its summary, as written by generate and orbit."""

    meta: ExportMeta
    family: FamilyDescriptor
    subspaces: list[SubspaceRecord]
    summary: ExportSummary

    def payload(self) -> dict:
        return self.model_dump(mode="json", include={"family", "subspaces", "summary"})

    def canonical_payload(self) -> str:
        return canonical_json(self.payload())

    def digest_matches(self) -> bool:
        return self.meta.sha256 == payload_digest(self.payload())


def canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def payload_digest(payload: dict) -> str:
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()
