"""Writing and reading packing exports (JSON records and flat CSV)."""
import csv
import io
import json
import logging
from pathlib import Path

from pydantic import ValidationError

from src.app.core.domain.exact import Dyadic
from src.app.core.domain.grassmann import Packing, subspace_from_generator
from src.app.core.domain.models import HistogramBin
from src.cli.schema import (
    ExportMeta,
    ExportRecord,
    ExportSummary,
    FamilyDescriptor,
    SubspaceRecord,
    payload_digest,
)
from src.shared.exceptions import ExportFormatError, GrasspackError
from src.shared.time_utils import utc_isoformat

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv")


def build_export(
    name: str,
    level: int,
    packing: Packing,
    histogram: dict[Dyadic, int] | None = None,
) -> ExportRecord:
    """Assemble an export record; the digest covers everything but meta."""
    family = FamilyDescriptor(
        name=name,
        level=level,
        ambient_dim=packing.ambient_dim,
        dim=packing.dim,
        count=len(packing),
    )
    subspaces = [SubspaceRecord.from_matrix(s.generator) for s in packing]
    summary = ExportSummary()
    if histogram:
        summary = ExportSummary(
            min_d_squared=min(histogram),
            histogram=[HistogramBin(d_squared=d, pairs=n) for d, n in sorted(histogram.items())],
        )
    payload = {
        "family": family.model_dump(mode="json"),
        "subspaces": [s.model_dump(mode="json") for s in subspaces],
        "summary": summary.model_dump(mode="json"),
    }
    meta = ExportMeta(generated_at=utc_isoformat(), sha256=payload_digest(payload))
    return ExportRecord(meta=meta, family=family, subspaces=subspaces, summary=summary)


def render_csv(record: ExportRecord) -> str:
    """One line per generator row: subspace_index,row_index,entries…"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        ["subspace_index", "row_index"] + [f"x{k}" for k in range(record.family.ambient_dim)]
    )
    for index, subspace in enumerate(record.subspaces):
        for row_index, row in enumerate(subspace.rows):
            writer.writerow([index, row_index, *row])
    return buffer.getvalue()


def render(record: ExportRecord, fmt: str = "json") -> str:
    if fmt == "json":
        return record.model_dump_json(indent=2) + "\n"
    if fmt == "csv":
        return render_csv(record)
    raise ValueError(f"unknown export format {fmt!r}; expected one of {FORMATS}")


def write_export(record: ExportRecord, path: Path, fmt: str = "json") -> None:
    """Write the record; CSV keeps the integer rows only, not the √2 exponents."""
    path.write_text(render(record, fmt), encoding="utf-8")
    logger.info("Wrote %s export of %d subspaces to %s", fmt, record.family.count, path)


def load_export(path: Path) -> tuple[ExportRecord, Packing]:
    """
    Read a JSON export and rebuild its packing.

    Raises:
        ExportFormatError: If the file is not a valid export, its digest does
            not match, or its matrices do not form the declared packing
    """
    try:
        record = ExportRecord.model_validate(json.loads(path.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, ValidationError) as e:
        raise ExportFormatError(str(path), f"not a valid export record: {e}") from e
    if record.meta.format_version != "1":
        raise ExportFormatError(str(path), f"unsupported format version {record.meta.format_version}")
    if not record.digest_matches():
        raise ExportFormatError(str(path), "payload digest does not match meta.sha256")

    try:
        packing = Packing([subspace_from_generator(s.to_matrix()) for s in record.subspaces])
    except (GrasspackError, ValueError, TypeError) as e:
        raise ExportFormatError(str(path), f"subspaces do not form a packing: {e}") from e
    if len(packing) != record.family.count or (len(packing) and packing.ambient_dim != record.family.ambient_dim):
        raise ExportFormatError(str(path), "family descriptor does not match the subspaces")
    logger.info("Loaded %d subspaces from %s", len(packing), path)
    return record, packing
