"""
Command-line surface for building and verifying Grassmannian packings.

Usage:
   ```bash
   python -m src.cli generate --family main --i 3 --out c3.json
   python -m src.cli verify --family main --i 5 --exhaustive
   python -m src.cli order --i 3
   python -m src.cli orbit --i 2 --seed coords:2
   ```
"""

from src.cli.export import build_export, load_export, write_export
from src.cli.reporter import Reporter
from src.cli.schema import ExportMeta, ExportRecord, ExportSummary, FamilyDescriptor, SubspaceRecord

__all__ = [
    # Schema
    "ExportMeta",
    "ExportRecord",
    "ExportSummary",
    "FamilyDescriptor",
    "SubspaceRecord",
    # Export
    "build_export",
    "load_export",
    "write_export",
    # Reporter
    "Reporter",
]
