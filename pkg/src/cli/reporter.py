"""Human-readable rendering of verification and order reports."""
from typing import TextIO

from src.app.core.domain.models import CheckedReport, FamilyComparison, OrderReport, VerificationReport
from src.cli.schema import ExportRecord


class Reporter:
    """Handles formatting and printing of reports."""

    @staticmethod
    def print_verification(report: VerificationReport, file: TextIO | None = None) -> None:
        """
        Print a verification report with its histogram and checks.

        Args:
            report: Report from verify_theorem, check_family or verify_transitivity
            file: Destination stream (default: the current stdout)
        """
        print(f"\n{'=' * 80}", file=file)
        title = report.subject.upper() if report.level is None else f"{report.subject.upper()} AT LEVEL {report.level}"
        print(title, file=file)
        print(f"{'=' * 80}", file=file)
        print(f"G({report.ambient_dim},{report.dim}), N = {report.count}", file=file)
        if report.min_d_squared is not None:
            print(f"Minimum squared distance: {report.min_d_squared}", file=file)
        if report.bound is not None:
            met = "met" if report.bound.meets_bound else f"gap {report.bound.gap}"
            print(f"Orthoplex bound: {report.bound.rankin_bound} ({met})", file=file)
        if report.histogram:
            Reporter._print_histogram(report, file)
        Reporter._print_checks(report, file)
        if report.offending_pairs:
            print("\n⚠️  OFFENDING PAIRS", file=file)
            for pair in report.offending_pairs:
                print(f"  • ({pair.first_index}, {pair.second_index}) d² = {pair.d_squared}: {pair.reason}", file=file)
        if report.status:
            print(f"\nStatus: {report.status}", file=file)

    @staticmethod
    def _print_histogram(report: VerificationReport, file: TextIO | None) -> None:
        print("\n📊 DISTANCE HISTOGRAM", file=file)
        header = f"{'d²':>12} | {'pairs':>12}"
        print(header, file=file)
        print("-" * len(header), file=file)
        for bin_ in report.histogram:
            print(f"{str(bin_.d_squared):>12} | {bin_.pairs:>12}", file=file)

    @staticmethod
    def _print_checks(report: CheckedReport, file: TextIO | None) -> None:
        print("\n🔎 CHECKS", file=file)
        for check in report.checks:
            mark = "✅" if check.passed else "❌"
            values = ""
            if check.expected is not None or check.observed is not None:
                values = f" (expected {check.expected}, observed {check.observed})"
            print(f"  {mark} {check.name}{values}", file=file)
            if check.detail:
                print(f"      {check.detail}", file=file)

    @staticmethod
    def print_order(report: OrderReport, file: TextIO | None = None) -> None:
        print(f"\n{'=' * 80}", file=file)
        print(f"CLIFFORD GROUP ORDER AT LEVEL {report.level}", file=file)
        print(f"{'=' * 80}", file=file)
        print(f"|H_{report.level}| closed form:     {report.formula_h_order}", file=file)
        print(f"|G_{report.level}| closed form:     {report.formula_g_order}", file=file)
        print(f"|G_{report.level}| stabilizer chain: {report.chain_g_order}", file=file)
        if report.chain_h_order is not None:
            print(f"|H_{report.level}| stabilizer chain: {report.chain_h_order}", file=file)
        if report.brute_force_g_order is not None:
            print(f"|G_{report.level}| brute force:      {report.brute_force_g_order}", file=file)
        print(f"Permutation degree: {report.degree}", file=file)
        Reporter._print_checks(report, file)

    @staticmethod
    def print_export_summary(record: ExportRecord, file: TextIO | None = None) -> None:
        family = record.family
        print(
            f"📦 {family.name} at level {family.level}: {family.count} subspaces in G({family.ambient_dim},{family.dim})",
            file=file,
        )
        if record.summary.min_d_squared is not None:
            print(f"   Minimum squared distance: {record.summary.min_d_squared}", file=file)
        print(f"   sha256: {record.meta.sha256}", file=file)

    @staticmethod
    def print_comparison(comparison: FamilyComparison, file: TextIO | None = None) -> None:
        verdict = "the same set" if comparison.same_set else "different sets"
        print(f"🔁 {comparison.first} ({comparison.first_count}) vs {comparison.second} "
              f"({comparison.second_count}): {comparison.shared_count} shared, {verdict}", file=file)
