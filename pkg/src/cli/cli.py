"""CLI for generating and verifying Grassmannian packings."""

import argparse
import json
import logging
import sys
from pathlib import Path

from dependency_injector import providers

from src.app.config import get_settings
from src.app.containers import Container
from src.app.core.domain.exact import Dyadic, ScaledIntMatrix
from src.app.core.domain.grassmann import Packing, Subspace, coordinate_subspace, subspace_from_generator
from src.app.core.domain.models import FamilyName
from src.app.core.services.clifford import barnes_wall_endomorphism_report, make_generators, subspace_orbit
from src.app.core.services.construction import VerificationMode, check_level
from src.app.logging import configure_logging
from src.cli.export import FORMATS, build_export, render, write_export
from src.cli.reporter import Reporter
from src.cli.schema import ExportRecord
from src.shared.exceptions import GrasspackError, InvariantViolationError

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def positive_int(value: str) -> int:
    """argparse type for counts that must be at least 1."""
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return number


def create_container(args: argparse.Namespace) -> Container:
    """Container with CLI flags applied on top of environment settings."""
    settings = get_settings().model_copy(deep=True)
    if getattr(args, "threads", None) is not None:
        settings.sweep.workers = args.threads
    if getattr(args, "limit", None) is not None:
        settings.orbit.default_limit = args.limit
    container = Container()
    container.config.override(providers.Object(settings))
    return container


def histogram_for(container: Container, packing: Packing) -> dict[Dyadic, int] | None:
    """Full sweep for small packings, seed profile × N/2 for large orbit families."""
    if len(packing) < 2:
        return None
    analyzer = container.packing_analyzer()
    if len(packing) > container.config().families.full_sweep_max_members:
        profile = analyzer.seed_profile(packing.subspaces, 0)
        return analyzer.histogram_from_profile(profile, len(packing))
    return analyzer.distance_table(packing.subspaces).histogram()


def parse_seed(text: str, m: int) -> Subspace:
    """
    `coords:k` for the first k coordinate vectors, or a JSON list of integer rows.

    Raises:
        ValueError: If the text is neither form
    """
    if text.startswith("coords:"):
        k = int(text.removeprefix("coords:"))
        if not 0 < k <= m:
            raise ValueError(f"coords:{k} is outside 1..{m}")
        return coordinate_subspace(m, k)
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"seed must be coords:k or a JSON matrix, got {text!r}") from e
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) and len(r) == m for r in rows):
        raise ValueError(f"seed matrix must be a non-empty list of rows of length {m}")
    for r, row in enumerate(rows):
        for c, entry in enumerate(row):
            if isinstance(entry, bool) or not isinstance(entry, int):
                raise ValueError(f"seed entry [{r}][{c}] = {entry!r} is not an integer")
    return subspace_from_generator(ScaledIntMatrix(rows))


def emit(record: ExportRecord, args: argparse.Namespace) -> None:
    """Write the export to --out, or to stdout with the summary on stderr."""
    if args.out:
        write_export(record, Path(args.out), args.format)
        Reporter.print_export_summary(record)
    else:
        sys.stdout.write(render(record, args.format))
        Reporter.print_export_summary(record, file=sys.stderr)


def write_report(report, path: str | None) -> None:
    if path:
        Path(path).write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
        print(f"📝 Report written to {path}")


# =============================================================================
# Commands
# =============================================================================


def cmd_generate(args: argparse.Namespace, container: Container) -> int:
    check_level(args.i, container.config().max_level)
    family = FamilyName(args.family)
    packing = container.family_service().realize(family, args.i)
    record = build_export(family.value, args.i, packing, histogram_for(container, packing))
    emit(record, args)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, container: Container) -> int:
    check_level(args.i, container.config().max_level)
    family = FamilyName(args.family)
    if family is FamilyName.MAIN:
        report = container.theorem_verifier().verify_theorem(args.i, args.mode, allow_large=args.allow_large)
    else:
        report = container.family_service().check_family(family, args.i, allow_large=args.allow_large)
    Reporter.print_verification(report)
    write_report(report, args.out)
    if report.passed:
        print("\n✅ All checks passed")
        return EXIT_OK
    print("\n❌ Verification failed")
    return EXIT_FAILED


def cmd_order(args: argparse.Namespace, container: Container) -> int:
    check_level(args.i, container.config().max_level)
    report = container.group_order_service().order_report(args.i, allow_large=args.allow_large)
    Reporter.print_order(report)
    endomorphism = barnes_wall_endomorphism_report(args.i)
    Reporter.print_verification(endomorphism)
    if args.out:
        payload = {
            "order": report.model_dump(mode="json"),
            "endomorphism": endomorphism.model_dump(mode="json"),
        }
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        print(f"📝 Report written to {args.out}")
    if report.passed and endomorphism.passed:
        print("\n✅ Orders agree")
        return EXIT_OK
    print("\n❌ Order mismatch")
    return EXIT_FAILED


def cmd_orbit(args: argparse.Namespace, container: Container) -> int:
    check_level(args.i, container.config().max_level)
    m = 1 << args.i
    seed = parse_seed(args.seed, m)
    limit = args.limit or container.config().orbit.default_limit
    orbit = subspace_orbit(seed, make_generators(args.i), limit)
    record = build_export("orbit", args.i, orbit.members, histogram_for(container, orbit.members))
    emit(record, args)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace, container: Container) -> int:
    max_level = container.config().max_level
    check_level(args.i, max_level)
    check_level(args.other_i, max_level)
    comparison = container.family_service().compare_families(args.family, args.i, args.other, args.other_i)
    Reporter.print_comparison(comparison)
    if args.out:
        Path(args.out).write_text(comparison.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "verify": cmd_verify,
    "order": cmd_order,
    "orbit": cmd_orbit,
    "compare": cmd_compare,
}


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser."""
    parser = argparse.ArgumentParser(
        prog="grasspack",
        description="Build and exactly verify optimal Grassmannian packings from the real Clifford group",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Export the 70 subspaces of C_3
  grasspack generate --family main --i 3 --out c3.json

  # Exhaustive exact sweep of the 1054 subspaces in G(32,16)
  grasspack verify --family main --i 5 --exhaustive --threads 8

  # Group order by stabilizer chain and closed form
  grasspack order --i 3

  # Orbit of the span of the first two coordinate vectors in R^4
  grasspack orbit --i 2 --seed coords:2

Exit codes: 0 = all checks pass, 1 = a check failed, 2 = usage or I/O error.
GRASSPACK_MAX_LEVEL caps the accepted level (default 5).
        """,
    )
    parser.add_argument("--debug", action="store_true", help="Enable debug logging and full stack traces")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_level(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--i", type=int, required=True, help="Level i (ambient dimension m = 2^i)")

    def add_family(sub: argparse.ArgumentParser) -> None:
        sub.add_argument(
            "--family",
            choices=[f.value for f in FamilyName],
            default=FamilyName.MAIN.value,
            help="Packing family (default: main)",
        )

    def add_output(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--out", help="Output path (default: stdout)")
        sub.add_argument("--format", choices=FORMATS, default="json", help="Export format (default: json)")

    def add_threads(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--threads", type=positive_int, help="Worker processes for pairwise sweeps")

    generate = subparsers.add_parser("generate", help="Build a family and export its generator matrices")
    add_family(generate)
    add_level(generate)
    add_output(generate)
    add_threads(generate)
    generate.add_argument("--limit", type=positive_int, help="Orbit size limit")

    verify = subparsers.add_parser("verify", help="Run the verification suite for a family")
    add_family(verify)
    add_level(verify)
    add_threads(verify)
    mode = verify.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", dest="mode", action="store_const", const=VerificationMode.EXHAUSTIVE,
                      help="Check every pair exactly")
    mode.add_argument("--transitive", dest="mode", action="store_const", const=VerificationMode.TRANSITIVE,
                      help="Check distances from one member, using the transitivity certificate")
    verify.add_argument("--allow-large", action="store_true", help="Allow levels above the default verified range")
    verify.add_argument("--out", "--report", dest="out", help="Write the JSON report to this path")
    verify.add_argument("--limit", type=positive_int, help="Orbit size limit")

    order = subparsers.add_parser("order", help="Compute Clifford group orders")
    add_level(order)
    order.add_argument("--allow-large", action="store_true", help="Allow the level-5 order computation")
    order.add_argument("--out", help="Write the JSON report to this path")

    orbit = subparsers.add_parser("orbit", help="Enumerate the orbit of a seed subspace")
    add_level(orbit)
    orbit.add_argument("--seed", required=True, help="coords:k or a JSON matrix such as [[1,0,0,0]]")
    orbit.add_argument("--limit", type=positive_int, help="Orbit size limit")
    add_output(orbit)
    add_threads(orbit)

    compare = subparsers.add_parser("compare", help="Test whether two families are the same set")
    add_family(compare)
    add_level(compare)
    compare.add_argument("--other", choices=[f.value for f in FamilyName], required=True)
    compare.add_argument("--other-i", type=int, required=True)
    compare.add_argument("--out", help="Write the JSON comparison to this path")
    compare.add_argument("--limit", type=positive_int, help="Orbit size limit")

    return parser


def main(argv: list[str] | None = None) -> int:
    """Main entry point for the CLI."""
    parser = create_parser()
    args = parser.parse_args(argv)
    configure_logging(logging.DEBUG if args.debug else logging.INFO)

    try:
        container = create_container(args)
        return COMMANDS[args.command](args, container)
    except InvariantViolationError as e:
        print(f"❌ Invariant violated: {e}", file=sys.stderr)
        return EXIT_FAILED
    except (GrasspackError, ValueError, OSError) as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        if args.debug:
            import traceback
            traceback.print_exc()
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
