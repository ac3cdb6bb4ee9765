"""Tests for the grasspack command line."""
import json

import pytest

from src.cli.cli import EXIT_OK, EXIT_USAGE, create_container, create_parser, main, parse_seed
from src.cli.export import load_export


class TestParser:
    """Tests for argument parsing."""

    def test_verify_mode_flags(self):
        """Test that --exhaustive and --transitive are mutually exclusive."""
        parser = create_parser()

        assert parser.parse_args(["verify", "--i", "3"]).mode is None
        assert parser.parse_args(["verify", "--i", "3", "--transitive"]).mode == "transitive"
        with pytest.raises(SystemExit):
            parser.parse_args(["verify", "--i", "3", "--exhaustive", "--transitive"])

    def test_parse_seed(self):
        """Test both seed forms."""
        assert parse_seed("coords:2", 4).dim == 2
        assert parse_seed("[[1, 1, 0, 0]]", 4).dim == 1
        with pytest.raises(ValueError):
            parse_seed("coords:5", 4)
        with pytest.raises(ValueError):
            parse_seed("[[1, 1]]", 4)

    @pytest.mark.parametrize("seed", ["[[0.5, 0, 0, 0]]", "[[1, \"1\", 0, 0]]", "[[true, 0, 0, 0]]"])
    def test_parse_seed_rejects_non_integer_entries(self, seed):
        """Test that a seed entry which is not an integer names its position."""
        with pytest.raises(ValueError, match=r"\[0\]"):
            parse_seed(seed, 4)

    @pytest.mark.parametrize("flag", ["--threads", "--limit"])
    @pytest.mark.parametrize("value", ["0", "-3"])
    def test_non_positive_counts_are_rejected(self, flag, value):
        """Test that --threads and --limit must be at least 1."""
        parser = create_parser()

        with pytest.raises(SystemExit) as exc_info:
            parser.parse_args(["orbit", "--i", "2", "--seed", "coords:1", flag, value])

        assert exc_info.value.code == EXIT_USAGE

    def test_positive_count_reaches_the_settings(self):
        """Test that --threads and --limit override the configured values."""
        args = create_parser().parse_args(["orbit", "--i", "2", "--seed", "coords:1", "--threads", "3", "--limit", "7"])

        settings = create_container(args).config()

        assert settings.sweep.workers == 3
        assert settings.orbit.default_limit == 7


class TestCommands:
    """End-to-end runs of each command."""

    def test_generate_writes_a_loadable_export(self, tmp_path, capsys):
        """Test generate --out followed by load_export."""
        # Arrange
        path = tmp_path / "c3.json"

        # Act
        code = main(["generate", "--family", "main", "--i", "3", "--out", str(path)])

        # Assert
        record, packing = load_export(path)
        assert code == EXIT_OK
        assert len(packing) == record.family.count == 70
        assert record.summary.min_d_squared == 2

    def test_generate_to_stdout_is_deterministic(self, capsys):
        """Test that two runs print the same digest and payload."""
        main(["generate", "--i", "2"])
        first = json.loads(capsys.readouterr().out)
        main(["generate", "--i", "2"])
        second = json.loads(capsys.readouterr().out)

        assert first["meta"]["sha256"] == second["meta"]["sha256"]
        assert first["subspaces"] == second["subspaces"]

    def test_generate_csv(self, capsys):
        """Test the flat CSV export on stdout."""
        code = main(["generate", "--i", "1", "--format", "csv"])

        out = capsys.readouterr().out.splitlines()
        assert code == EXIT_OK
        assert out[0] == "subspace_index,row_index,x0,x1"
        assert len(out) == 5

    def test_verify_passes(self, tmp_path, capsys):
        """Test verify exit code and JSON report."""
        # Arrange
        report_path = tmp_path / "report.json"

        # Act
        code = main(["verify", "--i", "2", "--report", str(report_path)])

        # Assert
        report = json.loads(report_path.read_text(encoding="utf-8"))
        assert code == EXIT_OK
        assert report["passed"] is True
        assert report["status"] == "proved"
        assert "All checks passed" in capsys.readouterr().out

    def test_verify_orbit_family(self, capsys):
        """Test that non-main families go through the family checks."""
        assert main(["verify", "--family", "lines", "--i", "2"]) == EXIT_OK

    def test_order(self, tmp_path, capsys):
        """Test the order command at level 2."""
        path = tmp_path / "order.json"

        code = main(["order", "--i", "2", "--out", str(path)])

        payload = json.loads(path.read_text(encoding="utf-8"))
        assert code == EXIT_OK
        assert payload["order"]["chain_g_order"] == 2304
        assert payload["endomorphism"]["passed"] is True

    def test_orbit_of_coordinate_plane(self, capsys):
        """Test that the orbit of span(e₁, e₂) in R^4 has 18 members."""
        code = main(["orbit", "--i", "2", "--seed", "coords:2"])

        record = json.loads(capsys.readouterr().out)
        assert code == EXIT_OK
        assert record["family"]["count"] == 18

    def test_compare(self, capsys):
        """Test the compare command."""
        code = main(["compare", "--family", "planes2", "--i", "2", "--other", "main", "--other-i", "2"])

        assert code == EXIT_OK
        assert "same" in capsys.readouterr().out.lower()

    @pytest.mark.parametrize("argv", [["generate", "--i", "0"], ["verify", "--i", "9"]])
    def test_invalid_level_is_a_usage_error(self, argv, capsys):
        """Test that out-of-range levels exit with code 2."""
        assert main(argv) == EXIT_USAGE
        assert "invalid level" in capsys.readouterr().err

    def test_missing_file_is_a_usage_error(self, tmp_path, capsys):
        """Test that an unwritable output path exits with code 2."""
        code = main(["generate", "--i", "1", "--out", str(tmp_path / "missing" / "c1.json")])

        assert code == EXIT_USAGE

    def test_fractional_seed_is_a_usage_error(self, capsys):
        """Test that a seed matrix with a fractional entry exits with code 2."""
        code = main(["orbit", "--i", "2", "--seed", "[[0.5, 0, 0, 0]]"])

        assert code == EXIT_USAGE
        assert "not an integer" in capsys.readouterr().err
