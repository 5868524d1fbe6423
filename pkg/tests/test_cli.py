"""
Integration tests for the command-line interface
"""

import json
import os
from pathlib import Path

import pytest

from cli import build_parser, load_graphs, main
from errors import SpecError
from graph import fixture_graph
from graph6 import write_graph6


def run(temp_dir, *argv):
    """Run the CLI with a report file and return (exit code, report)."""
    report_path = os.path.join(temp_dir, "report.json")
    command, rest = argv[0], list(argv[1:])
    code = main([command, "--report", report_path, *rest])
    with open(report_path) as handle:
        return code, json.load(handle)


@pytest.mark.integration
class TestConstructCommand:
    """Test cases for the construct subcommand."""

    def test_construction1(self, temp_dir):
        """Test a full build with graph output, ranks and automorphisms."""
        out = os.path.join(temp_dir, "c1.g6")
        code, report = run(temp_dir, "construct", "--construction", "1", "--q", "2", "--d", "2",
                           "--latin", "c3", "--out", out, "--prank", "2", "--aut")
        assert code == 0
        assert report["success"] is True
        assert report["command"] == "construct"
        assert report["params"]["ddg"] == [12, 6, 2, 3, 3, 4]
        assert report["aut_order"] == 48
        assert "2" in report["p_ranks"]
        assert len(report["graph_sha256"]) == 64
        assert Path(out).read_bytes().startswith(b"K")
        assert report["spectrum"]["resolved"] is True

    def test_construction2_from_spec_file(self, temp_dir):
        """Test an INI spec for Construction 2."""
        spec = os.path.join(temp_dir, "c2.ini")
        Path(spec).write_text("[construction]\nwhich = 2\nq = 3\nd = 2\nlatin = c4\nh = 1\nmask = 000\n")
        code, report = run(temp_dir, "construct", "--spec", spec)
        assert code == 0
        assert report["params"]["ddg"] == [27, 18, 9, 12, 9, 3]
        assert report["spec"]["h"] == 1

    def test_construction4_srg(self, temp_dir):
        """Test the SRG block of a Construction 4 report."""
        code, report = run(temp_dir, "construct", "--construction", "4", "--q", "2", "--d", "2",
                           "--latin", "klein")
        assert code == 0
        assert report["params"]["srg"] == [16, 10, 6, 6]
        assert report["expected"]["srg"] == [16, 10, 6, 6]

    def test_missing_arguments(self, temp_dir):
        """Test exit code 2 without a spec."""
        code, report = run(temp_dir, "construct", "--construction", "1", "--q", "2")
        assert code == 2
        assert report["error"]["error"] == "SpecError"

    def test_diagonal_violation(self, temp_dir):
        """Test bad input squares give exit code 2."""
        code, report = run(temp_dir, "construct", "--construction", "4", "--q", "2", "--d", "2",
                           "--latin", "c4_shifted")
        assert code == 2
        assert report["error"]["error"] == "DiagonalViolation"
        assert report["success"] is False


@pytest.mark.integration
class TestVerifyCommands:
    """Test cases for verify, spectrum and prank."""

    def test_verify_ddg_file(self, temp_dir):
        """Test certification of a graph6 file."""
        path = os.path.join(temp_dir, "octa.g6")
        write_graph6(path, [fixture_graph("octahedron_line").adjacency])
        code, report = run(temp_dir, "verify", path)
        assert code == 0
        assert report["params"]["ddg"] == [12, 6, 2, 3, 3, 4]

    def test_verify_petersen_fails(self, temp_dir):
        """Test a certification failure gives exit code 3."""
        code, report = run(temp_dir, "verify", "petersen")
        assert code == 3
        assert report["error"]["error"] == "NoPartition"

    def test_verify_srg_and_drg(self, temp_dir):
        """Test the SRG and distance-regular modes."""
        code, report = run(temp_dir, "verify", "clebsch", "--srg")
        assert code == 0
        assert report["params"]["srg"] == [16, 5, 0, 2]
        code, report = run(temp_dir, "verify", "petersen", "--drg")
        assert report["params"]["intersection_array"] == "{3,2;1,1}"

    def test_spectrum_table(self, temp_dir):
        """Test the spectrum command writes its table."""
        table = os.path.join(temp_dir, "spectrum.csv")
        code, report = run(temp_dir, "spectrum", "octahedron_line", "--table", table)
        assert code == 0
        assert report["message"] == "spectrum {6^1, 2^3, 0^2, -2^6}"
        assert os.path.exists(table)

    def test_prank(self, temp_dir):
        """Test several primes."""
        code, report = run(temp_dir, "prank", "petersen", "--p", "2", "--p", "3")
        assert code == 0
        assert set(report["p_ranks"]) == {"2", "3"}

    def test_prank_not_prime(self, temp_dir):
        """Test a composite modulus."""
        code, report = run(temp_dir, "prank", "petersen", "--p", "4")
        assert code == 2
        assert report["error"]["error"] == "NotPrime"

    def test_unexpected_error(self, temp_dir, mocker):
        """Test internal failures give exit code 1."""
        mocker.patch("cli.certify_spectrum", side_effect=RuntimeError("boom"))
        code, report = run(temp_dir, "spectrum", "octahedron_line")
        assert code == 1
        assert report["message"] == "internal error: boom"


@pytest.mark.integration
class TestOtherCommands:
    """Test cases for classify, hadamard and latin."""

    def test_classify(self, temp_dir):
        """Test two non-isomorphic SRGs with the same parameters."""
        table = os.path.join(temp_dir, "classes.json")
        code, report = run(temp_dir, "classify", "rook_4x4", "shrikhande", "rook_4x4", "--table", table)
        assert code == 0
        assert report["class_count"] == 2
        assert report["classes"][0]["members"] == [0, 2]
        with open(table) as handle:
            assert len(json.load(handle)) == 2

    def test_hadamard_round_trip(self, temp_dir):
        """Test SRG to Hadamard matrix and back."""
        matrix = os.path.join(temp_dir, "h16.txt")
        graph = os.path.join(temp_dir, "srg.g6")
        code, report = run(temp_dir, "hadamard", "--from-srg", "rook_4x4", "--out", matrix)
        assert code == 0
        assert report["sign"] == "-"
        assert report["graphical"] and report["regular"]
        code, report = run(temp_dir, "hadamard", "--to-srg", matrix, "--sign", "-", "--out", graph)
        assert code == 0
        assert report["srg"] == [16, 6, 2, 2]
        assert load_graphs(graph)[0] == fixture_graph("rook_4x4")

    def test_hadamard_needs_sign(self, temp_dir):
        """Test --to-srg without --sign."""
        matrix = os.path.join(temp_dir, "h16.txt")
        run(temp_dir, "hadamard", "--from-srg", "rook_4x4", "--out", matrix)
        code, _ = run(temp_dir, "hadamard", "--to-srg", matrix)
        assert code == 2

    def test_latin_enumerate(self, temp_dir):
        """Test enumeration writes one file per class."""
        out_dir = os.path.join(temp_dir, "squares")
        code, report = run(temp_dir, "latin", "--enumerate", "4", "--out-dir", out_dir)
        assert code == 0
        assert report["classes"] == 2
        assert sorted(os.listdir(out_dir)) == ["sym4_1", "sym4_2"]

    def test_latin_check(self, temp_dir, fixture_root):
        """Test checking a fixture square."""
        code, report = run(temp_dir, "latin", "--check", str(fixture_root / "latin" / "c4_shifted"))
        assert code == 0
        assert report["latin"] and report["symmetric"]
        assert report["reduced"] is False


class TestParser:
    """Test cases for argument parsing."""

    def test_stdout_report(self, capsys):
        """Test the report goes to stdout without --report."""
        assert main(["verify", "clebsch", "--srg"]) == 0
        assert json.loads(capsys.readouterr().out)["success"] is True

    def test_subcommand_required(self):
        """Test argparse rejects a missing subcommand."""
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_load_graphs_unknown(self):
        """Test unknown graph references."""
        with pytest.raises(SpecError):
            load_graphs("no_such_graph")
