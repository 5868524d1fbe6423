"""
Tests for construction specs and reports
"""

import os
from pathlib import Path

import pytest
from pydantic import ValidationError

from errors import SpecError
from models import ConstructionSpec, DesignSource, Report, parse_numbering_file

INI = """\
[construction]
which = 2
q = 3
d = 2
latin = c4   ; cyclic group of order 4
h = 1
mask = 0,0,1

[designs]
1 = file:design1.txt
2 = ag

[numbering]
0 = 2 1 3 4
"""


class TestDesignSource:
    """Test cases for design source parsing."""

    def test_parse_forms(self):
        """Test the three source kinds."""
        assert DesignSource.parse("ag") == DesignSource()
        source = DesignSource.parse("hadamard: h8.txt")
        assert (source.kind, source.path) == ("hadamard", "h8.txt")

    def test_path_required(self):
        """Test file sources need a path."""
        with pytest.raises(ValidationError):
            DesignSource.parse("file:")

    def test_unknown_kind(self):
        """Test unknown source kinds."""
        with pytest.raises(ValidationError):
            DesignSource(kind="projective")


class TestConstructionSpec:
    """Test cases for ConstructionSpec validation."""

    def test_valid_spec(self):
        """Test a minimal Construction 1 spec."""
        spec = ConstructionSpec.build(which=1, q=2, d=2, latin="c3")
        assert spec.classes == 3
        assert spec.design_count == 3
        echo = spec.echo()
        assert echo["latin"] == "c3"
        assert "h" not in echo

    @pytest.mark.parametrize("which,count", [(1, 4), (2, 3), (3, 5), (4, 5)])
    def test_design_count(self, which, count):
        """Test the number of point sets per construction at q=3, d=2."""
        extra = {"h": 1, "mask": "000"} if which == 2 else {}
        assert ConstructionSpec.build(which=which, q=3, d=2, latin="c4", **extra).design_count == count

    def test_mask_normalised(self):
        """Test commas and spaces are dropped from masks."""
        spec = ConstructionSpec.build(which=2, q=2, d=2, latin="c3", h=2, mask="0, 1")
        assert spec.mask == "01"

    @pytest.mark.parametrize("fields", [
        {"which": 5, "q": 2, "d": 2, "latin": "c3"},
        {"which": 1, "q": 1, "d": 2, "latin": "c3"},
        {"which": 2, "q": 2, "d": 2, "latin": "c3"},
        {"which": 1, "q": 2, "d": 2, "latin": "c3", "h": 1},
        {"which": 2, "q": 2, "d": 2, "latin": "c3", "h": 0, "mask": "00"},
        {"which": 2, "q": 2, "d": 2, "latin": "c3", "h": 1, "mask": "02"},
        {"which": 1, "q": 2, "d": 2, "latin": "c3", "numbering": {0: [1, 1, 2]}},
    ])
    def test_invalid_specs(self, fields):
        """Test validation failures surface as SpecError."""
        with pytest.raises(SpecError) as excinfo:
            ConstructionSpec.build(**fields)
        assert excinfo.value.exit_code == 2


class TestIniFiles:
    """Test cases for INI spec files."""

    def test_from_ini(self, temp_dir):
        """Test every section of a spec file."""
        path = os.path.join(temp_dir, "run.ini")
        Path(path).write_text(INI)
        spec = ConstructionSpec.from_ini(path)
        assert (spec.which, spec.q, spec.d, spec.h, spec.mask) == (2, 3, 2, 1, "001")
        assert spec.latin == "c4"
        assert spec.designs[1].path == str(Path(temp_dir) / "design1.txt")
        assert spec.designs[2].kind == "ag"
        assert spec.numbering == {0: [2, 1, 3, 4]}

    def test_missing_section(self, temp_dir):
        """Test a file without [construction]."""
        path = os.path.join(temp_dir, "run.ini")
        Path(path).write_text("[designs]\n0 = ag\n")
        with pytest.raises(SpecError):
            ConstructionSpec.from_ini(path)

    def test_missing_file(self, temp_dir):
        """Test an unreadable path."""
        with pytest.raises(SpecError):
            ConstructionSpec.from_ini(os.path.join(temp_dir, "absent.ini"))

    def test_bad_design_index(self, temp_dir):
        """Test non-integer design keys."""
        path = os.path.join(temp_dir, "run.ini")
        Path(path).write_text("[construction]\nwhich = 1\nq = 2\nd = 2\nlatin = c3\n[designs]\nfirst = ag\n")
        with pytest.raises(SpecError):
            ConstructionSpec.from_ini(path)

    def test_numbering_file(self, temp_dir):
        """Test the numbering file format."""
        path = os.path.join(temp_dir, "numbering.txt")
        Path(path).write_text("# design : order\n0 : 3 1 2\n2 : 1 3 2\n")
        assert parse_numbering_file(path) == {0: [3, 1, 2], 2: [1, 3, 2]}

    def test_numbering_file_error(self, temp_dir):
        """Test a line without a colon."""
        path = os.path.join(temp_dir, "numbering.txt")
        Path(path).write_text("0 3 1 2\n")
        with pytest.raises(SpecError):
            parse_numbering_file(path)


class TestReport:
    """Test cases for the report model."""

    def test_success(self):
        """Test the serialised form uses the schema alias."""
        report = Report(success=True, exit_code=0, command="verify", graphs=[{"vertices": 4}])
        payload = report.to_json_dict()
        assert payload["schema"] == 1
        assert payload["graphs"] == [{"vertices": 4}]
        assert "error" not in payload

    def test_inconsistent_exit_code(self):
        """Test success must agree with the exit code."""
        with pytest.raises(ValidationError):
            Report(success=True, exit_code=3)

    def test_unknown_exit_code(self):
        """Test exit codes outside 0..3."""
        with pytest.raises(ValidationError):
            Report(success=False, exit_code=7)

    def test_validate_by_alias(self):
        """Test reports built as dictionaries."""
        report = Report.model_validate({"schema": 1, "success": False, "exit_code": 2, "message": "bad"})
        assert report.schema_version == 1
        assert report.to_json_dict()["message"] == "bad"
