"""
Utility functions and helpers
"""

import hashlib
import logging
import os
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from config import settings
from errors import DdgError, EntryOutOfRange, NotSquare, UnknownFixture

logger = logging.getLogger(__name__)


class FixtureResolver:
    """Resolve fixture names (or plain paths) under the fixture root."""

    KINDS = ("latin", "graphs", "hadamard", "designs", "bijections")

    @staticmethod
    def root() -> Path:
        return Path(os.getenv("DDG_FIXTURE_ROOT", settings.FIXTURE_ROOT))

    @classmethod
    def resolve(cls, kind: str, reference: Union[str, Path]) -> Path:
        """Return an existing file for a path or a fixture name of the given kind."""
        candidate = Path(reference)
        if candidate.is_file():
            return candidate
        name = str(reference)
        if re.search(r'[<>:"|?*]|\.\.', name):
            logger.warning(f"Suspicious fixture reference: {name}")
            raise UnknownFixture(f"invalid fixture reference {name!r}")
        fixture = cls.root() / kind / name
        if fixture.is_file():
            return fixture
        raise UnknownFixture(f"no {kind} fixture or file named {name!r} (looked in {fixture.parent})",
                             {"kind": kind, "name": name})

    @classmethod
    def list_fixtures(cls, kind: str) -> List[str]:
        directory = cls.root() / kind
        if not directory.is_dir():
            return []
        return sorted(p.name for p in directory.iterdir() if p.is_file() and not p.name.startswith("."))


class MatrixParser:
    """Whitespace matrix parsing for the plain-text formats."""

    @staticmethod
    def clean_lines(text: str) -> List[str]:
        """Drop comments and blank lines."""
        lines = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                lines.append(line)
        return lines

    @classmethod
    def parse_int_rows(cls, text: str) -> List[List[int]]:
        rows = []
        for line_no, line in enumerate(cls.clean_lines(text), 1):
            try:
                rows.append([int(token) for token in line.split()])
            except ValueError:
                raise EntryOutOfRange(f"line {line_no}: non-integer token in {line!r}")
        return rows

    @classmethod
    def parse_sign_rows(cls, text: str) -> np.ndarray:
        """Rows of +1/-1 tokens, or compact rows such as '++-+'."""
        signs = {"+1": 1, "1": 1, "+": 1, "-1": -1, "-": -1}
        rows = []
        for line in cls.clean_lines(text):
            tokens = line.split()
            if len(tokens) == 1 and set(tokens[0]) <= {"+", "-"}:
                tokens = list(tokens[0])
            try:
                rows.append([signs[token] for token in tokens])
            except KeyError as e:
                raise EntryOutOfRange(f"sign matrix entry {e.args[0]!r} is not +1 or -1")
        if not rows or any(len(row) != len(rows) for row in rows):
            raise NotSquare("sign matrix must be square and non-empty")
        return np.array(rows, dtype=np.int64)


def hash_content(content: Union[str, bytes]) -> str:
    """sha256 hex digest."""
    if isinstance(content, str):
        content = content.encode("utf-8")
    return hashlib.sha256(content).hexdigest()


class ReportBuilder:
    """Build the JSON-ready report dictionaries."""

    @staticmethod
    def success_report(data: Optional[Dict[str, Any]] = None, message: str = "verified") -> Dict[str, Any]:
        report = {"schema": settings.REPORT_SCHEMA, "success": True, "exit_code": 0, "message": message}
        if data:
            report.update(data)
        return report

    @staticmethod
    def error_report(error: DdgError, data: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        report = {"schema": settings.REPORT_SCHEMA, "success": False, "exit_code": error.exit_code,
                  "message": error.message, "error": error.to_dict()}
        if data:
            report.update(data)
        return report


# Global instances
report_builder = ReportBuilder()
