"""
Pydantic models for construction specs and reports
"""

import configparser
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from errors import SpecError


class DesignSource(BaseModel):
    """Where one point set's affine design comes from."""
    kind: str = "ag"
    path: Optional[str] = None

    @field_validator('kind')
    @classmethod
    def validate_kind(cls, v):
        if v not in ('ag', 'hadamard', 'file'):
            raise ValueError('Design source must be ag, hadamard:<path> or file:<path>')
        return v

    @model_validator(mode='after')
    def check_path(self):
        if self.kind != 'ag' and not self.path:
            raise ValueError(f'{self.kind} design source needs a path')
        return self

    @classmethod
    def parse(cls, text: str) -> "DesignSource":
        kind, _, path = text.strip().partition(":")
        return cls(kind=kind.strip(), path=path.strip() or None)


class ConstructionSpec(BaseModel):
    """One construction run: which construction, field, square and optional overrides."""
    which: int
    q: int
    d: int
    latin: str
    h: Optional[int] = None
    mask: Optional[str] = None
    seed: Optional[int] = None
    designs: Dict[int, DesignSource] = Field(default_factory=dict)
    numbering: Dict[int, List[int]] = Field(default_factory=dict)
    bijections: Optional[str] = None

    @field_validator('which')
    @classmethod
    def validate_which(cls, v):
        if v not in (1, 2, 3, 4):
            raise ValueError('Construction must be 1, 2, 3 or 4')
        return v

    @field_validator('q', 'd')
    @classmethod
    def validate_size(cls, v):
        if v < 2:
            raise ValueError('q and d must be at least 2')
        return v

    @field_validator('h')
    @classmethod
    def validate_h(cls, v):
        if v is not None and v < 1:
            raise ValueError('h is 1-based')
        return v

    @field_validator('mask')
    @classmethod
    def validate_mask(cls, v):
        if v is not None:
            v = v.replace(",", "").replace(" ", "")
            if not re.fullmatch(r'[01]*', v):
                raise ValueError('Mask may only contain 0 and 1')
        return v

    @field_validator('numbering')
    @classmethod
    def validate_numbering(cls, v):
        for index, order in v.items():
            if sorted(order) != list(range(1, len(order) + 1)):
                raise ValueError(f'Numbering for design {index} must be a permutation of 1..{len(order)}')
        return v

    @model_validator(mode='after')
    def check_construction2(self):
        if self.which == 2 and (self.h is None or self.mask is None):
            raise ValueError('Construction 2 needs h and mask')
        if self.which != 2 and (self.h is not None or self.mask is not None):
            raise ValueError('h and mask apply to construction 2 only')
        return self

    @property
    def classes(self) -> int:
        return (self.q ** self.d - 1) // (self.q - 1)

    @property
    def design_count(self) -> int:
        m = self.classes
        return {1: m, 2: m - 1, 3: m + 1, 4: m + 1}[self.which]

    def echo(self) -> Dict[str, Any]:
        """The spec as it appears in a report."""
        return self.model_dump(mode='json', exclude_none=True)

    @classmethod
    def build(cls, **fields) -> "ConstructionSpec":
        """Validate, turning pydantic errors into SpecError."""
        try:
            return cls(**fields)
        except ValidationError as e:
            messages = "; ".join(f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors())
            raise SpecError(f"invalid construction spec: {messages}")

    @classmethod
    def from_ini(cls, path: Union[str, Path]) -> "ConstructionSpec":
        parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        try:
            with open(path, "r") as handle:
                parser.read_file(handle)
        except (OSError, configparser.Error) as e:
            raise SpecError(f"cannot read spec file {path}: {e}")
        if not parser.has_section("construction"):
            raise SpecError(f"{path}: missing [construction] section")

        section = parser["construction"]
        fields: Dict[str, Any] = {key: section[key] for key in section}
        base = Path(path).parent
        try:
            fields.update(cls._ini_extras(parser, base))
            return cls.build(**fields)
        except ValueError as e:
            raise SpecError(f"{path}: {e}")

    @staticmethod
    def _ini_extras(parser: configparser.ConfigParser, base: Path) -> Dict[str, Any]:
        fields: Dict[str, Any] = {}
        if parser.has_section("designs"):
            fields["designs"] = {int(k): DesignSource.parse(v) for k, v in parser["designs"].items()}
            for source in fields["designs"].values():
                if source.path and not Path(source.path).is_absolute():
                    source.path = str(base / source.path)
        if parser.has_section("numbering"):
            fields["numbering"] = {int(k): [int(x) for x in v.split()] for k, v in parser["numbering"].items()}
        if parser.has_section("bijections") and "path" in parser["bijections"]:
            bijections = Path(parser["bijections"]["path"])
            fields["bijections"] = str(bijections if bijections.is_absolute() else base / bijections)
        return fields


def parse_numbering_file(path: Union[str, Path]) -> Dict[int, List[int]]:
    """Lines 'i : c1 c2 ... cm' with i the 0-based design index and c a 1-based class order."""
    numbering = {}
    for line_no, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        index, sep, order = line.partition(":")
        try:
            if not sep:
                raise ValueError("missing ':'")
            numbering[int(index)] = [int(x) for x in order.split()]
        except ValueError as e:
            raise SpecError(f"{path}:{line_no}: bad numbering line {line!r} ({e})")
    return numbering


class Report(BaseModel):
    """JSON report written by every subcommand."""
    model_config = ConfigDict(extra='allow', populate_by_name=True)

    schema_version: int = Field(1, alias='schema')
    command: Optional[str] = None
    success: bool
    exit_code: int
    message: str = ""
    spec: Optional[Dict[str, Any]] = None
    params: Optional[Dict[str, Any]] = None
    spectrum: Optional[Dict[str, Any]] = None
    p_ranks: Dict[str, int] = Field(default_factory=dict)
    canonical_hash: Optional[str] = None
    aut_order: Optional[int] = None
    error: Optional[Dict[str, Any]] = None
    timings: Dict[str, float] = Field(default_factory=dict)

    @field_validator('exit_code')
    @classmethod
    def validate_exit_code(cls, v):
        if v not in (0, 1, 2, 3):
            raise ValueError('Exit code must be 0, 1, 2 or 3')
        return v

    @model_validator(mode='after')
    def check_consistency(self):
        if self.success != (self.exit_code == 0):
            raise ValueError('success must agree with exit_code')
        return self

    def to_json_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode='json', by_alias=True, exclude_none=True)
