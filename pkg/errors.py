"""
Error types for construction and certification
"""

from typing import Any, Dict, Optional


class DdgError(ValueError):
    """Base error. Carries a machine-readable details payload."""

    exit_code: int = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Serialise for the error block of a report."""
        payload = {
            "error": type(self).__name__,
            "message": self.message,
            "exit_code": self.exit_code,
        }
        if self.details:
            payload["details"] = self.details
        return payload


class SpecError(DdgError):
    """Bad input: malformed files, invalid parameters, unsupported sizes."""

    exit_code = 2


class CertificationError(DdgError):
    """A mathematical check failed on well-formed input."""

    exit_code = 3


# Finite fields

class NotPrimePower(SpecError):
    pass


class ElementOutOfRange(SpecError):
    pass


class FieldDivisionByZero(SpecError):
    pass


class TooLarge(SpecError):
    pass


# Designs and matrices

class NotHadamard(SpecError):
    pass


class NotNormalized(SpecError):
    pass


class AxiomViolation(CertificationError):
    """An affine design axiom fails; axiom is 'i' or 'ii'."""

    def __init__(self, axiom: str, message: str, witness: Optional[Dict[str, Any]] = None):
        super().__init__(message, {"axiom": axiom, "witness": witness or {}})
        self.axiom = axiom
        self.witness = witness or {}


class ParameterMismatch(CertificationError):
    pass


# Squares and constructions

class NotSquare(SpecError):
    pass


class EntryOutOfRange(SpecError):
    pass


class IndexOutOfRange(SpecError):
    pass


class DimensionMismatch(SpecError):
    pass


class BadBijection(SpecError):
    pass


class DiagonalViolation(SpecError):
    pass


class NotSymmetric(SpecError):
    pass


class UnknownFixture(SpecError):
    pass


# Graph certification

class VertexOutOfRange(SpecError):
    pass


class SameVertex(SpecError):
    pass


class NotRegular(CertificationError):
    pass


class Degenerate(CertificationError):
    pass


class NotDivisible(CertificationError):
    """Two-value common-neighbour condition fails at a witness pair."""

    def __init__(self, message: str, witness: Optional[tuple] = None, details: Optional[Dict[str, Any]] = None):
        payload = dict(details or {})
        if witness is not None:
            payload["witness"] = list(witness)
        super().__init__(message, payload)
        self.witness = witness


class NoPartition(NotDivisible):
    pass


class AmbiguousPartition(CertificationError):
    def __init__(self, message: str, candidates: list):
        super().__init__(message, {"candidates": len(candidates)})
        self.candidates = candidates


class NotSrg(CertificationError):
    def __init__(self, message: str, witness: Optional[tuple] = None):
        super().__init__(message, {"witness": list(witness)} if witness else None)
        self.witness = witness


class Disconnected(CertificationError):
    pass


class NotDistanceRegular(CertificationError):
    pass


# Algebra

class InfeasibleParameters(CertificationError):
    pass


class SpectrumMismatch(CertificationError):
    pass


class NotPrime(SpecError):
    pass


class WrongParameters(CertificationError):
    pass


class NotGraphical(CertificationError):
    pass


class NotRegularHadamard(CertificationError):
    pass
