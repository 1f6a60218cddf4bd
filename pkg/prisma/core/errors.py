# Prisma Errors
"""
Typed failures raised by the algebra and service layers.

Every error carries the process exit code the CLI reports for it, so the
command layer never has to map exception types by hand.
"""

from typing import Any, Dict, Optional


class PrismaError(Exception):
    """Base class of all expected failures."""

    exit_code: int = 1
    kind: str = "error"

    def __init__(self, message: str, *, path: Optional[str] = None, witness: Any = None):
        super().__init__(message)
        self.message = message
        self.path = path
        self.witness = witness

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"error": self.kind, "message": self.message}
        if self.path is not None:
            payload["path"] = self.path
        if self.witness is not None:
            payload["witness"] = self.witness
        return payload


class InputError(PrismaError):
    """Malformed or schema-invalid input document."""

    exit_code = 2
    kind = "input_error"


class DimensionMismatch(InputError):
    kind = "dimension_mismatch"


class SpecMismatch(InputError):
    """Tree elements from different parasemifield specs were combined."""

    kind = "spec_mismatch"


class NoInversePair(InputError):
    kind = "no_inverse_pair"


class UnsupportedShape(PrismaError):
    """The expression cannot be compiled to a polyhedral normal form."""

    exit_code = 3
    kind = "unsupported_shape"


class PurityRequired(UnsupportedShape):
    kind = "purity_required"


class TooLarge(PrismaError):
    exit_code = 3
    kind = "too_large"


class CertificateUnavailable(PrismaError):
    exit_code = 3
    kind = "certificate_unavailable"


class VerificationFailed(PrismaError):
    exit_code = 4
    kind = "verification_failed"


def check_dim(expected: int, actual: int, what: str = "vector") -> None:
    """Raises DimensionMismatch unless the two ambient dimensions agree."""
    if expected != actual:
        raise DimensionMismatch(f"{what} has dimension {actual}, expected {expected}")
