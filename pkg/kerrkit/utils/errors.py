"""
Custom exception classes for the library and CLI

Every error carries a machine-readable ``error_code`` and the process exit
code the CLI uses when the error escapes a command.
"""

from typing import List, Optional


class KerrKitError(Exception):
    """Base exception for all kerrkit errors"""

    exit_code = 1

    def __init__(self, message: str, error_code: str = None, details: dict = None):
        self.message = message
        self.error_code = error_code or "KERRKIT_ERROR"
        self.details = details or {}
        super().__init__(self.message)


class DomainError(KerrKitError):
    """Parameter, sign or state-domain violations"""

    def __init__(self, message: str, parameter: str = None, **kwargs):
        self.parameter = parameter
        super().__init__(message, error_code="DOMAIN_ERROR", **kwargs)


class TruncationOverflowError(KerrKitError):
    """Required Fock dimension above the cap, or leakage out of a truncated lattice"""

    def __init__(self, message: str, required_dim: int = None, cap: int = None, **kwargs):
        self.required_dim = required_dim
        self.cap = cap
        super().__init__(message, error_code="TRUNCATION_OVERFLOW", **kwargs)


class ShapeMismatchError(KerrKitError):
    """Array shapes that do not line up"""

    def __init__(self, message: str, expected=None, actual=None, **kwargs):
        self.expected = expected
        self.actual = actual
        super().__init__(message, error_code="SHAPE_MISMATCH", **kwargs)


class SchemaError(KerrKitError):
    """Malformed JSON or CSV input"""

    def __init__(self, message: str, field: str = None, **kwargs):
        self.field = field
        super().__init__(message, error_code="SCHEMA_ERROR", **kwargs)


class ParseError(KerrKitError):
    """Malformed binary container"""

    def __init__(self, message: str, offset: int = None, **kwargs):
        self.offset = offset
        super().__init__(message, error_code="PARSE_ERROR", **kwargs)


class ConfigurationError(KerrKitError):
    """Configuration related errors"""

    def __init__(self, message: str, config_key: str = None, **kwargs):
        self.config_key = config_key
        super().__init__(message, error_code="CONFIGURATION_ERROR", **kwargs)


class UsageError(KerrKitError):
    """Invalid command-line invocation"""

    def __init__(self, message: str, **kwargs):
        super().__init__(message, error_code="USAGE_ERROR", **kwargs)


class SizeGuardError(KerrKitError):
    """Problem too large for a brute-force routine"""

    def __init__(self, message: str, size: int = None, limit: int = None, **kwargs):
        self.size = size
        self.limit = limit
        super().__init__(message, error_code="SIZE_GUARD", **kwargs)


class QuadratureResolutionError(KerrKitError):
    """Quadrature residual not stable under node doubling"""

    exit_code = 2

    def __init__(self, message: str, residual: float = None, refined: float = None, **kwargs):
        self.residual = residual
        self.refined = refined
        super().__init__(message, error_code="QUADRATURE_UNDER_RESOLVED", **kwargs)


class StepSizeError(KerrKitError):
    """Richardson-extrapolated finite differences failed to converge"""

    exit_code = 2

    def __init__(self, message: str, samples: Optional[List[float]] = None, **kwargs):
        self.samples = samples or []
        super().__init__(message, error_code="STEP_SIZE_ERROR", **kwargs)


class VerificationError(KerrKitError):
    """One or more verification checks failed"""

    exit_code = 2

    def __init__(self, message: str, failed_checks: Optional[List[str]] = None, **kwargs):
        self.failed_checks = failed_checks or []
        super().__init__(message, error_code="VERIFICATION_FAILED", **kwargs)


class DatasetUnavailableError(KerrKitError):
    """External dataset archive missing; dependent criteria are skipped"""

    exit_code = 3

    def __init__(self, message: str, path: str = None, **kwargs):
        self.path = path
        super().__init__(message, error_code="DATASET_UNAVAILABLE", **kwargs)
