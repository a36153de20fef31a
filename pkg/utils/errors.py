"""
🚨 Error hierarchy for spincyl
==============================

Library code raises these; only the CLI turns them into exit codes and JSON
error objects.
"""

from typing import Any, Dict, Optional


class SpinCylError(Exception):
    """Base class for every error raised by spincyl"""

    exit_code = 1
    kind = "error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {"error": self.kind, "message": self.message, "details": self.details}


class IdentityViolation(SpinCylError):
    """An oracle comparison exceeded its tolerance"""

    kind = "identity_violation"


class PreconditionError(SpinCylError):
    """Input data violates a required identity (Codazzi, Gauss, Killing equation)"""

    kind = "precondition"


class SchemaError(SpinCylError):
    """Malformed case file or JSON payload"""

    exit_code = 2
    kind = "schema"


class SignatureMismatchError(SchemaError):
    kind = "signature_mismatch"


class DimensionMismatchError(SchemaError):
    kind = "dimension_mismatch"


class NullVectorError(SchemaError):
    kind = "null_vector"


class NotARootError(SchemaError):
    kind = "not_a_root"


class NoGeneratorError(SchemaError):
    kind = "no_generator"


class VolumeMismatchError(SchemaError):
    kind = "volume_mismatch"


class ConditioningError(SpinCylError):
    """Numerically ill-posed evaluation"""

    exit_code = 3
    kind = "conditioning"


class BoundaryMarginError(ConditioningError):
    kind = "boundary_margin"


class DegenerateMetricError(ConditioningError):
    kind = "degenerate_metric"


class GaugeFailureError(ConditioningError):
    kind = "gauge_failure"


class StepSizeError(ConditioningError):
    kind = "step_size"


class RootClusterError(ConditioningError):
    kind = "root_cluster"
