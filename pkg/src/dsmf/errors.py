"""Exception types shared across the package."""

from __future__ import annotations


class DimensionMismatchError(ValueError):
    """Operands have incompatible shapes."""


class EmptySetError(ValueError):
    """Operation requires a non-empty set (hull, diameter, sampling)."""


class LPConditioningError(RuntimeError):
    """The LP basis became numerically unreliable.

    Carries a condition-number estimate of the offending basis in
    ``condition`` when one is available.
    """

    def __init__(self, message: str, condition: float | None = None):
        super().__init__(message)
        self.condition = condition


class EmptyBeliefError(RuntimeError):
    """A belief collapsed to the empty set during filtering.

    With in-bound noise this cannot happen for a sound filter, so it is a
    hard error. ``step``, ``sensor`` and ``phase`` identify where it
    happened; ``measurement`` holds the offending measurement when the
    collapse occurred in a local update.
    """

    def __init__(self, step: int, sensor: int, phase: str, measurement=None):
        super().__init__(
            f"empty belief at step {step}, sensor {sensor} ({phase})"
        )
        self.step = step
        self.sensor = sensor
        self.phase = phase
        self.measurement = measurement


class OracleCapError(RuntimeError):
    """A materialized verification set exceeded its generator cap.

    These oracles are meant for small step counts; retry with a smaller k.
    """


class CertificationError(RuntimeError):
    """The rank test and the eigenvector test disagreed beyond tolerance."""


class ScenarioError(ValueError):
    """Scenario file rejected. ``code`` is a stable machine-readable tag."""

    PARSE_ERROR = "PARSE_ERROR"
    UNKNOWN_KEY = "UNKNOWN_KEY"
    MISSING_KEY = "MISSING_KEY"
    BAD_VALUE = "BAD_VALUE"
    DIM_MISMATCH = "DIM_MISMATCH"
    UNBOUNDED_BOX = "UNBOUNDED_BOX"
    SINGULAR_A = "SINGULAR_A"

    def __init__(self, code: str, where: str, message: str):
        super().__init__(f"[{code}] {where}: {message}")
        self.code = code
        self.where = where
