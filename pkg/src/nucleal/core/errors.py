"""Exception types shared across model families and the CLI.

The CLI maps each type to a distinct exit code, so raising the right
one is part of the public contract, not just politeness.
"""


class ParseError(ValueError):
    """Input could not be decoded against the expected JSON schema."""


class ShapeMismatch(ValueError):
    """Two values that should share an object/boundary do not."""


class InvariantViolation(ValueError):
    """A structural invariant of a model value is broken.

    Carries an optional machine-readable witness for reports.
    """

    def __init__(self, message: str, witness: object = None):
        super().__init__(message)
        self.witness = witness


class TraceClassError(ValueError):
    """A trace was requested for a morphism outside the trace class."""


class UnsupportedCheck(RuntimeError):
    """A harness check was requested on an instance lacking the structure."""
