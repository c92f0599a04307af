"""Exception and warning types shared across the package."""


class MvnError(Exception):
    """Base class for all errors raised by this package."""


class ModelValidationError(MvnError):
    """A model violates a structural invariant.

    Carries the full diagnostic list so callers can report every problem,
    not just the first one.
    """

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class ParseError(MvnError):
    """A model or mapping document failed to parse, with a location."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class MappingError(MvnError):
    """An abstraction mapping violates its invariants (totality,
    surjectivity, codomain size, or the requirement that at least one
    entity is properly compressed)."""


class StructureMismatchError(MvnError):
    """Two models do not share entity names and neighbourhood wiring."""


class MappingMismatchError(MvnError):
    """An abstraction mapping does not connect the given pair of models
    (wrong source ranges, or targets that disagree with the abstract
    model's ranges)."""


class InfiniteTraceSetError(MvnError):
    """The asynchronous trace set is infinite, so it cannot be enumerated."""


class UnsupportedError(MvnError):
    """The brute-force oracle cannot decide this instance (one of the
    trace sets is infinite)."""


class GammaOutOfClassError(MvnError):
    """A step term was requested for a state set that is not a nonempty
    subset of the abstract state's concrete class."""


class NotClosedError(MvnError):
    """A step-term family does not satisfy the nonempty-and-closed
    hypotheses required for witness construction."""


class ClassTooLargeError(MvnError):
    """A concrete class is too large for exhaustive step-term
    enumeration (the checker enumerates all nonempty subsets)."""


class NonMonotoneMappingWarning(UserWarning):
    """A state mapping is not order-preserving.  Permitted, but often a
    sign that levels were merged in a biologically odd way."""
