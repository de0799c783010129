"""Exception types shared across the engine."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine-specific failures."""


class ParseError(EngineError):
    """Invalid input text; carries the source position of the offence."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class ExtensionRequired(EngineError):
    """A root computation left an irreducible factor with no roots in Q(i).

    The unsplit factor is attached so callers can fall back to
    cardinality-only bookkeeping instead of silently approximating.
    """

    def __init__(self, factor, context: str = ""):
        msg = "roots not expressible over the Gaussian rationals"
        if context:
            msg += f" ({context})"
        super().__init__(msg)
        self.factor = factor
        self.context = context


class NotARefinement(EngineError):
    """The supplied pair of series is not in the refinement relation."""


class VerificationFailure(EngineError):
    """A structural condition the engine relies on could not be established."""


class PreconditionFailed(EngineError):
    """A checker was invoked on data outside its stated hypotheses."""
