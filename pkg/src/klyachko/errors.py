"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`KlyachkoError`.
The CLI maps :class:`MathematicalFailure` subclasses to exit code 2, parse
problems to 3 and validation problems to 4.
"""


class KlyachkoError(Exception):
    pass


class DimensionError(KlyachkoError, ValueError):
    """Operands live in lattices or vector spaces of different rank."""


class ValidationError(KlyachkoError, ValueError):
    """Input data violates an invariant of the domain type."""


class ParseError(KlyachkoError, ValueError):
    pass


class PreconditionError(KlyachkoError, ValueError):
    pass


class UnsupportedDimension(KlyachkoError, NotImplementedError):
    pass


class NotAFace(PreconditionError):
    pass


class MathematicalFailure(KlyachkoError):
    """A well-formed input for which the requested construction does not exist."""


class Inconclusive(MathematicalFailure):
    """A decision procedure hit its resource limit; no verdict was reached."""


class NotSmoothComplete(MathematicalFailure):
    pass


class SplitCase(MathematicalFailure):
    pass


class GenericityViolation(MathematicalFailure):
    pass


class RankDefect(MathematicalFailure):
    pass
