"""Exception hierarchy. Every failure the CLI distinguishes has its own class."""


class ManyLetterError(Exception):
    """Base class for all errors raised by this package."""


class InvariantError(ManyLetterError, ValueError):
    """A type invariant or a checked post-condition does not hold."""


class NormalizationError(InvariantError):
    pass


class AlphabetMismatchError(ManyLetterError, ValueError):
    pass


class TruncationError(ManyLetterError, ValueError):
    """A string or operator would leave the truncated space."""


class GuardError(ManyLetterError, ValueError):
    """An enumeration would exceed the desk-scale guard."""


class AlignmentError(ManyLetterError, ValueError):
    """A string length is not a multiple of the translator block length."""


class DecodingError(ManyLetterError, ValueError):
    """Input is not a valid encoding.

    ``residual`` holds the norm of the component outside the code image
    when the failure is a quantum decode.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConfigError(ManyLetterError, ValueError):
    """A configuration file or parameter could not be parsed."""
