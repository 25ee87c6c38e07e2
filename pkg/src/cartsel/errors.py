"""Exception types shared across the package."""


class CartselError(Exception):
    """Base class for every error this package raises on purpose."""


class ConfigError(CartselError, ValueError):
    """Invalid configuration: bad rank alpha, unknown mode, unknown distribution."""


class EmptyInputError(CartselError, ValueError):
    """An input array, or the whole input set, is empty."""


class ContractError(CartselError, ValueError):
    """A call broke an operation precondition (k out of range, bad layer target)."""


class InvalidValueError(CartselError, ValueError):
    """Input values are unusable: NaN, non-numeric dtype, or integer magnitudes
    large enough that summing them could overflow int64."""


class ResourceLimitError(CartselError, RuntimeError):
    """An operation would materialize more values than its configured cap."""


class ParseError(CartselError, ValueError):
    """An instance file could not be parsed.  Carries a 1-based line number
    when one is known."""

    def __init__(self, message, line_no=None):
        super().__init__(message)
        self.line_no = line_no
