"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures onto its
stable contract: 2 for configuration problems, 3 for data problems and 4 for
numerical failures.
"""


class MacrovarError(Exception):
    exit_code = 1


class ConfigError(MacrovarError):
    exit_code = 2


class DataError(MacrovarError):
    exit_code = 3


class DomainError(DataError):
    """A transform received a value outside its domain (e.g. log of 0)."""


class InsufficientDataError(DataError):
    pass


class NoOverlapError(DataError):
    pass


class RangeError(DataError):
    pass


class GapError(DataError):
    pass


class DuplicatePeriodError(DataError):
    pass


class ParseError(DataError):
    pass


class FetchError(DataError):
    pass


class NumericalError(MacrovarError):
    exit_code = 4


class CollinearityError(NumericalError):
    def __init__(self, message, columns=()):
        super().__init__(message)
        self.columns = tuple(columns)


class DegenerateInputError(NumericalError):
    pass


class DegenerateModelError(NumericalError):
    pass


class IdentificationError(NumericalError):
    pass


class BootstrapError(NumericalError):
    pass
