"""Exceptions raised by srgmrank.

Every error derives from ``ValueError`` so existing ``except ValueError``
handlers keep working. The command line maps the three families to exit codes:

    ConfigError    -> 1
    DatasetError   -> 2
    NumericalError -> 3
"""


class SrgmRankError(ValueError):
    """Base class of every srgmrank error"""

    exit_code = 1


class ConfigError(SrgmRankError):
    """Invalid run configuration, unknown names or missing fit results"""

    exit_code = 1


class DatasetError(SrgmRankError):
    exit_code = 2


class DatasetParseError(DatasetError):
    """A dataset line could not be read

    Arguments:
        message (str) : description of the problem
        line (int, optional) : 1-based line number in the source. Defaults to None.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DatasetValidationError(DatasetError):
    """A parsed dataset violates an invariant

    Arguments:
        message (str) : description of the problem
        row (int, optional) : 1-based data row. Defaults to None.
    """

    def __init__(self, message, row=None):
        self.row = row
        super().__init__(message)


class NumericalError(SrgmRankError):
    exit_code = 3


class DomainError(NumericalError):
    """An input outside the region where a formula is defined"""


class ModelDomainError(DomainError):
    """Model parameters or times outside the model's constraint region"""


class CriterionError(NumericalError):
    """A comparison criterion cannot be computed

    Arguments:
        message (str) : description of the violated precondition
        criterion (str, optional) : criterion name. Defaults to None.
        model (str, optional) : model name. Defaults to None.
    """

    def __init__(self, message, criterion=None, model=None):
        self.criterion = criterion
        self.model = model
        prefix = ", ".join(
            f"{label}={value}" for label, value in (("model", model), ("criterion", criterion)) if value
        )
        super().__init__(f"[{prefix}] {message}" if prefix else message)
