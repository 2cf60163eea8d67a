class RiskBanditError(Exception):
    pass


class ConfigurationError(RiskBanditError, ValueError):
    """
    Raised for invalid configuration values and unknown strategy identifiers.

    When raised from form validation, ``errors`` holds the form's error dict.
    """
    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = errors or {}


class InvalidPriors(ConfigurationError):
    pass


class ContractViolation(RiskBanditError, RuntimeError):
    pass


class StreamParseError(RiskBanditError, ValueError):
    def __init__(self, path, line, field, message):
        self.path = str(path)
        self.line = line
        self.field = field
        super().__init__('{0}:{1}: field {2!r}: {3}'.format(self.path, line, field, message))


class UndefinedNormalization(RiskBanditError, ArithmeticError):
    pass


class EmptyInput(RiskBanditError, ValueError):
    pass
