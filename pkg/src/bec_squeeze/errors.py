"""Exception hierarchy. CLI exit codes key off the two top-level branches."""


class SqueezeError(Exception):
    pass


class ConfigError(SqueezeError):
    pass


class MissingKey(ConfigError):
    def __init__(self, name):
        super().__init__(f"missing required key {name!r}")
        self.name = name


class InvalidValue(ConfigError):
    def __init__(self, name, reason):
        super().__init__(f"invalid value for {name!r}: {reason}")
        self.name = name
        self.reason = reason


class ParseError(ConfigError):
    def __init__(self, line, text=""):
        msg = f"cannot parse line {line}"
        if text:
            msg += f": {text!r}"
        super().__init__(msg)
        self.line = line


class NumericalError(SqueezeError):
    pass


class OutOfRange(NumericalError):
    pass


class TooLarge(NumericalError):
    pass


class NegativePopulation(NumericalError):
    pass


class NonRealMoment(NumericalError):
    pass


class ZeroMeanSpin(NumericalError):
    pass


class EmptyRange(NumericalError):
    pass
