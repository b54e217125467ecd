"""Exception types shared by the kernel."""


class RPQError(Exception):
    pass


class PoleError(RPQError, ZeroDivisionError):
    """A deformed number or coefficient hit a zero denominator."""


class SingularError(RPQError, ZeroDivisionError):
    """A defining quotient is 0/0 for the requested parameters."""


class DomainError(RPQError, ValueError):
    pass


class FractionalPowerError(DomainError):
    """An exponent does not fit the sample point's root denominator."""


class MixedContextError(RPQError, ValueError):
    """Operators built over different presets or sample points were combined."""


class ConfigError(RPQError, ValueError):
    pass


class UnsupportedPresetError(RPQError, ValueError):
    pass
