"""Exceptions raised by apdiff.

Each exception class knows the exit status the command line front end
reports for it.

"""

class ApdiffError(Exception):
    exit_status = 1

class ConfigError(ApdiffError):
    """The scheme configuration could not be understood."""
    exit_status = 2

class PreconditionError(ApdiffError):
    """An operation was called with arguments outside its domain."""
    exit_status = 3

class StructuralError(PreconditionError):
    """Objects that must share a space or dimension do not."""
    pass

class UnsupportedInput(PreconditionError):
    pass

class FingerprintMismatch(PreconditionError):
    """Two objects that are being compared describe different systems."""
    pass

class NumericalInvariantError(ApdiffError):
    """A computed quantity failed a check it must pass by construction."""
    exit_status = 4
