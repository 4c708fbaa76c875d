"""Exception hierarchy shared by all modules."""


class TrapCCError(Exception):
    """Base class for every error raised by trapcc."""


class InvalidDistances(TrapCCError, ValueError):
    pass


class ParallelogramDegenerate(TrapCCError):
    """Bases are equal (to tolerance); the trapezoid diagonal formulas are singular."""


class NotATrapezoid(TrapCCError):
    pass


class DegenerateConfiguration(TrapCCError):
    pass


class EmbeddingInconsistent(TrapCCError):
    pass


class DegenerateDenominator(TrapCCError):
    pass


class SingularRatio(TrapCCError):
    pass


class NoSignChange(TrapCCError):
    pass


class InfeasibleGeometry(TrapCCError):
    pass


class MultipleRoots(TrapCCError):
    def __init__(self, message, brackets):
        super().__init__(message)
        self.brackets = list(brackets)


class NoConvergence(TrapCCError):
    pass


class ConvergedOutsideOmega(TrapCCError):
    """The iteration left the ordered region; `solution` holds the last iterate."""

    def __init__(self, message, solution=None, witness=None):
        super().__init__(message)
        self.solution = solution
        self.witness = dict(witness or {})


class NoPositiveMasses(TrapCCError):
    pass


class ConfigError(TrapCCError, ValueError):
    pass
