"""Exception types shared across the package."""


class PlatoonError(Exception):
    """Base class for all errors raised by platoon_eso."""


class InvalidParameter(PlatoonError, ValueError):
    def __init__(self, name, reason):
        self.name = name
        self.reason = reason
        super().__init__(f"{name}: {reason}")


class InvalidConfig(PlatoonError, ValueError):
    """Raised by config validation; carries every violated invariant."""

    def __init__(self, problems):
        self.problems = list(problems)
        lines = "; ".join(str(p) for p in self.problems)
        super().__init__(f"invalid configuration ({len(self.problems)} problem(s)): {lines}")

    def names(self):
        return [p.name for p in self.problems]


class DivergenceDetected(PlatoonError, RuntimeError):
    def __init__(self, time, magnitude):
        self.time = time
        self.magnitude = magnitude
        super().__init__(f"state magnitude {magnitude:.3e} exceeded divergence limit at t={time:.6g} s")


class DegenerateRow(PlatoonError, ArithmeticError):
    """A Routh pivot is exactly zero."""


class NotStable(PlatoonError, ValueError):
    pass


class EigenFailure(PlatoonError, ArithmeticError):
    pass


class DenominatorVanishes(PlatoonError, ZeroDivisionError):
    pass


class SingularAtOmega(PlatoonError, ArithmeticError):
    pass
