"""Exception types shared across the package."""


class WittBurnsideError(Exception):
    pass


class ModulusMismatch(WittBurnsideError):
    pass


class NonIntegral(WittBurnsideError):
    """An exact integer division left a remainder."""

    def __init__(self, divisor, monomial=None, coefficient=None):
        self.divisor = divisor
        self.monomial = monomial
        self.coefficient = coefficient
        where = "" if monomial is None else f" at monomial {monomial}"
        super().__init__(f"coefficient {coefficient} not divisible by {divisor}{where}")


class UnboundVariable(WittBurnsideError):
    def __init__(self, var):
        self.var = var
        super().__init__(f"no value assigned to variable {var}")


class OrderCapExceeded(WittBurnsideError):
    pass


class InvalidGroup(WittBurnsideError):
    pass


class NonAbelian(WittBurnsideError):
    pass


class TruncationTooSmall(WittBurnsideError):
    pass


class LevelUndefined(WittBurnsideError):
    pass


class TorsionRing(WittBurnsideError):
    pass


class NotAUnit(WittBurnsideError):
    pass


class NotDownClosed(WittBurnsideError):
    pass


class FrameMismatch(WittBurnsideError):
    pass


class SizeCapExceeded(WittBurnsideError):
    pass


class EvenPrime(WittBurnsideError):
    pass
