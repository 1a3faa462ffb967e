"""Exception types raised by qcalc."""


class QCalcError(Exception):
    pass


class NotAUnit(QCalcError, ArithmeticError):
    pass


class NotExactlyDivisible(QCalcError, ArithmeticError):
    pass


class NotIntegral(QCalcError, ArithmeticError):
    """A quotient that should live in the base ring has non-ring coefficients."""


class NotTorsionFree(QCalcError):
    pass


class ParamMismatch(QCalcError, ValueError):
    pass


class HypothesisViolated(QCalcError):
    """Raised when an operation needs (p)_q = 0, q^p = 1 or q-divisibility."""


class NotBijective(QCalcError):
    def __init__(self, message, theta_degree=None):
        super().__init__(message)
        self.theta_degree = theta_degree


class NotCertifiedQuasiNilpotent(QCalcError):
    pass


class RankDeficient(QCalcError):
    def __init__(self, message, achieved_rank=None):
        super().__init__(message)
        self.achieved_rank = achieved_rank


class MismatchedCohomology(QCalcError):
    pass


class BasisFailure(QCalcError):
    def __init__(self, message, n=None):
        super().__init__(message)
        self.n = n


class ConfigError(QCalcError, ValueError):
    pass
