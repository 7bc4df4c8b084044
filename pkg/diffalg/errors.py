"""Exception hierarchy for the engine, the scenario layer and the service."""


class DiffalgError(Exception):
    """Base class for every error raised by diffalg."""

    kind = "error"


class AmbientMismatchError(DiffalgError):
    kind = "ambient_mismatch"


class UnknownVariableError(DiffalgError):
    kind = "unknown_variable"

    def __init__(self, name: str):
        super().__init__(f"unknown variable {name}")
        self.name = name


class FieldError(DiffalgError):
    kind = "field"


class ZeroPolynomialError(DiffalgError):
    kind = "zero_polynomial"


class InfiniteStaircaseError(DiffalgError):
    kind = "infinite_staircase"


class UnitIdealError(DiffalgError):
    kind = "unit_ideal"


class InhomogeneousError(DiffalgError):
    kind = "inhomogeneous"


class TruncationError(DiffalgError):
    """A generator appeared too close to the top of the degree window."""

    kind = "truncation"

    def __init__(self, degree: int, top: int, what: str = "generators"):
        super().__init__(
            f"cannot certify {what}: a new generator appears in degree {degree}, "
            f"within the margin of the window top {top}; raise the degree bound"
        )
        self.degree = degree
        self.top = top


class NotArtinianError(DiffalgError):
    kind = "not_artinian"


class UnverifiedDerivationError(DiffalgError):
    kind = "unverified_derivation"


class CandidateError(DiffalgError):
    kind = "candidate"


class RouteDisagreementError(DiffalgError):
    kind = "route_disagreement"


class UnsupportedRingError(DiffalgError):
    kind = "unsupported_ring"


class DepthInconclusiveError(DiffalgError):
    kind = "depth_inconclusive"

    def __init__(self, bound: int, detail: str = ""):
        super().__init__(f"depth inconclusive within degree bound {bound}{': ' + detail if detail else ''}")
        self.bound = bound


class CharacteristicZeroError(DiffalgError):
    kind = "characteristic_zero"


class ComplexError(DiffalgError):
    kind = "complex"


class ExpressionSyntaxError(DiffalgError):
    kind = "syntax"

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


class ScenarioError(DiffalgError):
    kind = "scenario"


class IndexRangeError(DiffalgError):
    """A homological index or Frobenius exponent outside its range."""

    kind = "index_range"
