"""Exception hierarchy.

Configuration problems (bad parameters, missing inputs) derive from
``ConfigError``; failures discovered while computing derive from
``ComputationError``. The CLI maps the two families to distinct exit codes.
"""


class LatGaussError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(LatGaussError, ValueError):
    pass


class ComputationError(LatGaussError, RuntimeError):
    pass


class ParamConstraint(ConfigError):
    pass


class MissingInput(ConfigError):
    def __init__(self, field: str):
        super().__init__(f"missing input: {field}")
        self.field = field


class RankDeficient(ComputationError):
    def __init__(self, column: int, message: str | None = None):
        super().__init__(message or f"column {column} is linearly dependent on earlier columns")
        self.column = column


class EnumerationBudgetExceeded(ComputationError):
    def __init__(self, needed: float, budget: float):
        super().__init__(f"enumeration needs {needed:.3g} points, budget is {budget:.3g}")
        self.needed = needed
        self.budget = budget


class NoVectorInRadius(ComputationError):
    pass


class EmptySampleSet(ConfigError):
    pass


class RatioOutOfRange(ComputationError):
    def __init__(self, point, value: float):
        super().__init__(f"ratio {value!r} outside [0, 1] at {point!r}")
        self.point = point
        self.value = value


class ZeroGoodAmplitude(ComputationError):
    pass


class PhiOutOfRange(ComputationError):
    def __init__(self, point, value: float):
        super().__init__(f"test function value {value!r} outside [-1, 1] at {point!r}")
        self.point = point
        self.value = value


class HypothesisViolated(ComputationError):
    def __init__(self, report):
        super().__init__(f"separation hypothesis does not hold: {report}")
        self.report = report


class NoSolutionInSupport(ComputationError):
    pass
