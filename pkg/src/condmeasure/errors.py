"""Exception hierarchy.

Every error raised by the library derives from :class:`CMeasureError`. The
CLI maps the two families below onto exit codes: model/precondition errors
exit with 2, scenario parse and name errors with 3.
"""


class CMeasureError(Exception):
    """Base class for all library errors."""


class ModelError(CMeasureError):
    """A precondition of a library operation was not met."""


class InvalidIndex(ModelError):
    pass


class NotOnGrid(ModelError):
    pass


class IndeterminateMass(ModelError):
    """Raised where exact evaluation would need inf - inf or 0 * inf."""


class NonPositiveScalar(ModelError):
    pass


class ZeroMeasure(ModelError):
    pass


class NotSigmaFinite(ModelError):
    pass


class CarrierMismatch(ModelError):
    pass


class NotAdmissible(ModelError):
    pass


class UnsupportedFiberSum(ModelError):
    pass


class UnsupportedRule(ModelError):
    pass


class NotSigmaFiniteStatistic(ModelError):
    pass


class NullFiber(ModelError):
    pass


class NoBlockContains(ModelError):
    pass


class ConsistencyFailure(ModelError):
    pass


class UnsupportedDecomposition(ModelError):
    pass


class UnsupportedCombination(ModelError):
    pass


class NotSigmaFiniteObservation(ModelError):
    pass


class NullObservation(ModelError):
    pass


class WindowTooSmall(ModelError):
    pass


class ScenarioError(CMeasureError):
    """Problems with the scenario document itself."""


class ParseError(ScenarioError):
    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class ScenarioNameError(ScenarioError):
    pass
