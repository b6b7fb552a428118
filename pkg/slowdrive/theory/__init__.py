class SlowDriveError(Exception):
    pass


class InvalidParameterError(SlowDriveError, ValueError):
    pass


class DimensionError(InvalidParameterError):
    pass


class NotHermitianError(InvalidParameterError):
    pass


class NotTracelessError(InvalidParameterError):
    pass


class DissipationlessCouplingError(InvalidParameterError):
    pass


class CycleError(InvalidParameterError):
    pass


class NumericalError(SlowDriveError, ArithmeticError):
    pass


class ThermalOccupationError(NumericalError):
    pass


class DegenerateKernelError(NumericalError):
    pass


class TracelessKernelError(NumericalError):
    pass


class SingularStateError(NumericalError):
    pass


class QuadratureError(NumericalError):
    pass


class IntegrationError(NumericalError):
    pass


class InvariantError(NumericalError):
    pass


class PhysicalConstraintError(NumericalError):
    pass


class NoPositiveWorkError(NumericalError):
    pass


class OptimizerError(NumericalError):
    pass


class EngineConvergenceError(NumericalError):
    pass
