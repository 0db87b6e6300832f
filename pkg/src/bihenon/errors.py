"""Exception hierarchy shared by every module."""


class BihenonError(Exception):
    """Base class for computational failures raised by this package."""


class InvalidParameters(BihenonError, ValueError):
    pass


class RootNotFound(BihenonError):
    pass


class NoSingularSolution(BihenonError):
    pass


class StepSizeUnderflow(BihenonError):
    pass


class QuadratureError(BihenonError):
    pass


class GridError(BihenonError):
    """A radius falls outside the sampled range, or the grid is not a solution."""


class DecayFitError(BihenonError):
    pass
