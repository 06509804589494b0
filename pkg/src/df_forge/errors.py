"""Exception hierarchy shared by every df_forge module."""


class DFForgeError(Exception):
    """Base class for all errors raised by df_forge."""


class RegionError(DFForgeError):
    """Evaluation point lies outside a field's declared smooth region."""


class NumericalError(DFForgeError):
    """Richardson levels disagree beyond the scheme's consistency tolerance."""


class DomainError(DFForgeError):
    """A composite field was evaluated where it is undefined (e.g. (-rho)^eta with rho >= 0)."""


class DegenerateGradient(DFForgeError):
    """The gradient of a defining function vanishes (below grad_floor)."""


class NoConvergence(DFForgeError):
    """An iterative solver ran out of iterations."""


class SamplingError(DFForgeError):
    """Too few boundary samples could be produced."""


class TransversalityError(DFForgeError):
    """A curve is not transversal to Re L, Im L with the required margin."""


class ProjectionAmbiguous(DFForgeError):
    """Nearest-parameter search on a sampled curve found competing minima."""


class TubeError(DFForgeError):
    """Cutoff tube radii are incompatible with the curve's reach."""


class InteriorError(DFForgeError):
    """A point expected to be interior (rho < 0) is not."""


class HypothesisError(DFForgeError):
    """A point supplied as Levi-flat with Hess(L, N) = 0 fails that precondition."""


class ParamError(DFForgeError):
    """Catalog parameter out of its admissible range."""


class PlacementError(DFForgeError):
    """The glued-domain placement constraints are not satisfied."""


class SeriesMissing(DFForgeError):
    """A report does not contain the requested plot series."""
