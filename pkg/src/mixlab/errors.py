"""Exception and warning types shared across the package."""


class MixlabError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(MixlabError):
    """Operands have incompatible field counts or spatial dimensions."""


class NonScalarBlocks(MixlabError):
    """A block tensor required to have scalar (multiple-of-identity) blocks does not."""


class NotPositiveDefinite(MixlabError):
    """A tensor required to be positive definite is not."""


class SingularJumpSystem(MixlabError):
    """The interface jump system of a laminate is singular."""


class SingularContrast(MixlabError):
    """L1 - L2 is singular where the closed forms require its inverse."""


class ResolutionTooCoarse(MixlabError):
    """Rasterization grid cannot resolve the finest laminate layer."""


class NoConvergence(MixlabError):
    """Iterative cell solver failed to reach the requested residual."""

    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class ContrastTooHigh(MixlabError):
    """Phase contrast exceeds what the cell solver accepts."""


class BranchCut(MixlabError):
    """sigma lies on the closed negative real axis where sigma_star is not analytic."""


class WrongHalfPlane(MixlabError):
    """A Herglotz check received a sample with Im(sigma) <= 0."""


class NotOrthogonal(MixlabError):
    """Field lists violate the pairwise orthogonality the W-transform assumes."""


class DegenerateInput(MixlabError):
    """A closed-form formula hit a division by zero or equivalent degeneracy."""


class UserInputError(MixlabError):
    """Malformed configuration, file, or command-line input."""


class NotCubicWarning(UserWarning):
    """Geometry fails the cubic-symmetry validation of the Hall extraction."""


class AnisotropyWarning(UserWarning):
    """A check assuming isotropy received a noticeably anisotropic tensor."""
