"""Exception types raised by the package."""


class MagtorusError(Exception):
    """Base class for all package errors."""


class GraphError(MagtorusError):
    """Invalid graph input (loops, duplicate edges, disconnected, bad labels)."""


class SupportError(MagtorusError):
    """Vertex set is not an admissible support for the graph."""


class NotHermitianError(MagtorusError):
    """Matrix is not conjugate-symmetric within tolerance."""


class StrictSupportError(MagtorusError):
    """Matrix entries do not match the graph's edge set exactly."""


class MultipleEigenvalueError(MagtorusError):
    """The requested eigenvalue is not simple; the eigenvalue function is
    non-smooth there and derivative-based operations are refused."""


class NonCriticalPointError(MagtorusError):
    """Operation requires a critical point but the criticality residual is
    above tolerance."""


class ResidualResonanceError(MagtorusError):
    """The critical value lies in the spectrum of the residual block, so the
    normal Hessian data is degenerate."""


class HypothesisError(MagtorusError):
    """A stated precondition of an identity failed; carries the name of the
    failing hypothesis."""

    def __init__(self, hypothesis, detail=""):
        self.hypothesis = hypothesis
        msg = f"hypothesis failed: {hypothesis}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class DegenerateLinkageError(MagtorusError):
    """Link-length vector has a vanishing signed sum (or is numerically on a
    classification boundary)."""


class EmptyLinkageError(MagtorusError):
    """Requested points of an empty linkage space."""


class SamplingExhaustedError(MagtorusError):
    """Random sampling failed to produce the requested points within the
    retry budget."""


class GenericityError(MagtorusError):
    """Base matrix failed a genericity check (multiple eigenvalue or
    vanishing eigenvector entry in some signing of some induced subgraph)."""


class SpectralClashError(MagtorusError):
    """Prescribed eigenvalue collides with the spectrum of a block that must
    avoid it."""


class VerificationError(MagtorusError):
    """A constructed object failed its own verification step."""
