"""Exception types shared across the package."""


class LpembedError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(LpembedError, ValueError):
    """An argument or configuration value is invalid."""


class DomainError(LpembedError, ValueError):
    """A point lies outside the latent domain box."""


class RangeError(LpembedError, ValueError):
    """A kernel value escapes [0, 1] somewhere on its domain."""

    def __init__(self, message, point=None, value=None):
        super().__init__(message)
        self.point = point
        self.value = value


class UnsupportedFamilyError(LpembedError, ValueError):
    """The requested operation does not apply to this kernel family."""


class SignatureMismatchError(LpembedError, ValueError):
    """Two spectral objects carry incompatible (p, q) signatures."""


class IsolatedNodesError(LpembedError, ValueError):
    """The normalized Laplacian is undefined because of degree-zero nodes."""

    def __init__(self, nodes):
        self.nodes = list(nodes)
        preview = ", ".join(str(i) for i in self.nodes[:10])
        more = "" if len(self.nodes) <= 10 else f", ... ({len(self.nodes)} total)"
        super().__init__(f"graph has isolated nodes: [{preview}{more}]")


class NormalizationError(LpembedError, ValueError):
    """A row normalization factor is non-positive and the target is undefined."""

    def __init__(self, message, rows=None):
        super().__init__(message)
        self.rows = list(rows) if rows is not None else []


class NumericError(LpembedError, RuntimeError):
    """A numerical routine failed (eigensolver breakdown, non-convergence, ...)."""


class RankDeficiencyError(NumericError):
    """No nonzero eigenpair is available at the requested rank."""
