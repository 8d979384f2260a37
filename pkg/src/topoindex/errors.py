"""Exception types shared across the package."""


class TopoindexError(Exception):
    """Base class for all package errors."""


class EmptyLatticeError(TopoindexError):
    """Raised when a hole mask deletes every site."""


class BranchProximityError(TopoindexError):
    """An eigenvalue sits too close to the negative real axis for the
    principal log branch to be trusted.

    Carries the offending eigenvalue for diagnostics.
    """

    def __init__(self, eigenvalue, margin):
        self.eigenvalue = eigenvalue
        self.margin = margin
        super().__init__(
            f"eigenvalue {eigenvalue!r} within {margin:g} of the branch cut (-inf, 0]"
        )


class SignatureError(TopoindexError):
    """Sparse LDLT factorization broke down (zero pivot hit)."""


class GapSolverError(TopoindexError):
    """Iterative gap solver failed to converge; carries the residual."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class IndeterminateCountError(TopoindexError):
    """An eigenvalue of the trig-method matrix is too close to 1/2 to count."""

    def __init__(self, eigenvalue, distance):
        self.eigenvalue = eigenvalue
        self.distance = distance
        super().__init__(
            f"eigenvalue {eigenvalue:.12g} is within {distance:.3g} of 1/2"
        )
