"""Exception hierarchy shared by all qfn modules.

Every error raised by the library derives from :class:`QfnError` so callers
(and the command-line front end) can map failures to exit codes without
string matching.
"""


class QfnError(Exception):
    """Base class for all qfn errors."""


class DimensionMismatch(QfnError):
    """Operands disagree on labels, shapes, or the initial-space dimension."""


class AlgebraicLoop(QfnError):
    """A loop matrix ``1 - V_ii X`` is singular (or numerically so).

    Carries the reciprocal-condition estimate that triggered the failure.
    """

    def __init__(self, message: str, rcond: float = 0.0):
        super().__init__(message)
        self.rcond = rcond


class InvalidPartition(QfnError):
    """Internal/external channel split is malformed (empty, full, or bad labels)."""


class NotUnitaryScattering(QfnError):
    """A scattering matrix fails the unitarity check."""


class NotHermitian(QfnError):
    """A Hamiltonian block fails the self-adjointness check."""


class NotStarUnitary(QfnError):
    """A coefficient matrix fails the star-unitarity check."""


class MalformedStructure(QfnError):
    """A bordered matrix violates the required zero/identity block pattern."""


class InvalidState(QfnError):
    """A density matrix is not Hermitian, trace-one, and positive."""


class ParseError(QfnError):
    """A network description file is malformed."""
