"""Exception hierarchy shared by the library and the scenario runner."""


class CVFaradayError(Exception):
    """Base class for all library errors."""


class ModeError(CVFaradayError):
    """Unknown, duplicate or otherwise invalid mode reference."""


class UnphysicalStateError(CVFaradayError):
    """A covariance matrix violates the uncertainty principle."""


class DegenerateStateError(CVFaradayError):
    """Operation needs an invertible covariance matrix."""


class DimensionError(CVFaradayError):
    """Vector or matrix has the wrong shape for the state it acts on."""


class SymplecticError(CVFaradayError):
    """Matrix fails the symplectic certificate or cannot be inverted."""


class MeasurementError(CVFaradayError):
    """Homodyne measurement cannot be carried out."""


class CriterionError(CVFaradayError):
    """Invalid bipartition or variance-criterion specification."""
