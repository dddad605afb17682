"""Exception types shared across the package."""


class JourneyMapError(Exception):
    """Base class for all journeymap errors."""


class MissingOutcome(JourneyMapError):
    """Journey has no purchase/non-purchase event."""


class MalformedRow(JourneyMapError):
    """Structurally invalid input row; carries the row number and cause."""

    def __init__(self, row: int, cause: str):
        super().__init__(f"row {row}: {cause}")
        self.row = row
        self.cause = cause


class EmptyDataset(JourneyMapError):
    """Cleansing accepted zero journeys."""


class DegenerateConfig(JourneyMapError):
    """All effective stage weights are zero."""


class InvalidK(JourneyMapError):
    """Cluster or neighbor count outside the valid range."""


class InvalidAssignment(JourneyMapError):
    """Cluster assignment unusable for silhouette scoring."""


class NoConvergence(JourneyMapError):
    """Eigensolver did not converge within its rotation budget."""


class TooFewPoints(JourneyMapError):
    """MDS needs at least three points."""


class EmptyModel(JourneyMapError):
    """Prediction requested from an unfitted or empty model."""


class SingleClassDataset(JourneyMapError):
    """Evaluation protocol needs both outcome classes."""


class NoCandidates(JourneyMapError):
    """No counterfactual candidate exists besides the base journey."""
