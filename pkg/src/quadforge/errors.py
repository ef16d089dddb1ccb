"""Exception hierarchy shared across the package."""


class QuadforgeError(Exception):
    """Base class for all domain errors raised by this package."""


class StructuralError(QuadforgeError):
    """A graph or embedding violates its structural invariants."""


class SurgeryError(QuadforgeError):
    """A surgical operation was applied at an invalid site."""


class SearchError(QuadforgeError):
    """A witness specification is inconsistent or a search could not run."""


class CatalogError(QuadforgeError):
    """A catalog record is missing, corrupt, or fails re-verification."""


class PlanError(QuadforgeError):
    """A parameter request is inadmissible or a derivation step failed."""


class FormatError(QuadforgeError):
    """A serialized embedding or certificate could not be parsed."""
