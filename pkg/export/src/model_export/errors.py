class ExportError(Exception):
    """Base class for export failures."""


class UnsupportedModel(ExportError):
    """Model uses constructs the canonical format refuses to approximate
    (multiclass, learned missing-value routing, non-integer leaf counts)."""
