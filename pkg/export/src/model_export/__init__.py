"""Bridge from scikit-learn training stacks to the canonical ensemble JSON,
plus fetchers that shape public benchmark datasets into the expected CSV."""

from .datasets import DownloadError, prepare_dataset
from .errors import ExportError, UnsupportedModel
from .forest import export_forest
from .gbdt import export_gbdt
from .schema import load_schema

__all__ = ["DownloadError", "ExportError", "UnsupportedModel",
           "export_forest", "export_gbdt", "load_schema", "prepare_dataset"]
