"""Exact torsion and obstruction computations for rigid Levi-(2,2) hypersurfaces in C^5."""

__version__ = "0.1.0"

from .algebra import GaussRational, Series, VarContext  # noqa: E402
from .errors import CRError  # noqa: E402

__all__ = ["GaussRational", "Series", "VarContext", "CRError", "__version__"]
