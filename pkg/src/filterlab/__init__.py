"""filterlab: filters on N, convergence of l1 sequences along them, and the
constructions that certify which filters have the Schur property."""

__version__ = "0.1.0"

from .errors import FilterlabError, InvalidArgument, PreconditionError  # noqa: E402
from .verdict import CONSISTENT, PROVED, REFUTED, Verdict, all_of, any_of  # noqa: E402

__all__ = ["__version__", "FilterlabError", "InvalidArgument", "PreconditionError", "Verdict",
           "PROVED", "REFUTED", "CONSISTENT", "all_of", "any_of"]
