class FilterlabError(Exception):
    """Base class for all filterlab errors."""


class InvalidBlocking(FilterlabError):
    pass


class InvalidTrace(FilterlabError):
    pass


class InvalidChain(FilterlabError):
    pass


class InvalidArgument(FilterlabError):
    pass


class PreconditionError(FilterlabError):
    """A construction's precondition failed; `index` names the offending item when known."""

    def __init__(self, message: str, index=None):
        super().__init__(message)
        self.index = index
