"""Exception types shared across the package."""


class EngineError(Exception):
    """Base class for all errors raised by centroid_ir."""


class ParseError(EngineError):
    """A text input could not be parsed.

    Raised for malformed embedding files, run files, qrels files, IDF
    files, and corpus lines.  Carries the 1-based line number when known.
    """

    def __init__(self, message: str, line_no: int | None = None, path=None):
        self.line_no = line_no
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}: "
        if line_no is not None:
            where += f"line {line_no}: "
        super().__init__(where + message)


class DimensionMismatch(EngineError):
    """Vectors of incompatible dimensionality were combined."""


class DuplicateId(EngineError):
    """A document or question id occurred more than once."""


class IndexFormatError(EngineError):
    """An index file has a bad magic number or unsupported version."""


class ConfigMismatch(EngineError):
    """A pipeline was configured inconsistently with its index."""


class UnknownIds(EngineError):
    """Ids referenced by a run could not be resolved.

    The offending ids are available as ``.ids``.
    """

    def __init__(self, message: str, ids):
        self.ids = sorted(ids)
        shown = ", ".join(self.ids[:10])
        if len(self.ids) > 10:
            shown += f", ... ({len(self.ids)} total)"
        super().__init__(f"{message}: {shown}")


class StateError(EngineError):
    """An operation was called before its prerequisites were established."""


class EvaluationError(EngineError):
    """A run and a qrels set share no question ids."""
