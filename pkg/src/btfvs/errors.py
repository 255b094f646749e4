"""Exception types shared across the package."""


class DimensionMismatch(ValueError):
    """Orientation matrix shape disagrees with the declared side sizes."""


class NotAcyclic(ValueError):
    """An operation requiring an acyclic tournament was given a cyclic one."""


class NotMConsistent(ValueError):
    """The tournament is not M-consistent for the given undeletable set."""


class EmptyM(ValueError):
    """The undeletable set M must be nonempty for block-structure operations."""


class BlockIndexOutOfRange(IndexError):
    """A block index does not address a block of the sequence."""


class GroundSetMismatch(ValueError):
    """Two partitions do not cover the same ground set."""


class InstanceTooLarge(ValueError):
    """The instance exceeds the exhaustive oracle's vertex cap."""


class NotPrimePower(ValueError):
    """Sample space alphabet size must be a prime power."""


class FamilyCapExceeded(RuntimeError):
    """An instance-family enumeration would exceed its configured cap.

    Raised instead of silently truncating the family, so that completeness
    claims stay honest.  ``would_be`` carries the size the enumeration was
    heading for (a lower bound if the count was aborted early).
    """

    def __init__(self, where: str, would_be: int, cap: int):
        super().__init__(f"{where}: family of size >= {would_be} exceeds cap {cap}")
        self.where = where
        self.would_be = would_be
        self.cap = cap


class PreconditionViolated(ValueError):
    """A pipeline stage was fed an instance failing a required predicate."""

    def __init__(self, predicate: str, detail: str = ""):
        msg = f"precondition failed: {predicate}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.predicate = predicate


class NotAMatching(ValueError):
    """Undirected edges of a disjoint-cover instance must form a matching."""


class ParseError(ValueError):
    """Malformed instance file; carries position information when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column
