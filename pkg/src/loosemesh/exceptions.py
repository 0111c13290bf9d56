"""Error types raised by the meshing package."""


class MeshError(Exception):
    """Base class for package errors."""


class DegenerateError(MeshError, ValueError):
    """Collinear triangle, coincident endpoints or similar degenerate input."""


class DuplicatePointError(MeshError, ValueError):
    """Input contains the same point twice."""


class OutsideHullError(MeshError, ValueError):
    """A point was inserted outside the current triangulated region."""


class BoundaryVertexError(MeshError, ValueError):
    """Quantity is unbounded at a convex-hull vertex."""


class QuadtreeError(MeshError, RuntimeError):
    """No cell satisfies the storage condition for a point."""


class ConfigError(MeshError, ValueError):
    """Inconsistent refinement constants or configuration."""


class ParseError(MeshError, ValueError):
    """Malformed point file; carries the offending line number."""

    def __init__(self, msg, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            msg = f"line {lineno}: {msg}"
        super().__init__(msg)


class LemmaViolation(MeshError, AssertionError):
    """An instrumented invariant check failed."""

    def __init__(self, lemma, msg, dump_path=None):
        self.lemma = lemma
        self.dump_path = dump_path
        super().__init__(f"{lemma}: {msg}")
