"""Exception vocabulary shared by all tracktree modules."""


class TrackTreeError(Exception):
    """Base class for every error raised by this package."""


# --- group models ---------------------------------------------------------

class UnknownLetter(TrackTreeError):
    pass


class ExponentOutOfRange(TrackTreeError):
    pass


class ModelMismatch(TrackTreeError):
    pass


class RadiusTooLarge(TrackTreeError):
    pass


class UnsupportedSubgroup(TrackTreeError):
    pass


class SearchBudgetExceeded(TrackTreeError):
    pass


# --- windows and families -------------------------------------------------

class CertificationFailure(TrackTreeError):
    """A windowed computation touched the boundary shell.

    Carries the pair of translations whose symmetric difference could not
    be certified; enlarging the radius is the standard fix.
    """

    def __init__(self, g1, g2, detail=""):
        self.g1 = g1
        self.g2 = g2
        super().__init__(f"uncertified difference for ({g1}, {g2}): {detail}")


class UncertifiedWitness(TrackTreeError):
    pass


class PropernessFailed(TrackTreeError):
    pass


class ConflictingRule(TrackTreeError):
    pass


# --- pattern combinatorics ------------------------------------------------

class ParityViolation(TrackTreeError):
    """Odd triangle perimeter: impossible for symmetric-difference metrics,
    so it signals corrupted input data."""

    def __init__(self, u, v, w):
        self.triple = (u, v, w)
        super().__init__(f"odd perimeter on triple {u}, {v}, {w}")


class NegativeCorner(TrackTreeError):
    def __init__(self, u, v, w):
        self.triple = (u, v, w)
        super().__init__(f"negative corner count on triple {u}, {v}, {w}")


class NonNestedSquare(TrackTreeError):
    """Crossing witness found by the square decomposition."""

    def __init__(self, cosets, vertices):
        self.cosets = cosets
        self.vertices = vertices
        super().__init__(f"cosets {sorted(cosets)} cross on square {vertices}")


class NotTotal(TrackTreeError):
    """Two label classes on one edge are incomparable (falsification witness)."""

    def __init__(self, c1, c2, edge):
        self.c1 = c1
        self.c2 = c2
        self.edge = edge
        super().__init__(f"classes of {c1!r} and {c2!r} incomparable on edge {edge}")


# --- tree construction ----------------------------------------------------

class NotNested(TrackTreeError):
    pass


class ClosureBudgetExceeded(TrackTreeError):
    pass


class DisconnectedTree(TrackTreeError):
    pass


class OutsideCertifiedDomain(TrackTreeError):
    pass


class ClosureViolation(TrackTreeError):
    """Witness pair whose product escapes a parallel-class union."""

    def __init__(self, e1, e2):
        self.pair = (e1, e2)
        super().__init__(f"product {e1!r} * {e2!r} escapes the class union")


# --- harness --------------------------------------------------------------

class TooLarge(TrackTreeError):
    pass


class ParseError(TrackTreeError):
    pass


class IoError(TrackTreeError):
    pass
