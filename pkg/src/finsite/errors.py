"""Exception types shared across the package."""


class FinSiteError(Exception):
    """Base class for all finsite errors."""


class MalformedTable(FinSiteError):
    """A finite table has dangling identifiers or missing/extra entries."""


class LawViolation(FinSiteError):
    """An algebraic law fails; carries the law name and a witness."""

    def __init__(self, law, witness, message=None):
        self.law = law
        self.witness = witness
        super().__init__(message or f"{law} violated at {witness!r}")


class TargetMismatch(FinSiteError):
    """Arrows or functors do not share the required target."""


class BaseMismatch(FinSiteError):
    """Presheaves or topologies live over different base categories."""


class UnknownObject(FinSiteError):
    """An object identifier is not part of the category."""


class NotAFibration(FinSiteError):
    """The functor fails the cartesian-lifting condition."""


class NotAComorphism(FinSiteError):
    """The sited functor fails the cover-lifting condition."""


class NontrivialTopology(FinSiteError):
    """Operation is only specified at trivial topologies."""


class NotARelativeSite(FinSiteError):
    """The local site is not a Grothendieck construction with a topology
    containing the Giraud one."""


class MissingPullback(FinSiteError):
    """The category lacks a pullback (or the projection fails to preserve
    it) required by the hypothesis."""


class NotContinuous(FinSiteError):
    """The functor fails the continuity criterion required here."""


class SearchExhausted(FinSiteError):
    """A search guaranteed to succeed by a verified precondition found
    nothing; signals an internal inconsistency."""
