"""Exception hierarchy shared by all modules."""


class DarkStateError(Exception):
    """Base class for errors raised by this package."""


class InvalidAngularMomentum(DarkStateError, ValueError):
    """Parity mismatch, triangle violation or |m| > j."""


class InvalidTransition(DarkStateError, ValueError):
    """Transition F_g -> F_e not reachable by a dipole photon."""


class CapacityError(DarkStateError):
    """Enumerated basis would exceed the configured size limit."""


class OutOfSectorError(DarkStateError):
    """An operator maps a state outside the requested codomain."""


class CapOverflowError(OutOfSectorError):
    """A photon occupation exceeded the cap of the codomain basis."""


class SectorMismatchError(DarkStateError, ValueError):
    """Two objects live on incompatible mode sets or bases."""


class ConstraintViolation(DarkStateError, ValueError):
    """Requested dark state lies in a regime where none exists."""


class ZeroStateError(DarkStateError):
    """Construction produced the zero vector (or a trivial state)."""
