"""
Typed errors raised by qheun.

Each error also derives from the closest builtin, so callers that only
catch ``ValueError`` or ``ArithmeticError`` keep working.
"""


class QHeunError(Exception):
    """Base class of all qheun errors."""


class InvalidQ(QHeunError, ValueError):
    """The base q is outside 0 < |q| < 1 or malformed."""


class InvalidArgument(QHeunError, ValueError):
    """An argument is outside the domain of the operation (e.g. x = 0)."""


class InexactPower(QHeunError, ValueError):
    """An exact power q**e or x**e is not a rational number."""


class OffLattice(QHeunError, ValueError):
    """A point does not lie on the q-lattice of a lattice function."""


class PoleEncountered(QHeunError, ZeroDivisionError):
    """A denominator factor vanished."""


class DivisionByZero(QHeunError, ZeroDivisionError):
    """A ratio was requested with a vanishing denominator value."""


class NonConvergent(QHeunError, ArithmeticError):
    """A product or series did not meet its tail threshold within max_terms."""


class LimitNotDetected(QHeunError, ArithmeticError):
    """A lattice limit did not stabilize."""


class ConstraintViolated(QHeunError, ValueError):
    """A parameter constraint required by an identity does not hold."""


class DomainViolated(QHeunError, ValueError):
    """Arguments are outside the region where a summation formula holds."""


class UnknownIdentity(QHeunError, KeyError):
    """The identity id is not in the registered catalog."""

    def __str__(self):
        # KeyError quotes its argument; keep the plain message.
        return str(self.args[0]) if self.args else ""
