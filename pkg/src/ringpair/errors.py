"""Exception and warning types shared across the package.

Every failure mode that callers are expected to branch on gets its own
class. The CLI maps these onto process exit codes, so the hierarchy is
part of the public contract: validation problems derive from
``ValueError``, everything else from :class:`RingpairError`.
"""

from __future__ import annotations


class RingpairError(Exception):
    """Base class for all domain errors raised by this package."""


class NoConvergence(RingpairError):
    """An iterative solver exhausted its budget without meeting tolerance."""


class EmptyBand(RingpairError):
    """A frequency band contains no resonances of the requested ring."""


class MissingResonance(RingpairError):
    """A comb line required by the calculation is absent from the band."""


class QuadratureFailure(RingpairError):
    """Adaptive integration could not reach the requested tolerance."""


class AssumptionViolated(RingpairError):
    """A closed-form approximation was used outside its stated validity."""


class NonPhysical(RingpairError):
    """Inputs or intermediate results left the physically meaningful domain."""


class OutOfRange(RingpairError):
    """A solve target lies outside the reachable range of the model."""


class Infeasible(RingpairError):
    """No device in the allowed parameter region satisfies the design goal."""


class ValidityExceeded(RingpairError):
    """A perturbative validity metric exceeded its configured ceiling."""


class ApproximationWarning(UserWarning):
    """Emitted when a result is produced outside a model's comfort zone.

    In lenient mode (the default) assumption checks warn with this
    category instead of raising :class:`AssumptionViolated`.
    """


class DegenerateCoupling(RingpairError):
    """The coupler strength is exactly zero where a finite value is required.

    Zero coupling is a legal input for field evaluation (the fields are
    constant), so most operations only flag it; this exception is raised
    by the few operations, such as null-length enumeration, that are
    undefined without a finite coupling rate.
    """
