"""Exception hierarchy shared by every laxlab module."""


class LaxLabError(Exception):
    """Base class for all laxlab errors."""


class CollisionError(LaxLabError):
    """Two particle coordinates came closer than the collision guard."""

    def __init__(self, i, j, separation, t=None):
        self.pair = (int(i), int(j))
        self.separation = float(separation)
        self.t = t
        where = "" if t is None else f" at t={t!r}"
        super().__init__(
            f"particles {self.pair[0]} and {self.pair[1]} separated by "
            f"{self.separation:.3e}{where}"
        )


class PoleError(LaxLabError):
    """An interaction or Lax entry was evaluated too close to a pole."""


class UnsupportedFamilyError(LaxLabError):
    """The requested operation is not defined for this system family."""


class ConvergenceError(LaxLabError):
    """An iterative kernel (QR eigenvalues) hit its iteration cap."""


class MatrixOverflowError(LaxLabError):
    """A matrix function overflowed to a non-finite result."""


class IntegrationError(LaxLabError):
    """The ODE integrator could not continue (step-size underflow)."""


class BranchAmbiguityError(LaxLabError):
    """Logarithm unwrapping could not decide a branch unambiguously."""


class ConfigError(LaxLabError):
    """A run configuration failed validation."""
