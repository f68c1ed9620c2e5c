"""Exception types raised by the allpass package."""


class AllPassError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(AllPassError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class SingularConfigurationError(AllPassError, ValueError):
    """The feedline terminations form a lossless cavity (1 - G1*G2 ~ 0)."""


class StraddlingRegimeError(DomainError):
    """Qubit-resonator detuning sits on a pole of the dispersive formulas."""


class HamiltonianSizeError(AllPassError, ValueError):
    """Requested Fock truncation exceeds the configured dimension cap."""


class NonConvergenceError(AllPassError, RuntimeError):
    """An iterative procedure hit its cap before meeting its tolerance."""


class LabelingAmbiguityError(AllPassError, RuntimeError):
    """Eigenstates could not be assigned to bare states with enough margin."""


class NoRootError(AllPassError, ValueError):
    """A root-finding residual never changes sign on the search interval."""


class FitError(AllPassError, RuntimeError):
    """The model fit failed to converge or the data carry no information."""


class BoundsError(AllPassError, ValueError):
    """Fit bounds or initial guesses are malformed or inconsistent."""
