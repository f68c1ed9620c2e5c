"""Modeling toolkit for an all-pass (even/odd mode) readout resonator pair.

Submodules
----------
netphys   standing-wave linewidths and impedance-mismatch spread
cmt       coupled-mode S-parameters of the two-mode resonator
transmon  Fock-basis eigenmodes, dispersive closed forms, SQUID flux map
yieldmc   Monte Carlo fabrication yield
metrics   readout figures of merit and model fitting
cli       command-line front end
"""

from .cmt import mode_linewidths, s11_two_mode, s21_trace, s21_two_mode, waveguide_coupling
from .device import AllPassModel, ModePair, SParamTrace, SquidSpec, TransmonSpec
from .estimator import AllPassFitter, FitResult
from .exceptions import (
    AllPassError,
    BoundsError,
    DomainError,
    FitError,
    HamiltonianSizeError,
    LabelingAmbiguityError,
    NoRootError,
    NonConvergenceError,
    SingularConfigurationError,
    StraddlingRegimeError,
)
from .metrics import (
    assignment_fidelity,
    fit_model,
    purcell_rate,
    purcell_t1,
    s21_at_operating_point,
)
from .netphys import (
    effective_linewidth_general,
    kappa_vs_position,
    reflection_from_db,
    spread_intentional_mismatch,
    spread_no_mismatch,
    vswr,
)
from .transmon import (
    allpass_flux_point,
    dispersive_chi,
    dispersive_estimate,
    dispersive_numeric,
    eigenmodes_for_state,
    even_mode_pull,
    qubit_freq_from_flux,
)
from .yieldmc import YieldConfig, yield_curve, yield_probability

__version__ = "0.1.0"

__all__ = [
    "AllPassError",
    "AllPassFitter",
    "AllPassModel",
    "BoundsError",
    "DomainError",
    "FitError",
    "FitResult",
    "HamiltonianSizeError",
    "LabelingAmbiguityError",
    "ModePair",
    "NoRootError",
    "NonConvergenceError",
    "SParamTrace",
    "SingularConfigurationError",
    "SquidSpec",
    "StraddlingRegimeError",
    "TransmonSpec",
    "YieldConfig",
    "allpass_flux_point",
    "assignment_fidelity",
    "dispersive_chi",
    "dispersive_estimate",
    "dispersive_numeric",
    "effective_linewidth_general",
    "eigenmodes_for_state",
    "even_mode_pull",
    "fit_model",
    "kappa_vs_position",
    "mode_linewidths",
    "purcell_rate",
    "purcell_t1",
    "qubit_freq_from_flux",
    "reflection_from_db",
    "s11_two_mode",
    "s21_at_operating_point",
    "s21_trace",
    "s21_two_mode",
    "spread_intentional_mismatch",
    "spread_no_mismatch",
    "vswr",
    "waveguide_coupling",
    "yield_curve",
    "yield_probability",
]
