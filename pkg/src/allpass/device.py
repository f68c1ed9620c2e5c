"""Parameter containers describing the two-resonator + transmon device.

Defaults reproduce the fitted device: bare resonators at 7756.4 MHz with
14.5 MHz linewidth, phase delay 1.55 pi, resonator-resonator coupling
-5.1 MHz, qubit-resonator coupling 93.4 MHz and E_C = 201 MHz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._validation import check_frequency_grid, check_positive
from .exceptions import DomainError

FITTED_OMEGA_R = 7756.4
FITTED_KAPPA_R = 14.5
FITTED_PHI = 1.55 * math.pi
FITTED_G_TOTAL = -5.1
FITTED_G = 93.4
FITTED_E_C = 201.0
FITTED_DRESSED_QUBIT = 6086.0
FITTED_PACKAGE_LOSS_DB = 0.28
FITTED_E_J_GHZ = 19.3
READOUT_FREQUENCY = 7760.2


def bare_qubit_frequency(dressed, omega_r, g):
    """Invert ``dressed = w01 + 2 g^2 / (w01 - omega_r)`` for the bare w01.

    Picks the branch that tends to ``dressed`` as ``g -> 0``.
    """
    d0 = float(dressed) - float(omega_r)
    disc = d0 * d0 - 8.0 * g * g
    if d0 == 0.0 or disc < 0.0:
        raise DomainError(
            f"no dispersive-branch bare frequency for dressed={dressed}, omega_r={omega_r}, g={g}"
        )
    delta = 0.5 * (d0 + math.copysign(math.sqrt(disc), d0))
    return float(omega_r) + delta


@dataclass(frozen=True)
class TransmonSpec:
    """Transmon parameters and the starting Fock truncation.

    ``omega_01`` is the bare 0-1 frequency in MHz. ``counter_rotating``
    keeps the (a^dag a^dag, a a) pieces of the x-x couplings; the default
    is the excitation-conserving form, which reproduces the fitted device.
    """

    omega_01: float = field(
        default_factory=lambda: bare_qubit_frequency(FITTED_DRESSED_QUBIT, FITTED_OMEGA_R, FITTED_G)
    )
    e_c: float = FITTED_E_C
    n_levels_qubit: int = 4
    n_levels_res: int = 4
    counter_rotating: bool = False

    def __post_init__(self):
        check_positive(self.omega_01, "omega_01")
        check_positive(self.e_c, "e_c")
        for name in ("n_levels_qubit", "n_levels_res"):
            if int(getattr(self, name)) < 2:
                raise DomainError(f"{name} must be >= 2")


@dataclass(frozen=True)
class SquidSpec:
    """Symmetric-SQUID transmon: single-junction E_J (GHz), E_C (MHz), flux (Phi/Phi0)."""

    e_j_max: float = FITTED_E_J_GHZ
    e_c: float = FITTED_E_C
    flux: float = 0.291

    def __post_init__(self):
        check_positive(self.e_j_max, "e_j_max")
        check_positive(self.e_c, "e_c")
        if not np.isfinite(self.flux):
            raise DomainError("flux must be finite")


@dataclass(frozen=True)
class AllPassModel:
    """Two identical resonators on a feedline, symmetrically coupled to a transmon.

    Attributes
    ----------
    omega_r : bare resonator frequency (MHz)
    kappa_r : single-resonator coupling linewidth to the feedline (MHz)
    phi : feedline phase delay between the coupling points, 2 pi d / lambda_r (rad)
    g_total : signed net resonator-resonator coupling, direct + waveguide (MHz)
    g : qubit-resonator coupling (MHz)
    transmon : TransmonSpec
    package_loss_db : frequency-independent insertion loss (dB, >= 0)
    """

    omega_r: float = FITTED_OMEGA_R
    kappa_r: float = FITTED_KAPPA_R
    phi: float = FITTED_PHI
    g_total: float = FITTED_G_TOTAL
    g: float = FITTED_G
    transmon: TransmonSpec = field(default_factory=TransmonSpec)
    package_loss_db: float = FITTED_PACKAGE_LOSS_DB

    def __post_init__(self):
        check_positive(self.omega_r, "omega_r")
        check_positive(self.kappa_r, "kappa_r")
        if not 0.0 < self.phi <= 2.0 * math.pi:
            raise DomainError(f"phi must lie in (0, 2 pi], got {self.phi!r}")
        check_positive(self.package_loss_db, "package_loss_db", allow_zero=True)
        if not (np.isfinite(self.g_total) and np.isfinite(self.g)):
            raise DomainError("couplings must be finite")

    @property
    def detuning(self):
        """Bare qubit-resonator detuning omega_01 - omega_r (MHz)."""
        return self.transmon.omega_01 - self.omega_r

    def with_params(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class ModePair:
    omega_e: float
    omega_o: float
    kappa_e: float
    kappa_o: float

    def __post_init__(self):
        if self.kappa_e < 0 or self.kappa_o < 0:
            raise DomainError("mode linewidths must be non-negative")


@dataclass(frozen=True)
class SParamTrace:
    """Transmission (and optionally reflection) sampled on a frequency grid in MHz."""

    freq: np.ndarray
    s21: np.ndarray
    s11: np.ndarray | None = None

    def __post_init__(self):
        freq = check_frequency_grid(self.freq)
        s21 = np.asarray(self.s21, dtype=complex)
        if s21.shape != freq.shape:
            raise DomainError("s21 and freq must have equal lengths")
        object.__setattr__(self, "freq", freq)
        object.__setattr__(self, "s21", s21)
        if self.s11 is not None:
            s11 = np.asarray(self.s11, dtype=complex)
            if s11.shape != freq.shape:
                raise DomainError("s11 and freq must have equal lengths")
            object.__setattr__(self, "s11", s11)

    def __len__(self):
        return self.freq.shape[0]

    @property
    def s21_db(self):
        return 20.0 * np.log10(np.abs(self.s21))

    @property
    def s21_phase_deg(self):
        """Unwrapped phase folded into [0, 360)."""
        return np.mod(np.degrees(np.unwrap(np.angle(self.s21))), 360.0)
