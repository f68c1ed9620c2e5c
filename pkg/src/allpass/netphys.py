"""Effective linewidth of a hanger resonator on a feedline with mismatched ends.

A single resonator mode sits at a symmetric T-junction; the feedline is
terminated by reflection coefficients ``gamma1`` (left/input side) and
``gamma2`` (right/output side). Standing waves between the two terminations
renormalize the resonator's decay rate and frequency.

All frequencies and linewidths are linear frequencies in MHz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_positive, check_reflection
from .exceptions import DomainError, SingularConfigurationError

SINGULARITY_GUARD = 1e-12


@dataclass(frozen=True)
class ReflectionCoefficient:
    """Complex reflection coefficient of a passive feedline termination."""

    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", check_reflection(self.value, "reflection coefficient"))

    @classmethod
    def from_db(cls, magnitude_db, phase=0.0):
        """Build from a magnitude in dB (``20 log10 |G|``) and a phase in radians."""
        return cls(reflection_from_db(magnitude_db, phase))

    def __complex__(self):
        return self.value


@dataclass(frozen=True)
class LinewidthResult:
    kappa_eff: float
    omega_eff: float


@dataclass(frozen=True)
class PositionSpec:
    """Resonator position along a feedline measured from the input mismatch.

    ``x_over_half_lambda`` is the distance in units of half a resonator
    wavelength; ``eps_ratio_sqrt`` is sqrt(eps_eff,feed / eps_eff,res).
    """

    x_over_half_lambda: float
    eps_ratio_sqrt: float = 1.0

    def __post_init__(self):
        check_positive(self.x_over_half_lambda, "x_over_half_lambda", allow_zero=True)
        check_positive(self.eps_ratio_sqrt, "eps_ratio_sqrt")


def reflection_from_db(magnitude_db, phase=0.0):
    """Complex reflection coefficient from ``|G|`` in dB and phase in radians."""
    magnitude = 10.0 ** (float(magnitude_db) / 20.0)
    return complex(magnitude * np.exp(1j * float(phase)))


def _as_complex(gamma, name):
    if isinstance(gamma, ReflectionCoefficient):
        return gamma.value
    return check_reflection(gamma, name)


def effective_linewidth_general(kappa_r, omega_r, gamma1, gamma2):
    """Effective linewidth and frequency for arbitrary end reflections.

    Parameters
    ----------
    kappa_r : float
        Bare coupling linewidth into a matched feedline (MHz).
    omega_r : float
        Bare resonator frequency (MHz).
    gamma1, gamma2 : complex or ReflectionCoefficient
        Reflection coefficients seen looking left and right from the junction.

    Returns
    -------
    LinewidthResult
    """
    kappa_r = check_positive(kappa_r, "kappa_r")
    g1 = _as_complex(gamma1, "gamma1")
    g2 = _as_complex(gamma2, "gamma2")
    denom = 1.0 - g1 * g2
    if abs(denom) < SINGULARITY_GUARD:
        raise SingularConfigurationError(
            f"|1 - G1*G2| = {abs(denom):.3g}: the feedline section forms a lossless cavity"
        )
    kappa_eff = 0.5 * kappa_r * ((1 + g1) * (1 + g2) / denom).real
    shift = 0.25 * kappa_r * ((1 - g1 - g2 - 3 * g1 * g2) / denom).imag
    return LinewidthResult(kappa_eff=float(kappa_eff), omega_eff=float(omega_r + shift))


def _check_gamma_mag(gamma_out_mag):
    gamma_out_mag = float(gamma_out_mag)
    if not 0.0 <= gamma_out_mag < 1.0:
        raise DomainError(f"|Gamma_out| must lie in [0, 1), got {gamma_out_mag!r}")
    return gamma_out_mag


def vswr(gamma_out_mag):
    """Voltage standing wave ratio ``(1 + |G|) / (1 - |G|)``."""
    g = _check_gamma_mag(gamma_out_mag)
    return (1.0 + g) / (1.0 - g)


def spread_intentional_mismatch(gamma_out_mag):
    """kappa_max / kappa_min with a fully reflecting input (VSWR squared)."""
    return vswr(gamma_out_mag) ** 2


def spread_no_mismatch(gamma_out_mag):
    """kappa_max / kappa_min with a matched input (VSWR)."""
    return vswr(gamma_out_mag)


def kappa_vs_position(kappa_r0, pos):
    """Fabricated linewidth of a resonator a distance x behind a total reflector.

    The standing wave set up by the input mismatch modulates the coupling as
    ``kappa_r0 * (cos(2 pi x/(lambda/2) * sqrt(eps_feed/eps_res)) + 1) / 2``;
    with no permittivity error the maxima sit at integer multiples of lambda/2.
    """
    kappa_r0 = check_positive(kappa_r0, "kappa_r0")
    phase = 2.0 * math.pi * pos.x_over_half_lambda * pos.eps_ratio_sqrt
    return kappa_r0 * (0.5 * math.cos(phase) + 0.5)
