"""Coupled-mode S-parameters of an even/odd-mode (all-pass) resonator.

An even mode couples in phase to forward and backward waves on the feedline,
an odd mode out of phase. Driving from port 1 with port 2 matched::

    S21 = 1 - (ke/2) / (j(w - we) + ke/2) - (ko/2) / (j(w - wo) + ko/2)
    S11 =   - (ke/2) / (j(w - we) + ke/2) + (ko/2) / (j(w - wo) + ko/2)

When the two modes are degenerate (same frequency and linewidth) the
transmission magnitude is one at every frequency.
"""

from __future__ import annotations

import math

import numpy as np

from ._validation import check_frequency_grid, check_positive
from .device import AllPassModel, ModePair, SParamTrace
from .transmon import eigenmodes_for_state

__all__ = [
    "AllPassModel",
    "ModePair",
    "SParamTrace",
    "mode_linewidths",
    "modes_for_state",
    "s11_two_mode",
    "s21_trace",
    "s21_two_mode",
    "waveguide_coupling",
]


def _lorentz(omega, center, kappa):
    # kappa == 0: mode decoupled, contributes nothing (even on resonance)
    half = 0.5 * kappa
    if half == 0:
        return np.zeros_like(omega, dtype=complex)
    return half / (1j * (omega - center) + half)


def s21_two_mode(omega, modes):
    """Transmission past the two-mode resonator; ``omega`` may be an array (MHz)."""
    w = np.asarray(omega, dtype=float)
    s = 1.0 - _lorentz(w, modes.omega_e, modes.kappa_e) - _lorentz(w, modes.omega_o, modes.kappa_o)
    return s if np.ndim(s) else complex(s)


def s11_two_mode(omega, modes):
    """Reflection back into port 1 of the two-mode resonator."""
    w = np.asarray(omega, dtype=float)
    s = -_lorentz(w, modes.omega_e, modes.kappa_e) + _lorentz(w, modes.omega_o, modes.kappa_o)
    return s if np.ndim(s) else complex(s)


def mode_linewidths(kappa_r, phi):
    """(kappa_e, kappa_o) = kappa_r (1 +/- cos phi) for resonators phi apart on the feedline."""
    c = math.cos(phi)
    return kappa_r * (1.0 + c), kappa_r * (1.0 - c)


def waveguide_coupling(kappa_r, phi):
    """Feedline-mediated resonator-resonator coupling g_w = (kappa_r/2) sin phi (signed)."""
    return 0.5 * kappa_r * math.sin(phi)


def modes_for_state(model, qubit_state):
    """ModePair for ``model`` with the transmon in ``qubit_state``."""
    kappa_e, kappa_o = mode_linewidths(model.kappa_r, model.phi)
    freqs = eigenmodes_for_state(model, qubit_state)
    return ModePair(freqs.omega_e, freqs.omega_o, max(kappa_e, 0.0), max(kappa_o, 0.0))


def s21_trace(model, qubit_state, freq_grid, *, include_package_loss=True, with_s11=False):
    """Transmission of the device over ``freq_grid`` (MHz) for one qubit state.

    Mode frequencies come from diagonalizing the full Hamiltonian; the
    package loss is a frequency-independent amplitude factor.
    """
    freq = check_frequency_grid(freq_grid, "freq_grid")
    check_positive(model.kappa_r, "kappa_r")
    modes = modes_for_state(model, qubit_state)
    loss_db = model.package_loss_db if include_package_loss else 0.0
    amplitude = 10.0 ** (-loss_db / 20.0)
    s21 = amplitude * s21_two_mode(freq, modes)
    s11 = s11_two_mode(freq, modes) if with_s11 else None
    return SParamTrace(freq=freq, s21=s21, s11=s11)
