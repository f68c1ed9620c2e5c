"""Input validation helpers shared by the public functions and estimators."""

from __future__ import annotations

import numbers

import numpy as np

from .exceptions import DomainError


def check_positive(value, name, *, allow_zero=False):
    if not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise DomainError(f"{name} must be a finite real number, got {value!r}")
    if value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise DomainError(f"{name} must be {bound}, got {value!r}")
    return float(value)


def check_probability(value, name):
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")
    return value


def check_reflection(gamma, name="gamma"):
    """Return ``gamma`` as a complex number, rejecting active terminations."""
    gamma = complex(gamma)
    if not (np.isfinite(gamma.real) and np.isfinite(gamma.imag)):
        raise DomainError(f"{name} must be finite, got {gamma!r}")
    # small slack so e.g. exp(-2j*theta) with |.|=1 in floating point passes
    if abs(gamma) > 1.0 + 1e-12:
        raise DomainError(f"|{name}| must be <= 1 for a passive termination, got {abs(gamma)!r}")
    return gamma


def check_frequency_grid(freq, name="freq"):
    """Validate a 1-D, finite, strictly increasing frequency grid (MHz)."""
    freq = np.asarray(freq, dtype=float)
    if freq.ndim == 2 and freq.shape[1] == 1:
        freq = freq[:, 0]
    if freq.ndim != 1 or freq.size == 0:
        raise DomainError(f"{name} must be a non-empty 1-D array")
    if not np.all(np.isfinite(freq)):
        raise DomainError(f"{name} contains non-finite values")
    if freq.size > 1 and np.any(np.diff(freq) <= 0):
        raise DomainError(f"{name} must be strictly increasing")
    return freq


def check_trace(freq, s21):
    """Validate a transmission trace and return ``(freq, s21)`` as arrays."""
    freq = check_frequency_grid(freq)
    s21 = np.asarray(s21, dtype=complex)
    if s21.ndim != 1 or s21.shape[0] != freq.shape[0]:
        raise DomainError(
            f"s21 must be 1-D with the same length as freq ({freq.shape[0]}), got shape {s21.shape}"
        )
    if not np.all(np.isfinite(s21)):
        raise DomainError("s21 contains non-finite values")
    return freq, s21


def check_qubit_state(state, n_levels):
    if not isinstance(state, numbers.Integral) or state < 0:
        raise DomainError(f"qubit_state must be a non-negative integer, got {state!r}")
    if state >= n_levels - 1:
        # the single-photon manifold on top of |state> needs level state+1
        raise DomainError(
            f"qubit_state={state} needs at least {state + 2} transmon levels, have {n_levels}"
        )
    return int(state)
