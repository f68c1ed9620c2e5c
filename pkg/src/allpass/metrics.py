"""Readout figures of merit and fitting the analytic model to measured traces."""

from __future__ import annotations

import math

from ._validation import check_positive, check_probability
from .estimator import AllPassFitter, FitResult
from .exceptions import DomainError

__all__ = [
    "FitResult",
    "assignment_fidelity",
    "fit_model",
    "purcell_rate",
    "purcell_t1",
    "s21_at_operating_point",
]


def s21_at_operating_point(chi01, kappa_r):
    """Transmission at the readout tone between the two qubit-state responses.

    Returns ``(|S21|, phase_diff)``: the magnitude is the same for both
    states, ``(k/2) / sqrt((k/2)^2 + (2 chi)^2)``, and the excited-minus-ground
    phase difference is ``2 atan(4 chi / k)``.
    """
    kappa_r = check_positive(kappa_r, "kappa_r")
    half = 0.5 * kappa_r
    mag = half / math.hypot(half, 2.0 * chi01)
    return mag, 2.0 * math.atan(4.0 * chi01 / kappa_r)


def purcell_rate(kappa_e, g, delta):
    """Unfiltered Purcell decay rate kappa_e * 2 g^2 / Delta^2 (linear MHz)."""
    if delta == 0:
        raise DomainError("detuning must be nonzero")
    return kappa_e * 2.0 * g * g / (delta * delta)


def purcell_t1(kappa_e, g, delta):
    """Purcell-limited lifetime in microseconds; +inf when the rate vanishes."""
    rate = purcell_rate(kappa_e, g, delta)
    if rate == 0:
        return math.inf
    # linear MHz -> angular s^-1 is 2 pi 1e6; T1 in us = 1e6 / that
    return 1.0 / (2.0 * math.pi * abs(rate))


def assignment_fidelity(p01, p10):
    """F = 1 - (P(0|1) + P(1|0)) / 2."""
    p01 = check_probability(p01, "P(0|1)")
    p10 = check_probability(p10, "P(1|0)")
    return 1.0 - 0.5 * (p01 + p10)


def fit_model(trace, fixed, bounds=None, init=None, *, qubit_state=0, **options):
    """Fit phi, g_total and package loss of ``fixed`` to a measured trace.

    ``fixed`` supplies every other device parameter; its own phi, g_total
    and package loss are ignored. ``bounds`` is ``((phi_lo, phi_hi),
    (g_lo, g_hi))``; extra keyword options go to :class:`AllPassFitter`.
    """
    kwargs = dict(options)
    if bounds is not None:
        kwargs["phi_bounds"], kwargs["g_total_bounds"] = bounds
    fitter = AllPassFitter.from_model(fixed, qubit_state=qubit_state, init=init, **kwargs)
    fitter.fit(trace.freq, trace.s21)
    return fitter.result_
