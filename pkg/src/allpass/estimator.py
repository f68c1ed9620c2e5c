"""Scikit-learn style estimator that fits the all-pass model to an S21 trace.

The free parameters are the feedline phase delay ``phi`` and the net
resonator-resonator coupling ``g_total``; a real package-loss amplitude is
solved in closed form for every trial point. Everything else (resonator
frequency and linewidth, qubit parameters) is held fixed.

A single-state trace does not pin down which mode is which: swapping the
(frequency, linewidth) pairs of the even and odd modes leaves S21
unchanged, and a mirrored (phi, g_total) nearly reproduces that swap. The
mirrored coupling depends on the qubit state, so traces taken with the
qubit in several states resolve it. ``X`` may therefore carry a second
column holding the qubit state of each point.

Example
-------
>>> fitter = AllPassFitter.from_model(AllPassModel())        # doctest: +SKIP
>>> fitter.fit(freq, s21).phi_, fitter.g_total_               # doctest: +SKIP
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy.optimize import minimize
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_frequency_grid, check_qubit_state, check_trace
from .cmt import mode_linewidths, s21_two_mode
from .device import AllPassModel, ModePair, TransmonSpec
from .exceptions import BoundsError, FitError
from .transmon import MAX_LEVELS, eigenmodes_for_state

MIN_POINTS = 10


@dataclass(frozen=True)
class FitResult:
    phi: float
    g_total: float
    loss_db: float
    residual: float

    def to_json_dict(self):
        d = asdict(self)
        return {
            "phi_rad": d["phi"],
            "g_total_mhz": d["g_total"],
            "loss_db": d["loss_db"],
            "residual": d["residual"],
        }


class AllPassFitter(BaseEstimator):
    """Least-squares fit of (phi, g_total) with a profiled package loss.

    Multi-start Nelder-Mead: a ``n_grid x n_grid`` lattice of starting
    points inside the bounds (plus ``init`` when given). The best converged
    start wins; ties go to the smaller ``phi``.

    Parameters
    ----------
    omega_r, kappa_r, g : float
        Fixed resonator frequency, linewidth and qubit coupling (MHz).
    omega_01, e_c : float
        Bare qubit frequency and charging energy (MHz). ``omega_01=None``
        uses the fitted device's bare frequency.
    qubit_state : int
        Transmon state used when ``X`` has a single (frequency) column.
    phi_bounds : (float, float)
        Search interval for phi in radians.
    g_total_bounds : (float, float) or None
        Search interval for g_total; ``None`` means (-kappa_r, kappa_r).
    init : (float, float) or None
        Extra starting point (phi, g_total).
    n_grid : int
        Starting lattice size per parameter.
    max_evals : int
        Objective evaluations allowed per start.
    fatol, xatol : float
        Nelder-Mead stopping tolerances on objective and parameters.
    counter_rotating : bool
        Passed to the transmon Hamiltonian.
    n_jobs : int
        Threads used to run the starts; the result does not depend on it.
    """

    def __init__(self, omega_r=7756.4, kappa_r=14.5, g=93.4, omega_01=None,
                 e_c=201.0, qubit_state=0, phi_bounds=(math.pi, 2 * math.pi),
                 g_total_bounds=None, init=None, n_grid=5, max_evals=10_000, fatol=1e-10,
                 xatol=1e-9, counter_rotating=False, n_jobs=1):
        self.omega_r = omega_r
        self.kappa_r = kappa_r
        self.g = g
        self.omega_01 = omega_01
        self.e_c = e_c
        self.qubit_state = qubit_state
        self.phi_bounds = phi_bounds
        self.g_total_bounds = g_total_bounds
        self.init = init
        self.n_grid = n_grid
        self.max_evals = max_evals
        self.fatol = fatol
        self.xatol = xatol
        self.counter_rotating = counter_rotating
        self.n_jobs = n_jobs

    @classmethod
    def from_model(cls, model, **kwargs):
        tr = model.transmon
        return cls(omega_r=model.omega_r, kappa_r=model.kappa_r, g=model.g,
                   omega_01=tr.omega_01, e_c=tr.e_c, counter_rotating=tr.counter_rotating,
                   **kwargs)

    # -- model evaluation ---------------------------------------------------

    def _base_model(self):
        transmon = TransmonSpec(e_c=self.e_c, counter_rotating=self.counter_rotating)
        if self.omega_01 is not None:
            transmon = replace(transmon, omega_01=float(self.omega_01))
        return AllPassModel(omega_r=self.omega_r, kappa_r=self.kappa_r, g=self.g,
                            transmon=transmon, package_loss_db=0.0)

    def _split(self, X, y=None):
        """Validate ``X`` (and ``y``) into per-state groups ``[(state, idx, freq)]``."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 2 and X.shape[1] == 2:
            freq_all, states = X[:, 0], X[:, 1]
            if not np.all(np.isfinite(states)) or np.any(states != np.round(states)):
                raise ValueError("qubit-state column must hold integers")
            states = states.astype(int)
        else:
            freq_all = check_frequency_grid(X, "X")
            states = np.full(freq_all.size, int(self.qubit_state))
        if y is not None:
            _, y = check_trace(np.arange(freq_all.size, dtype=float), y)
        groups = []
        for st in np.unique(states):
            check_qubit_state(int(st), MAX_LEVELS)
            idx = np.flatnonzero(states == st)
            groups.append((int(st), idx, check_frequency_grid(freq_all[idx], "X")))
        return groups, y, freq_all.size

    def _lossless_s21(self, base, groups, n, phi, g_total):
        kappa_e, kappa_o = mode_linewidths(self.kappa_r, phi)
        model = replace(base, g_total=float(g_total))
        out = np.empty(n, dtype=complex)
        for st, idx, freq in groups:
            freqs = eigenmodes_for_state(model, st)
            modes = ModePair(freqs.omega_e, freqs.omega_o, max(kappa_e, 0.0), max(kappa_o, 0.0))
            out[idx] = s21_two_mode(freq, modes)
        return out

    @staticmethod
    def _profile_amplitude(model_s21, data):
        """Best real amplitude in (0, 1] scaling ``model_s21`` onto ``data``."""
        num = float(np.real(np.vdot(model_s21, data)))
        den = float(np.real(np.vdot(model_s21, model_s21)))
        if den <= 0.0:
            return 1.0
        return float(np.clip(num / den, 1e-12, 1.0))

    @staticmethod
    def _rms(r):
        return float(np.sqrt(np.mean(r.real ** 2 + r.imag ** 2)))

    # -- fitting ------------------------------------------------------------

    def _checked_bounds(self):
        phi_lo, phi_hi = map(float, self.phi_bounds)
        if self.g_total_bounds is None:
            g_lo, g_hi = -float(self.kappa_r), float(self.kappa_r)
        else:
            g_lo, g_hi = map(float, self.g_total_bounds)
        if not (0.0 <= phi_lo < phi_hi <= 2 * math.pi):
            raise BoundsError(f"phi_bounds must satisfy 0 <= lo < hi <= 2 pi, got {self.phi_bounds}")
        if not g_lo < g_hi:
            raise BoundsError(f"g_total_bounds must satisfy lo < hi, got {(g_lo, g_hi)}")
        return (phi_lo, phi_hi), (g_lo, g_hi)

    def _starts(self, bounds):
        (p_lo, p_hi), (g_lo, g_hi) = bounds
        frac = (np.arange(self.n_grid) + 0.5) / self.n_grid
        starts = [(p_lo + a * (p_hi - p_lo), g_lo + b * (g_hi - g_lo)) for a in frac for b in frac]
        if self.init is not None:
            p0, g0 = map(float, self.init)
            if not (p_lo <= p0 <= p_hi and g_lo <= g0 <= g_hi):
                raise BoundsError(f"init {self.init} lies outside the bounds")
            starts.insert(0, (p0, g0))
        return starts

    def fit(self, X, y):
        """Fit to complex transmission ``y``.

        ``X`` is either a frequency grid (MHz) or an ``(n, 2)`` array of
        (frequency, qubit state); frequencies must increase within each state.
        """
        groups, data, n = self._split(X, y)
        if n < MIN_POINTS:
            raise FitError(f"need at least {MIN_POINTS} points, got {n}")
        bounds = self._checked_bounds()
        base = self._base_model()
        (p_lo, p_hi), (g_lo, g_hi) = bounds
        step = (0.1 * (p_hi - p_lo) / self.n_grid, 0.1 * (g_hi - g_lo) / self.n_grid)

        def objective(x):
            m = self._lossless_s21(base, groups, n, x[0], x[1])
            amp = self._profile_amplitude(m, data)
            return self._rms(data - amp * m)

        def run(x0):
            x0 = np.asarray(x0, dtype=float)
            simplex = np.array([x0, x0 + [step[0], 0.0], x0 + [0.0, step[1]]])
            simplex[:, 0] = np.clip(simplex[:, 0], p_lo, p_hi)
            simplex[:, 1] = np.clip(simplex[:, 1], g_lo, g_hi)
            return minimize(objective, x0, method="Nelder-Mead", bounds=bounds,
                            options={"maxfev": int(self.max_evals), "fatol": self.fatol,
                                     "xatol": self.xatol, "initial_simplex": simplex})

        starts = self._starts(bounds)
        if self.n_jobs == 1:
            results = [run(s) for s in starts]
        else:
            with ThreadPoolExecutor(max_workers=self.n_jobs) as pool:
                results = list(pool.map(run, starts))

        converged = [r for r in results if r.success]
        if not converged:
            raise FitError(f"no start converged within {self.max_evals} evaluations")
        best = min(converged, key=lambda r: (float(r.fun), float(r.x[0])))
        phi, g_total = float(best.x[0]), float(best.x[1])

        m = self._lossless_s21(base, groups, n, phi, g_total)
        amp = self._profile_amplitude(m, data)
        residual = self._rms(data - amp * m)

        # a trace without a resonance must not yield a confident fit
        flat_amp = float(np.clip(np.mean(data.real), 1e-12, 1.0))
        flat_residual = self._rms(data - flat_amp)
        if residual >= (1.0 - 1e-3) * flat_residual:
            raise FitError(
                f"resonant model (rms {residual:.3g}) does not beat a flat line "
                f"(rms {flat_residual:.3g}); the trace carries no resonance information"
            )

        self.phi_ = phi
        self.g_total_ = g_total
        self.amplitude_ = amp
        self.loss_db_ = 0.0 - 20.0 * math.log10(amp)  # 0.0 - avoids "-0.0"
        self.residual_ = residual
        self.n_converged_ = len(converged)
        self.result_ = FitResult(phi=phi, g_total=g_total, loss_db=self.loss_db_,
                                 residual=residual)
        return self

    def predict(self, X):
        """Complex S21 of the fitted model, including the fitted loss."""
        check_is_fitted(self, "result_")
        groups, _, n = self._split(X)
        return self.amplitude_ * self._lossless_s21(self._base_model(), groups, n, self.phi_,
                                                    self.g_total_)

    def score(self, X, y):
        """Negative rms complex residual (higher is better)."""
        _, data, _ = self._split(X, y)
        return -self._rms(data - self.predict(X))

    def to_model(self):
        """AllPassModel carrying the fitted parameters."""
        check_is_fitted(self, "result_")
        return replace(self._base_model(), phi=self.phi_, g_total=self.g_total_,
                       package_loss_db=self.loss_db_)
