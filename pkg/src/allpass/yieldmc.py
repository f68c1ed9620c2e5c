"""Monte Carlo yield of resonator linewidths behind an intentional mismatch.

Each resonator's sqrt(eps_feed/eps_res) is drawn from Normal(1, sigma_rel)
and pushed through the standing-wave linewidth formula. A trial passes when
every resonator's linewidth lies within ``tolerance_rel`` of the population
mean at its position.

Randomness is counter based: trial ``t`` draws from a Philox stream keyed by
the seed with ``t`` in the high counter word, so any split of trials across
threads reproduces the same numbers.
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError
from .netphys import spread_intentional_mismatch, spread_no_mismatch

CALIBRATION_SEED = 0x5EED_CA11B
CALIBRATION_DRAWS = 1_000_000
_CHUNK = 4096


@dataclass(frozen=True)
class YieldConfig:
    sigma_rel: float = 0.015
    tolerance_rel: float = 0.30
    n_resonators: int = 16
    resonators_per_half_lambda: int = 2
    trials: int = 100_000
    seed: int = 2024

    def __post_init__(self):
        if not self.sigma_rel >= 0:
            raise DomainError("sigma_rel must be >= 0")
        if not 0 < self.tolerance_rel < 1:
            raise DomainError("tolerance_rel must lie in (0, 1)")
        if self.n_resonators < 1 or self.resonators_per_half_lambda < 1:
            raise DomainError("resonator counts must be >= 1")
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class YieldResult:
    p_all_within: float
    per_resonator_kappa_samples: np.ndarray | None = None


def trial_generator(seed, trial):
    """Independent Generator for one trial, derived from (seed, trial) only."""
    return np.random.Generator(np.random.Philox(key=int(seed), counter=[0, 0, 0, int(trial)]))


def _draw_block(seed, start, stop, n):
    out = np.empty((stop - start, n))
    for row, t in enumerate(range(start, stop)):
        out[row] = trial_generator(seed, t).standard_normal(n)
    return out


def standard_normal_trials(seed, trials, n, *, n_jobs=1):
    """(trials x n) matrix of N(0, 1) draws; row t comes from trial stream t."""
    bounds = [(s, min(s + _CHUNK, trials)) for s in range(0, trials, _CHUNK)]
    if n_jobs == 1 or len(bounds) == 1:
        blocks = [_draw_block(seed, a, b, n) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            blocks = list(pool.map(lambda ab: _draw_block(seed, ab[0], ab[1], n), bounds))
    return np.concatenate(blocks, axis=0)


def relative_kappa(x_over_half_lambda, eps_ratio_sqrt):
    """Vectorized kappa/kappa_r0 at distance x (units of lambda/2)."""
    return 0.5 * np.cos(2.0 * np.pi * x_over_half_lambda * eps_ratio_sqrt) + 0.5


def kappa_samples_at_position(x_over_half_lambda, sigma_rel, trials, seed, *, n_jobs=1):
    """Monte Carlo draws of kappa/kappa_r0 for one resonator at ``x_over_half_lambda``."""
    if trials < 1:
        raise DomainError("trials must be >= 1")
    z = standard_normal_trials(seed, trials, 1, n_jobs=n_jobs)[:, 0]
    return relative_kappa(x_over_half_lambda, 1.0 + sigma_rel * z)


def resonator_positions(n_resonators, per_half_lambda=2):
    """Position of resonator i (1-based) in units of lambda/2: ceil(i / per_half_lambda)."""
    i = np.arange(1, n_resonators + 1)
    return np.ceil(i / per_half_lambda)


@functools.lru_cache(maxsize=1)
def _calibration_normals():
    rng = np.random.Generator(np.random.Philox(key=CALIBRATION_SEED))
    return rng.standard_normal(CALIBRATION_DRAWS)


@functools.lru_cache(maxsize=4096)
def mean_kappa(x_over_half_lambda, sigma_rel):
    """Population mean of kappa/kappa_r0 at one position from a fixed calibration run."""
    z = _calibration_normals()
    return float(np.mean(relative_kappa(x_over_half_lambda, 1.0 + sigma_rel * z)))


def mean_kappa_closed_form(x_over_half_lambda, sigma_rel):
    """E[kappa/kappa_r0] for Gaussian errors: (1 + cos(2 pi x) exp(-2 pi^2 x^2 sigma^2)) / 2."""
    x = x_over_half_lambda
    return 0.5 + 0.5 * math.cos(2 * math.pi * x) * math.exp(-2 * (math.pi * x * sigma_rel) ** 2)


def _within(cfg, n_max, tolerances, n_jobs, keep_samples=False):
    pos = resonator_positions(n_max, cfg.resonators_per_half_lambda)
    z = standard_normal_trials(cfg.seed, cfg.trials, n_max, n_jobs=n_jobs)
    kappa = relative_kappa(pos[None, :], 1.0 + cfg.sigma_rel * z)
    mu = np.array([mean_kappa(float(p), float(cfg.sigma_rel)) for p in pos])
    dev = np.abs(kappa - mu[None, :])
    # prefix "all within" flags: column n-1 says resonators 1..n all pass
    flags = {tol: np.logical_and.accumulate(dev <= tol * mu[None, :], axis=1) for tol in tolerances}
    return flags, (kappa if keep_samples else None)


def yield_probability(cfg, *, n_jobs=1, keep_samples=False):
    """Probability that all ``cfg.n_resonators`` linewidths fall within tolerance."""
    flags, kappa = _within(cfg, cfg.n_resonators, (cfg.tolerance_rel,), n_jobs, keep_samples)
    p = float(np.mean(flags[cfg.tolerance_rel][:, -1]))
    return YieldResult(p_all_within=p, per_resonator_kappa_samples=kappa)


def yield_curve(cfg, n_values, tolerances=None, *, n_jobs=1):
    """Yield versus resonator count, sharing draws so the curve is nested.

    Resonator i uses the same random numbers for every n, so the returned
    probabilities equal ``yield_probability`` at each n and are exactly
    non-increasing in n. Returns ``{tolerance: array over n_values}``.
    """
    n_values = np.asarray(n_values, dtype=int)
    if n_values.size == 0 or n_values.min() < 1:
        raise DomainError("n_values must be positive")
    tolerances = tuple(tolerances) if tolerances is not None else (cfg.tolerance_rel,)
    flags, _ = _within(cfg, int(n_values.max()), tolerances, n_jobs)
    return {tol: flags[tol][:, n_values - 1].mean(axis=0) for tol in tolerances}


def spread_curves(gamma_out_db_grid):
    """Rows of (|Gamma_out| dB, spread with input mismatch, spread without).

    A total reflection (0 dB) has no finite spread; that row holds +inf.
    """
    db = np.asarray(gamma_out_db_grid, dtype=float)
    rows = np.empty((db.size, 3))
    for k, d in enumerate(db):
        if d > 0:
            raise DomainError(f"|Gamma_out| above 0 dB is unphysical, got {d}")
        mag = 10.0 ** (d / 20.0)
        if d == 0:
            rows[k] = (d, math.inf, math.inf)
        else:
            rows[k] = (d, spread_intentional_mismatch(mag), spread_no_mismatch(mag))
    return rows
