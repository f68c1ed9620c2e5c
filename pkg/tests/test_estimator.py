import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from allpass.cmt import s21_trace
from allpass.device import AllPassModel
from allpass.estimator import AllPassFitter, FitResult
from allpass.exceptions import BoundsError, DomainError, FitError
from allpass.metrics import fit_model

DEVICE = AllPassModel()
FREQ = np.linspace(7740.0, 7780.0, 201)


def stacked(model, states=(0, 1, 2), freq=FREQ):
    X = np.concatenate([np.column_stack([freq, np.full(freq.size, s)]) for s in states])
    y = np.concatenate([s21_trace(model, s, freq).s21 for s in states])
    return X, y


def test_params_roundtrip():
    est = AllPassFitter(n_grid=3, phi_bounds=(3.5, 6.0))
    params = est.get_params()
    assert params["n_grid"] == 3
    twin = clone(est)
    assert twin.get_params() == params
    assert AllPassFitter.from_model(DEVICE).get_params()["omega_r"] == 7756.4


def test_noiseless_single_state_recovery():
    tr = s21_trace(DEVICE, 0, FREQ)
    est = AllPassFitter.from_model(DEVICE).fit(FREQ, tr.s21)
    assert est.phi_ == pytest.approx(1.55 * math.pi, rel=1e-3)
    assert est.g_total_ == pytest.approx(-5.1, rel=1e-3)
    assert est.loss_db_ == pytest.approx(0.28, abs=1e-6)
    assert est.residual_ < 1e-8
    np.testing.assert_allclose(est.predict(FREQ), tr.s21, atol=1e-8)
    assert est.score(FREQ, tr.s21) == pytest.approx(0.0, abs=1e-8)


def test_multi_state_recovery_and_threads():
    X, y = stacked(DEVICE)
    a = AllPassFitter.from_model(DEVICE, n_grid=3).fit(X, y)
    b = AllPassFitter.from_model(DEVICE, n_grid=3, n_jobs=3).fit(X, y)
    assert a.result_ == b.result_
    assert a.phi_ == pytest.approx(1.55 * math.pi, rel=1e-3)
    assert a.g_total_ == pytest.approx(-5.1, rel=1e-3)
    assert a.predict(X).shape == y.shape


def test_objective_nonnegative_and_zero_on_model():
    X, y = stacked(DEVICE, states=(1,))
    est = AllPassFitter.from_model(DEVICE, init=(1.55 * math.pi, -5.1), n_grid=1).fit(X, y)
    assert 0.0 <= est.residual_ < 1e-8
    off = AllPassFitter.from_model(DEVICE)
    off.phi_, off.g_total_, off.amplitude_, off.result_ = 1.6 * math.pi, -4.0, 1.0, None
    assert off.score(X, y) < -1e-3


def test_flat_trace_rejected():
    with pytest.raises(FitError):
        AllPassFitter.from_model(DEVICE, n_grid=2).fit(FREQ, np.full(FREQ.size, 0.97 + 0j))


def test_vanishing_linewidth_rejected():
    # kappa_r -> 0: the model is a flat line whatever (phi, g_total) are
    rng = np.random.default_rng(0)
    noisy = 0.97 + 0.01 * (rng.standard_normal(FREQ.size) + 1j * rng.standard_normal(FREQ.size))
    with pytest.raises(FitError):
        AllPassFitter(kappa_r=1e-9, n_grid=2).fit(FREQ, noisy)


def test_input_validation():
    est = AllPassFitter.from_model(DEVICE)
    with pytest.raises(FitError):
        est.fit(FREQ[:5], np.ones(5))
    with pytest.raises(DomainError):
        est.fit(FREQ, np.ones(FREQ.size - 1))
    with pytest.raises(DomainError):
        est.fit(FREQ[::-1], np.ones(FREQ.size))
    with pytest.raises(ValueError):
        est.fit(np.column_stack([FREQ, np.full(FREQ.size, 0.5)]), np.ones(FREQ.size))
    with pytest.raises(BoundsError):
        AllPassFitter(phi_bounds=(5.0, 4.0)).fit(FREQ, np.ones(FREQ.size))
    with pytest.raises(BoundsError):
        AllPassFitter(init=(0.1, 0.0)).fit(FREQ, np.ones(FREQ.size))
    with pytest.raises(NotFittedError):
        AllPassFitter().predict(FREQ)


def test_iteration_cap():
    tr = s21_trace(DEVICE, 0, FREQ)
    with pytest.raises(FitError):
        AllPassFitter.from_model(DEVICE, n_grid=1, max_evals=3).fit(FREQ, tr.s21)


def test_fit_model_wrapper():
    tr = s21_trace(DEVICE, 1, FREQ)
    res = fit_model(tr, DEVICE, bounds=((math.pi, 2 * math.pi), (-10.0, 10.0)),
                    qubit_state=1, n_grid=3)
    assert isinstance(res, FitResult)
    assert res.residual >= 0.0
    assert set(res.to_json_dict()) == {"phi_rad", "g_total_mhz", "loss_db", "residual"}
