"""Acceptance criteria, one test each; see the summary section for PASS/FAIL lines."""

import filecmp
import math
import time

import numpy as np
import pytest

from allpass.cli import main
from allpass.cmt import s11_two_mode, s21_trace, s21_two_mode
from allpass.device import READOUT_FREQUENCY, AllPassModel, ModePair, SquidSpec, TransmonSpec
from allpass.estimator import AllPassFitter
from allpass.metrics import assignment_fidelity, purcell_t1, s21_at_operating_point
from allpass.netphys import spread_intentional_mismatch
from allpass.transmon import (
    allpass_flux_point,
    dispersive_chi,
    dispersive_numeric,
    eigenmodes_for_state,
    even_mode_pull,
)
from allpass.yieldmc import YieldConfig, spread_curves, yield_curve

DEVICE = AllPassModel()
TRUE_PHI = 1.55 * math.pi
TRUE_G = -5.1


def measured(request, text):
    request.node.user_properties.append(("measured", text))


@pytest.mark.criterion("1", "spread_intentional_mismatch(-16 dB) = 1.895 +/- 0.005")
def test_c01_spread_ratio(request):
    v = spread_intentional_mismatch(10 ** (-16 / 20))
    measured(request, f"{v:.4f}")
    assert v == pytest.approx(1.895, abs=0.005)


@pytest.mark.criterion("2", "eq1 = eq2^2 to 1e-12 on the 121-point dB grid")
def test_c02_spread_identity(request):
    rows = spread_curves(np.linspace(-30.0, 0.0, 121))
    finite = np.isfinite(rows[:, 1])
    err = np.max(np.abs(rows[finite, 1] - rows[finite, 2] ** 2) / rows[finite, 1])
    measured(request, f"max rel err {err:.1e}; 0 dB row diverges in both")
    assert rows.shape == (121, 3)
    assert err <= 1e-12
    assert np.all(np.isinf(rows[~finite, 1:]))


@pytest.mark.criterion("3", "yield < 0.5 for some n in [10, 20] (1e5 trials, < 60 s)")
def test_c03_yield_curve(request):
    t0 = time.perf_counter()
    cfg = YieldConfig(sigma_rel=0.015, tolerance_rel=0.30, resonators_per_half_lambda=2,
                      trials=100_000)
    n = np.arange(10, 21)
    p = yield_curve(cfg, n, n_jobs=1)[0.30]
    dt = time.perf_counter() - t0
    below = n[p < 0.5]
    measured(request, f"p(10)={p[0]:.3f} p(20)={p[-1]:.3f} first n below 0.5: "
                      f"{below[0] if below.size else None}; {dt:.1f} s")
    assert below.size > 0
    assert dt < 60.0


@pytest.mark.criterion("4", "dispersive_chi(93.4, -1670.4, 201) = -0.55 MHz within 5%")
def test_c04_dispersive_shift(request):
    chi = dispersive_chi(93.4, -1670.4, 201.0)
    measured(request, f"{chi:.4f} MHz")
    assert chi == pytest.approx(-0.55, rel=0.05)


@pytest.mark.criterion("5", "Purcell T1 = 1.5 us within 10%; 1.5 us x 47 = 70 us within 5%")
def test_c05_purcell(request):
    t1 = purcell_t1(17.1, 93.4, -1670.4)
    measured(request, f"T1 = {t1:.3f} us")
    assert t1 == pytest.approx(1.5, rel=0.10)
    assert 1.5 * 47 == pytest.approx(70.0, rel=0.05)


@pytest.mark.criterion("6", "|S21|^2 at |chi/kappa| = 0.038 equals 0.977 +/- 0.002")
def test_c06_operating_point(request):
    mag, _ = s21_at_operating_point(0.038 * 14.5, 14.5)
    measured(request, f"{mag**2:.4f}")
    assert mag**2 == pytest.approx(0.977, abs=0.002)


def _table_traces():
    freq = np.linspace(7700.0, 7820.0, 24001)
    return [s21_trace(DEVICE, s, freq, include_package_loss=False) for s in range(3)]


@pytest.mark.criterion("7a", "fitted device minima -0.85/-1.13/-1.53 dB within 0.2 dB (< 10 s)")
def test_c07a_table_minima(request):
    t0 = time.perf_counter()
    traces = _table_traces()
    dt = time.perf_counter() - t0
    minima = [float(tr.s21_db.min()) for tr in traces]
    measured(request, "minima " + "/".join(f"{m:.3f}" for m in minima) + f" dB; {dt:.2f} s")
    assert dt < 10.0
    assert minima == pytest.approx([-0.85, -1.13, -1.53], abs=0.2)


@pytest.mark.criterion("7b", "readout-tone phases 202/188/179 deg within 6 deg (< 10 s)")
def test_c07b_table_phases(request):
    t0 = time.perf_counter()
    traces = _table_traces()
    dt = time.perf_counter() - t0
    phases = []
    for tr in traces:
        i = int(np.argmin(np.abs(tr.freq - READOUT_FREQUENCY)))
        assert tr.freq[i] == pytest.approx(READOUT_FREQUENCY, abs=1e-6)
        phases.append(float(tr.s21_phase_deg[i]))
    measured(request, "phases " + "/".join(f"{p:.2f}" for p in phases) + f" deg; {dt:.2f} s")
    assert dt < 10.0
    assert phases == pytest.approx([202.0, 188.0, 179.0], abs=6.0)


@pytest.mark.criterion("8", "even-mode pulls -1.10/-1.86 MHz within 10%; odd pull < 0.05 MHz")
def test_c08_pulls(request):
    p1, p2 = even_mode_pull(DEVICE, 1), even_mode_pull(DEVICE, 2)
    odd = [eigenmodes_for_state(DEVICE, s).omega_o for s in range(3)]
    odd_pull = max(abs(o - odd[0]) for o in odd)
    measured(request, f"2chi01={p1:.3f} 2chi02={p2:.3f} odd pull {odd_pull:.1e} MHz")
    assert p1 == pytest.approx(-1.10, rel=0.10)
    assert p2 == pytest.approx(-1.86, rel=0.10)
    assert odd_pull < 0.05


@pytest.mark.criterion("9", "|S11|^2 + |S21|^2 = 1 to 1e-9 on 1e4 lossless configurations")
def test_c09_unitarity(request):
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(10_000):
        we, wo = rng.uniform(7700, 7800, 2)
        ke, ko = rng.uniform(0, 40, 2)
        w = rng.uniform(7650, 7850, 8)
        modes = ModePair(we, wo, ke, ko)
        total = np.abs(s21_two_mode(w, modes)) ** 2 + np.abs(s11_two_mode(w, modes)) ** 2
        worst = max(worst, float(np.max(np.abs(total - 1.0))))
    measured(request, f"max deviation {worst:.1e}")
    assert worst <= 1e-9


@pytest.mark.criterion("10", "degenerate matched modes: |S21| = 1 and |S11| = 0 to 1e-12")
def test_c10_all_pass(request):
    modes = ModePair(7760.0, 7760.0, 14.5, 14.5)
    w = np.concatenate([[7760.0], np.linspace(7700, 7820, 241)])
    dev21 = float(np.max(np.abs(np.abs(s21_two_mode(w, modes)) - 1.0)))
    dev11 = float(np.max(np.abs(s11_two_mode(w, modes))))
    measured(request, f"|S21|-1 {dev21:.1e}, |S11| {dev11:.1e}")
    assert dev21 <= 1e-12 and dev11 <= 1e-12


@pytest.mark.criterion("11", "numerical chi vs closed form within 2% (100 sets, g/|Delta| <= 0.05)")
def test_c11_perturbative_chi(request):
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(100):
        omega_r = rng.uniform(6000.0, 9000.0)
        delta = rng.uniform(-2500.0, -1000.0)
        e_c = rng.uniform(150.0, 300.0)
        g = rng.uniform(0.005, 0.05) * abs(delta)
        m = AllPassModel(omega_r=omega_r, g=g, g_total=0.0,
                         transmon=TransmonSpec(omega_01=omega_r + delta, e_c=e_c))
        rel = abs(dispersive_numeric(m).chi01 / dispersive_chi(g, delta, e_c) - 1.0)
        worst = max(worst, rel)
    measured(request, f"worst relative error {worst:.2%}")
    assert worst <= 0.02


def _stacked(freq, states=(0, 1, 2)):
    X = np.concatenate([np.column_stack([freq, np.full(freq.size, s)]) for s in states])
    y = np.concatenate([s21_trace(DEVICE, s, freq).s21 for s in states])
    return X, y


@pytest.mark.criterion("12", "fit recovery: noiseless within 0.1%, sigma=0.01 within 1% (20 seeds)")
def test_c12_fit_recovery(request):
    freq = np.linspace(7740.0, 7780.0, 401)
    X, y0 = _stacked(freq)
    single = AllPassFitter.from_model(DEVICE).fit(freq, y0[: freq.size])
    joint = AllPassFitter.from_model(DEVICE).fit(X, y0)
    clean = max(abs(e.phi_ / TRUE_PHI - 1) for e in (single, joint))
    clean = max(clean, *(abs(e.g_total_ / TRUE_G - 1) for e in (single, joint)))
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        y = y0 + 0.01 * (rng.standard_normal(y0.size) + 1j * rng.standard_normal(y0.size))
        est = AllPassFitter.from_model(DEVICE).fit(X, y)
        worst = max(worst, abs(est.phi_ / TRUE_PHI - 1), abs(est.g_total_ / TRUE_G - 1))
    measured(request, f"noiseless {clean:.1e}, noisy worst {worst:.2%} (states 0/1/2 jointly)")
    assert clean <= 1e-3
    assert worst <= 1e-2


@pytest.mark.criterion("13", "allpass_flux_point in [0.25, 0.33]")
def test_c13_flux_point(request):
    flux = allpass_flux_point(DEVICE, SquidSpec())
    measured(request, f"{flux:.4f}")
    assert 0.25 <= abs(flux) <= 0.33


@pytest.mark.criterion("14", "assignment fidelity 0.981 and 0.9905 exactly")
def test_c14_fidelity(request):
    a, b = assignment_fidelity(0.030, 0.008), assignment_fidelity(0.012, 0.007)
    measured(request, f"{a!r}, {b!r}")
    assert a == pytest.approx(0.981, abs=1e-12)
    assert b == pytest.approx(0.9905, abs=1e-12)


@pytest.mark.criterion("15", "fig2 and fit byte-identical across reruns and 1 vs N threads")
def test_c15_determinism(request, tmp_path):
    runs = {}
    for name, jobs in (("a", 1), ("b", 1), ("c", 4)):
        out = tmp_path / f"fig2_{name}"
        assert main(["fig2", "--out", str(out), "--jobs", str(jobs)]) == 0
        runs[name] = out
    for fname in ("fig2_histograms.csv", "fig2_yield.csv"):
        for other in ("b", "c"):
            assert filecmp.cmp(runs["a"] / fname, runs[other] / fname, shallow=False)

    trace = tmp_path / "trace.csv"
    assert main(["s21", "--state", "0", "1", "2", "--include-package-loss",
                 "--out", str(trace)]) == 0
    fits = []
    for name, jobs in (("a", 1), ("b", 1), ("c", 4)):
        out = tmp_path / f"fit_{name}.json"
        assert main(["fit", str(trace), "--out", str(out), "--jobs", str(jobs)]) == 0
        fits.append(out.read_bytes())
    measured(request, "3 fig2 runs, 3 fit runs compared")
    assert fits[0] == fits[1] == fits[2]
