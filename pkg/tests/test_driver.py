"""Schedule arithmetic, full scheme runs, and normal-form verification."""

import numpy as np
import pytest

from su2kam import arithmetic, cocycle, driver, fourier, su2
from su2kam.errors import ConfigError, GateFailure

ALPHA = arithmetic.golden_mean()
rng = np.random.default_rng(880011)


def random_perturbation(n_max, size, decay=2.0):
    k = np.arange(-n_max, n_max + 1)
    w = np.exp(-decay * np.abs(k))
    c_t = w * (rng.normal(size=2 * n_max + 1) + 1j * rng.normal(size=2 * n_max + 1))
    c_t = 0.5 * (c_t + np.conj(c_t[::-1]))
    c_z = w * (rng.normal(size=2 * n_max + 1) + 1j * rng.normal(size=2 * n_max + 1))
    f = fourier.AlgebraMap(
        fourier.ScalarSeries(c_t, n_max, real_valued=True),
        fourier.ScalarSeries(c_z, n_max),
    )
    return f.scale(size / fourier.algebra_norm(f, "Cs", 0))


def test_schedule_values():
    p = driver.SchemeParams()
    assert driver.schedule(p, 1) == (10, 10.0**3)
    assert driver.schedule(p, 2)[0] == 20
    assert driver.schedule(p, 3)[0] == 49
    assert driver.schedule(p, 4)[0] == 157
    assert driver.schedule(p, 5)[0] == 718


def test_schedule_overflow_guard():
    p = driver.SchemeParams(sigma=0.9)
    with pytest.raises(ConfigError):
        driver.schedule(p, 4)


def test_params_validation():
    with pytest.raises(ConfigError):
        driver.SchemeParams(sigma=1.5)
    with pytest.raises(ConfigError):
        driver.SchemeParams(nu=1.0, tau=2.0)
    with pytest.raises(ConfigError):
        driver.SchemeParams(precision=100)
    with pytest.raises(ConfigError):
        driver.SchemeParams(precision=32)
    assert driver.SchemeParams().nu == 3.0


def test_run_scheme_zero_perturbation():
    c = cocycle.PerturbedCocycle(ALPHA, 0.44, fourier.algebra_zeros(4))
    trace = driver.run_scheme(c, driver.SchemeParams())
    assert trace.status == "converged"
    assert len(trace.steps) == 1
    assert trace.resonant_steps == []
    assert abs(trace.final.angle - 0.44) < 1e-12


def test_run_scheme_entry_gate():
    c = cocycle.PerturbedCocycle(ALPHA, 0.44, random_perturbation(6, 0.5))
    with pytest.raises(GateFailure):
        driver.run_scheme(c, driver.SchemeParams(eps_gate=0.1))


def test_run_scheme_planted_converges():
    c = cocycle.PerturbedCocycle(ALPHA, 0.44, random_perturbation(8, 1e-3))
    p = driver.SchemeParams(max_steps=5)
    trace = driver.run_scheme(c, p)
    assert trace.status == "converged"
    assert trace.resonant_steps == []
    assert trace.final.eps(0) < 1e-12
    assert trace.decay_ok()
    # conjugating the input by H reproduces the final form on the grid
    conj = cocycle.conjugate(trace.H, c.to_general())
    m = 512
    assert su2.dist_grid(*conj.values(m), *trace.final.values(m)) < 1e-9
    # gap diagnostics shrink along the run
    assert trace.gaps[-1][0] < trace.gaps[0][0]
    assert trace.gaps[-1][0] < 1e-10


def test_trace_records_shape():
    c = cocycle.PerturbedCocycle(ALPHA, 0.44, random_perturbation(6, 1e-4))
    trace = driver.run_scheme(c, driver.SchemeParams(max_steps=3))
    keys = ["step", "N", "K", "k_r", "eps0", "eps_s0", "normG0", "normGs0", "angle", "warnings"]
    for rec in trace.records:
        assert list(rec.keys()) == keys
    assert [r["step"] for r in trace.records] == list(range(1, len(trace.records) + 1))
    assert all(r["k_r"] is None for r in trace.records)


def test_normal_form_extract_no_resonance():
    c = cocycle.PerturbedCocycle(ALPHA, 0.44, random_perturbation(8, 1e-4))
    p = driver.SchemeParams(max_steps=5)
    d, report = driver.normal_form_extract(c, p)
    assert report.passed and report.max_y_norm <= report.tolerance
    # with no resonant step the resonance product is empty, so D = H
    trace = driver.run_scheme(c, p)
    m = 256
    assert su2.dist_grid(*d.values(m), *trace.H.values(m)) < 1e-12


def test_normal_form_zero_input():
    c = cocycle.PerturbedCocycle(ALPHA, 0.31, fourier.algebra_zeros(2))
    d, report = driver.normal_form_extract(c, driver.SchemeParams())
    assert report.passed
    m = 64
    z, w = d.values(m)
    # D is constant in x (a bare diagonalization), hence trivial as a conjugacy
    assert float(np.max(np.abs(z - z[0]))) < 1e-12
    assert float(np.max(np.abs(w - w[0]))) < 1e-12


def test_scheme_detects_planted_resonance():
    k_r = 3
    a = cocycle.normalize_angle(k_r * ALPHA / 2.0 + 1e-6)
    c = cocycle.PerturbedCocycle(ALPHA, a, random_perturbation(5, 1e-6))
    p = driver.SchemeParams(n1=5, max_steps=2, tolerances=driver.Tolerances(eps_floor=1e-30))
    trace = driver.run_scheme(c, p)
    assert 1 in trace.resonant_steps
    assert trace.steps[0].resonance.k == k_r
