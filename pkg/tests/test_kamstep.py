"""The conjugation step: diagonalization, exactness, quadratic gain, resonances."""

import numpy as np
import pytest

from su2kam import arithmetic, cocycle, fourier, kamstep, su2
from su2kam.errors import GateFailure

ALPHA = arithmetic.golden_mean()
rng = np.random.default_rng(60201)


def random_perturbation(n_max, size):
    c_t = rng.normal(size=2 * n_max + 1) + 1j * rng.normal(size=2 * n_max + 1)
    c_t = 0.5 * (c_t + np.conj(c_t[::-1]))
    c_z = rng.normal(size=2 * n_max + 1) + 1j * rng.normal(size=2 * n_max + 1)
    f = fourier.AlgebraMap(
        fourier.ScalarSeries(c_t, n_max, real_valued=True),
        fourier.ScalarSeries(c_z, n_max),
    )
    return f.scale(size / fourier.algebra_norm(f, "Cs", 0))


def test_diagonalize_constant_oracle():
    for _ in range(200):
        v = rng.normal(size=3)
        v *= rng.uniform(0.05, 3.0) / np.linalg.norm(v)
        a = su2.exp_map(su2.from_vector(v))
        p, angle = kamstep.diagonalize_constant(a)
        d = su2.compose(su2.compose(p, a), p.conj_transpose())
        assert abs(d.w) < 1e-10
        assert 0.0 <= angle <= 0.5
        assert abs(d.z - np.exp(2j * np.pi * angle)) < 1e-10


def test_diagonalize_central_elements():
    p, a = kamstep.diagonalize_constant(su2.IDENTITY)
    assert a == 0.0 and p == su2.IDENTITY
    p, a = kamstep.diagonalize_constant(su2.MINUS_IDENTITY)
    assert a == 0.5


def test_diagonalize_anti_aligned_axis():
    a = su2.diagonal(-0.2)   # axis -h
    p, angle = kamstep.diagonalize_constant(a)
    d = su2.compose(su2.compose(p, a), p.conj_transpose())
    assert abs(d.w) < 1e-12 and abs(angle - 0.2) < 1e-12


def test_gate_failure():
    c = cocycle.PerturbedCocycle(ALPHA, 0.15, random_perturbation(6, 1e-2))
    with pytest.raises(GateFailure):
        kamstep.conjugation_step(c, 10, 1e3, gate_constant=1.0)


def test_step_is_exact_conjugation():
    # (alpha, A' e^{F'}) must equal Conj_G (alpha, A e^{F}) to grid precision
    c = cocycle.PerturbedCocycle(ALPHA, 0.44, random_perturbation(8, 1e-3))
    g, c2, rep = kamstep.conjugation_step(c, 10, 1e3)
    m = 512
    conj = cocycle.conjugate(g, c.to_general())
    assert su2.dist_grid(*conj.values(m), *c2.values(m)) < 1e-10


def test_step_contracts_nonresonant():
    c = cocycle.PerturbedCocycle(ALPHA, 0.44, random_perturbation(8, 1e-4))
    g, c2, rep = kamstep.conjugation_step(c, 8, 200.0)
    assert not rep.resonance.found
    assert rep.eps_out_0 < 1e-2 * rep.eps_in_0
    # without a resonant mode the angle only moves by the t-obstruction
    assert abs(rep.angle_out - rep.angle_in) < 10 * rep.eps_in_0


def test_step_quadratic_gain():
    # eps' ~ eps^2 for a fixed band-limited direction: slope of the log-log
    # fit across three decades stays close to 2
    f1 = random_perturbation(6, 1.0)
    sizes = np.array([1e-3, 1e-4, 1e-5])
    outs = []
    for eps in sizes:
        c = cocycle.PerturbedCocycle(ALPHA, 0.44, f1.scale(eps))
        _, _, rep = kamstep.conjugation_step(c, 8, 200.0)
        outs.append(rep.eps_out_0)
    slope = np.polyfit(np.log(sizes), np.log(outs), 1)[0]
    assert slope > 1.8


def test_step_resonant_odd_mode():
    # angle on the k_r = 3 resonance: a -> a - 3 alpha / 2 + alpha / 2 + O(eps)
    k_r = 3
    a = cocycle.normalize_angle(k_r * ALPHA / 2.0 + 1e-5)
    c = cocycle.PerturbedCocycle(ALPHA, a, random_perturbation(16, 1e-5))
    g, c2, rep = kamstep.conjugation_step(c, 5, 5.0**3)
    assert rep.resonance.k == k_r
    # total geodesic winding -k_r + 1 is even, so G stays 1-periodic
    g.require_periodic()
    expected = abs(cocycle.normalize_angle(a - k_r * ALPHA / 2.0 + ALPHA / 2.0))
    assert abs(rep.angle_out - expected) < 1e-3
    # exactness holds through the resonant surgery as well
    m = 1024
    conj = cocycle.conjugate(g, c.to_general())
    assert su2.dist_grid(*conj.values(m), *c2.values(m)) < 1e-9


def test_step_resonant_even_mode():
    k_r = 2
    a = cocycle.normalize_angle(k_r * ALPHA / 2.0 + 1e-6)
    c = cocycle.PerturbedCocycle(ALPHA, a, random_perturbation(14, 1e-6))
    g, c2, rep = kamstep.conjugation_step(c, 5, 5.0**3)
    assert rep.resonance.k == k_r
    # even winding needs no corrective geodesic: a -> a - alpha + O(eps)
    expected = abs(cocycle.normalize_angle(a - k_r * ALPHA / 2.0))
    assert abs(rep.angle_out - expected) < 1e-4
    assert not any(isinstance(f, fourier.GeodesicFactor) and f.m == 1 for f in g.factors)


def test_step_resonant_contracts():
    k_r = 3
    a = cocycle.normalize_angle(k_r * ALPHA / 2.0 + 1e-6)
    # band-limited within the solved windows, so no truncation tail survives
    for eps in (1e-5, 1e-7):
        c = cocycle.PerturbedCocycle(ALPHA, a, random_perturbation(5, eps))
        _, _, rep = kamstep.conjugation_step(c, 5, 5.0**3)
        assert rep.eps_out_0 < 0.1 * eps


def test_report_fields_consistent():
    c = cocycle.PerturbedCocycle(ALPHA, 0.44, random_perturbation(8, 1e-4))
    _, c2, rep = kamstep.conjugation_step(c, 8, 200.0, s0=4)
    assert rep.s0 == 4
    assert rep.eps_out_0 == c2.eps(0)
    assert rep.angle_out == c2.angle
    assert rep.gate_value < 1.0
    assert rep.aliasing < 1e-10
    assert rep.c1_fit >= 0 and rep.c2_fit >= 0
