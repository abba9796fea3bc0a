"""Cocycle iteration, conjugation, planting, and form conversion."""

import numpy as np
import pytest

from su2kam import arithmetic, cocycle, fourier, su2

ALPHA = arithmetic.golden_mean()
rng = np.random.default_rng(7321)


def random_algebra_map(n_max, size):
    c_t = rng.normal(size=2 * n_max + 1) + 1j * rng.normal(size=2 * n_max + 1)
    c_t = 0.5 * (c_t + np.conj(c_t[::-1]))
    c_z = rng.normal(size=2 * n_max + 1) + 1j * rng.normal(size=2 * n_max + 1)
    f = fourier.AlgebraMap(
        fourier.ScalarSeries(c_t, n_max, real_valued=True),
        fourier.ScalarSeries(c_z, n_max),
    )
    return f.scale(size / max(fourier.algebra_norm(f, "Cs", 0), 1e-30))


def random_general(n_max=3, size=0.3):
    g = fourier.GroupMap((
        fourier.ConstantFactor(su2.diagonal(rng.uniform(-0.5, 0.5))),
        fourier.ExpFactor(random_algebra_map(n_max, size)),
    ))
    return cocycle.GeneralCocycle(ALPHA, g)


def test_normalize_angle():
    assert cocycle.normalize_angle(0.0) == 0.0
    assert cocycle.normalize_angle(0.75) == -0.25
    assert cocycle.normalize_angle(-0.5) == 0.5
    assert cocycle.normalize_angle(0.5) == 0.5
    assert abs(cocycle.normalize_angle(3.2) - 0.2) < 1e-12


def test_perturbation_size_enforced():
    big = random_algebra_map(2, 1.5)
    with pytest.raises(ValueError):
        cocycle.PerturbedCocycle(ALPHA, 0.1, big)


def test_iterate_base_cases():
    c = random_general()
    x = rng.uniform(size=8)
    z0, w0 = cocycle.iterate(c, 0).evaluate(x)
    assert su2.dist_grid(z0, w0, np.ones_like(z0), np.zeros_like(w0)) < 1e-14
    z1, w1 = cocycle.iterate(c, 1).evaluate(x)
    ze, we = c.A_map.evaluate(x)
    assert su2.dist_grid(z1, w1, ze, we) < 1e-12
    # A_{-1}(x) = A(x - alpha)^{-1}
    zm, wm = cocycle.iterate(c, -1).evaluate(x)
    zi, wi = c.A_map.inverse().evaluate(x - ALPHA)
    assert su2.dist_grid(zm, wm, zi, wi) < 1e-12


def test_cocycle_identity():
    # A_{n+m}(x) = A_n(x + m alpha) A_m(x), including negative iterates
    c = random_general()
    x = rng.uniform(size=6)
    for n, m in [(2, 3), (4, 1), (3, -2), (-2, -3), (-1, 4)]:
        lhs = cocycle.iterate(c, n + m).evaluate(x)
        zn, wn = cocycle.iterate(c, n).evaluate(x + m * ALPHA)
        zm, wm = cocycle.iterate(c, m).evaluate(x)
        rhs = su2.compose_grid(zn, wn, zm, wm)
        assert su2.dist_grid(*lhs, *rhs) < 1e-11


def test_conjugation_group_law():
    c = random_general()
    b1 = fourier.GroupMap((fourier.ExpFactor(random_algebra_map(2, 0.4)),))
    b2 = fourier.GroupMap((
        fourier.GeodesicFactor(2, su2.H),
        fourier.ExpFactor(random_algebra_map(2, 0.2)),
    ))
    lhs = cocycle.conjugate(b1, cocycle.conjugate(b2, c))
    rhs = cocycle.conjugate(b1.compose(b2), c)
    m = 64
    assert su2.dist_grid(*lhs.values(m), *rhs.values(m)) < 1e-11


def test_conjugated_iterates_match():
    # the n-th iterate of Conj_B c is B(x + n alpha) A_n(x) B*(x)
    c = random_general()
    b = fourier.GroupMap((fourier.ExpFactor(random_algebra_map(2, 0.5)),))
    cc = cocycle.conjugate(b, c)
    x = rng.uniform(size=5)
    for n in (1, 3):
        z2, w2 = cocycle.iterate(cc, n).evaluate(x)
        bz, bw = b.evaluate(x + n * ALPHA)
        an = cocycle.iterate(c, n).evaluate(x)
        inner = su2.compose_grid(bz, bw, *an)
        z1, w1 = su2.compose_grid(*inner, *su2.conj_grid(*b.evaluate(x)))
        assert su2.dist_grid(z1, w1, z2, w2) < 1e-11


def test_plant_reducible_round_trip():
    a_d = su2.diagonal(0.44)
    d = fourier.GroupMap((
        fourier.GeodesicFactor(2, su2.J),
        fourier.ExpFactor(random_algebra_map(3, 0.3)),
    ))
    c = cocycle.plant_reducible(ALPHA, a_d, d)
    # conjugating back by D recovers the constant
    cc = cocycle.conjugate(d, c)
    m = 96
    z, w = cc.values(m)
    assert su2.dist_grid(z, w, np.full(m, a_d.z), np.full(m, a_d.w)) < 1e-11


def test_perturbed_general_values_agree():
    f = random_algebra_map(4, 0.2)
    c = cocycle.PerturbedCocycle(ALPHA, 0.31, f)
    m = 64
    assert su2.dist_grid(*c.values(m), *c.to_general().values(m)) < 1e-12


def test_to_perturbed_recovers_form():
    f = random_algebra_map(4, 0.05)
    c = cocycle.PerturbedCocycle(ALPHA, 0.27, f)
    c2, p = cocycle.to_perturbed(c.to_general(), band=12)
    m = 96
    # P-conjugated values of the general map equal the recovered canonical form
    z, w = c.values(m)
    pz, pw = np.full(m, p.z), np.full(m, p.w)
    z, w = su2.compose_grid(*su2.compose_grid(pz, pw, z, w), *su2.conj_grid(pz, pw))
    assert su2.dist_grid(z, w, *c2.values(m)) < 1e-9
    assert c2.eps(0) < 0.2


def test_to_perturbed_diagonalizes_generic_constant():
    s = su2.AlgebraElement(0.4, 0.3 - 0.2j)
    g = fourier.GroupMap((
        fourier.ConstantFactor(su2.exp_map(s)),
        fourier.ExpFactor(random_algebra_map(3, 0.02)),
    ))
    c2, p = cocycle.to_perturbed(cocycle.GeneralCocycle(ALPHA, g), band=8)
    assert 0.0 <= c2.angle <= 0.5
    assert c2.eps(0) < 0.1


def test_gap_vanishes_at_true_conjugacy():
    a_d = su2.diagonal(0.44)
    d = fourier.GroupMap((fourier.ExpFactor(random_algebra_map(3, 0.3)),))
    c = cocycle.plant_reducible(ALPHA, a_d, d)
    g1, g2 = cocycle.almost_reducibility_gap(c, d, a_d)
    assert g1 < 1e-11 and g2 < 1e-11


def test_gap_c0_invariance_of_pushforward():
    # Ad(B) is an isometry of su(2), so both gap readings agree in C^0
    c = random_general(size=0.1)
    b = fourier.GroupMap((fourier.ExpFactor(random_algebra_map(2, 0.3)),))
    a_n = su2.diagonal(0.2)
    g1, g2 = cocycle.almost_reducibility_gap(c, b, a_n)
    assert abs(g1 - g2) < 1e-10
