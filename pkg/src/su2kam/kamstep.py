"""One conjugation step of the scheme.

Given (alpha, A e^{F}) with A diagonal and ||F||_0 = eps small, build a
conjugation G = P . C . B . e^{Y} such that

    G(. + alpha) A e^{F(.)} G^{-1}(.) = A' e^{F'(.)},   A' diagonal,

with ||F'|| of order eps^2 plus the tail beyond the truncation order N.
Y solves the linearized equations per mode (diagonal and twisted channels);
B = exp(pi (-k_r x) h) renormalizes a resonant mode k_r, C is a minimal
geodesic restoring 1-periodicity when k_r is odd, and the constant P
diagonalizes the new constant part.  F' is recovered exactly on a grid by
a pointwise logarithm, so no term of the product is ever linearized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import arithmetic, cocycle, cohomology, fourier, su2
from .errors import GateFailure

#: default smallness-gate constant c_{1,0} in  c_{1,0} K N^{s_0} eps_0 < 1
GATE_CONSTANT = 1e-10

#: vector parts below this make a constant numerically central (+-Id)
_CENTRAL_TOL = 1e-12


def diagonalize_constant(A: su2.Su2Element) -> tuple:
    """A constant P with P A P* = {e^{2 i pi a}, 0} and a in [0, 1/2].

    Writes A = cos(r) Id + sin(r) n.(h, j, ij) and rotates the axis n onto h;
    the rotation by angle phi about an axis is exp((phi/2) axis) under the
    double cover.  Returns (P, a) with a = r / (2 pi).
    """
    vec = np.array([A.z.imag, A.w.real, A.w.imag])
    s = float(np.linalg.norm(vec))
    if s <= _CENTRAL_TOL:
        return su2.IDENTITY, (0.0 if A.z.real > 0 else 0.5)
    n = vec / s
    r = float(np.arctan2(s, A.z.real))
    e1 = np.array([1.0, 0.0, 0.0])
    axis = np.cross(n, e1)
    sin_phi = float(np.linalg.norm(axis))
    if sin_phi <= _CENTRAL_TOL:
        if n[0] > 0:
            return su2.IDENTITY, r / (2.0 * np.pi)
        # axis anti-aligned with h: any half-turn orthogonal to h flips it
        return su2.exp_map(su2.J.scale(np.pi / 2.0)), r / (2.0 * np.pi)
    phi = float(np.arctan2(sin_phi, float(np.dot(n, e1))))
    P = su2.exp_map(su2.from_vector(axis / sin_phi).scale(phi / 2.0))
    return P, r / (2.0 * np.pi)


@dataclass(frozen=True)
class StepReport:
    """Diagnostics for one conjugation step."""

    n: int
    big_k: float
    resonance: arithmetic.Resonance
    report_t: cohomology.SolveReport
    report_z: cohomology.SolveReport
    angle_in: float
    angle_out: float
    eps_in_0: float
    eps_in_s: float
    eps_out_0: float
    eps_out_s: float
    y_norm_0: float
    y_norm_s: float
    gate_value: float
    c1_fit: float          # ||Y||_{C^{s0}} / (K N^{s0} eps_0)
    c2_fit: float          # eps'_0 / (K N^{s0} eps_0^2)
    aliasing: float        # grid residual of the band-limited re-analysis
    band_out: int
    s0: int
    warnings: tuple = ()


def _work_grid(band: int, n: int, k_r: int, m: int | None) -> int:
    if m is not None:
        return m
    need = fourier.OVERSAMPLE_MIN * (3 * band + 2 * n + 2 * abs(k_r) + 8) + 1
    m = 256
    while m < need:
        m *= 2
    return m


def conjugation_step(
    c: cocycle.PerturbedCocycle,
    n: int,
    big_k: float,
    s0: int = 8,
    tau: float = 2.0,
    nu: float = 3.0,
    gate_constant: float = GATE_CONSTANT,
    m: int | None = None,
) -> tuple:
    """One step: returns (G, c', report) with Conj_G c = c'."""
    eps0 = c.eps(0)
    eps_s = c.eps(s0)
    gate = gate_constant * big_k * float(n) ** s0 * eps0
    if gate >= 1.0:
        raise GateFailure(
            f"smallness gate violated: c1 K N^s0 eps0 = {gate:.3g} >= 1 "
            f"(N={n}, K={big_k:.3g}, eps0={eps0:.3g})"
        )

    Y_t, rep_t = cohomology.solve_diagonal(c.F.t_channel, c.alpha, n, tau=tau)
    Y_z, res, rep_z = cohomology.solve_twisted(c.F.z_channel, c.angle, c.alpha, n, big_k, nu=nu)
    Y = fourier.AlgebraMap(Y_t, Y_z)

    k_r = res.k if res.found else 0
    warnings = tuple(rep_t.warnings) + tuple(rep_z.warnings)

    # constant part after removing the solved modes: the two obstructions
    lam = su2.AlgebraElement(float(np.real(rep_t.obstruction)), complex(rep_z.obstruction))
    factors = [fourier.ExpFactor(Y)]
    A_tilde = su2.compose(c.constant, su2.exp_map(lam))
    if res.found and res.k != 0:
        factors.insert(0, fourier.GeodesicFactor(-res.k, su2.H))
        A_tilde = su2.compose(su2.diagonal(-res.k * c.alpha / 2.0), A_tilde)
    if res.found and res.k % 2 != 0:
        # odd winding in B: a minimal geodesic along the axis of A~ restores
        # 1-periodicity while commuting with the constant part
        vec = np.array([A_tilde.z.imag, A_tilde.w.real, A_tilde.w.imag])
        s = float(np.linalg.norm(vec))
        v = su2.H if s <= 1e-9 else su2.from_vector(vec / s)
        factors.insert(0, fourier.GeodesicFactor(1, v))
        A_tilde = su2.compose(su2.exp_map(v.scale(np.pi * c.alpha)), A_tilde)
    P, angle_out = diagonalize_constant(A_tilde)
    factors.insert(0, fourier.ConstantFactor(P))
    G = fourier.GroupMap(tuple(factors))
    G.require_periodic()

    # exact new perturbation: F' = log(A'* G(.+alpha) A e^{F} G^{-1}) on a grid
    grid = _work_grid(c.F.band, n, k_r, m)
    band_out = (grid // 2) // fourier.OVERSAMPLE_MIN
    z, w = su2.compose_grid(*G.values(grid, shift=c.alpha), *c.values(grid))
    z, w = su2.compose_grid(z, w, *G.inverse().values(grid))
    a_new = su2.diagonal(angle_out)
    z, w = su2.compose_grid(
        np.full(grid, np.conj(a_new.z)), np.zeros(grid), z, w
    )
    t, u = su2.log_grid(z, w)
    F_new = fourier.algebra_from_grid(t, u, band_out)
    # drop the all-but-silent tail of the band
    support = fourier.spectral_support(F_new.t_channel) | fourier.spectral_support(F_new.z_channel)
    trimmed = min(band_out, max((abs(k) for k in support), default=2) + 2)
    if trimmed < band_out:
        band_out = trimmed
        F_new = fourier.AlgebraMap(
            F_new.t_channel.with_band(band_out), F_new.z_channel.with_band(band_out)
        )
    tt, uu = F_new.values(grid)
    aliasing = float(max(np.max(np.abs(np.real(tt) - t)), np.max(np.abs(uu - u))))
    if aliasing > 1e-10:
        warnings = warnings + (f"band-limited residual {aliasing:.3g} above 1e-10",)

    c_out = cocycle.PerturbedCocycle(c.alpha, angle_out, F_new)
    eps_out0 = c_out.eps(0)
    eps_outs = c_out.eps(s0)
    y0 = fourier.algebra_norm(Y, "Cs", 0)
    ys = fourier.algebra_norm(Y, "Cs", s0)
    scale = big_k * float(n) ** s0 * eps0
    report = StepReport(
        n=n,
        big_k=big_k,
        resonance=res,
        report_t=rep_t,
        report_z=rep_z,
        angle_in=c.angle,
        angle_out=c_out.angle,
        eps_in_0=eps0,
        eps_in_s=eps_s,
        eps_out_0=eps_out0,
        eps_out_s=eps_outs,
        y_norm_0=y0,
        y_norm_s=ys,
        gate_value=gate,
        c1_fit=ys / scale if scale > 0 else 0.0,
        c2_fit=eps_out0 / (scale * eps0) if scale * eps0 > 0 else 0.0,
        aliasing=aliasing,
        band_out=band_out,
        s0=s0,
        warnings=warnings,
    )
    return G, c_out, report
