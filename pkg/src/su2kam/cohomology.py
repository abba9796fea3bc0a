"""Per-mode solution of the linearized conjugation equations.

Diagonal (t) channel:  Y_t(. + alpha) - Y_t(.) = -T'_N F_t(.)
    Y_t(k) = -F_t(k) / (e^{2 i pi k alpha} - 1),  0 < |k| <= N;
    the mean F_t(0) is an obstruction and stays on the right-hand side.

Twisted (z) channel:   e^{-4 i pi a} Y_z(. + alpha) - Y_z(.) = -T F_z(.)
    (e^{2 i pi (k alpha - 2a)} - 1) Y_z(k) = -F_z(k)
    solved on 0 < |k - k_r| <= 2N when a resonant mode k_r with
    |k_r alpha - 2a|_Z < 1/K exists (on |k| <= N otherwise); the resonant
    coefficient F_z(k_r) is the second obstruction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import arithmetic, fourier
from .errors import DivisorUnderflow

#: divisors below this (outside the excluded set) abort the solve
DIVISOR_FLOOR = 1e-14


@dataclass(frozen=True)
class SolveReport:
    """Bookkeeping for one channel solve."""

    channel: str
    band: int
    solve_order: int                  # N
    solved_modes: tuple
    excluded_modes: tuple
    obstruction: complex
    min_divisor: float                # smallest |e^{i theta} - 1| actually divided by
    sup_ratio: float                  # ||Y||_C0 / (N^{nu + 1/2} ||F||_C0), 0 if F = 0
    warnings: tuple = ()


def _divisors(thetas: np.ndarray) -> np.ndarray:
    return np.abs(np.exp(2j * np.pi * thetas) - 1.0)


def solve_diagonal(
    F_t: fourier.ScalarSeries,
    alpha: float,
    n: int,
    tau: float = 2.0,
) -> tuple:
    """Solve the difference equation on 0 < |k| <= N.  Returns (Y_t, report)."""
    if not F_t.real_valued:
        raise ValueError("diagonal channel must be real-valued")
    band = F_t.n_max
    k = np.arange(-band, band + 1)
    solved = (k != 0) & (np.abs(k) <= n)
    theta = k * alpha
    div = np.exp(2j * np.pi * theta) - 1.0
    mag = _divisors(theta)
    active = solved & (np.abs(F_t.coeffs) > 0)
    if np.any(active & (mag < DIVISOR_FLOOR)):
        bad = k[active & (mag < DIVISOR_FLOOR)]
        raise DivisorUnderflow(f"divisor underflow at k={bad.tolist()} (diagonal channel)")
    coeffs = np.where(solved, -F_t.coeffs / np.where(solved, div, 1.0), 0.0)
    Y = fourier.ScalarSeries(coeffs, band, real_valued=True)
    f0 = fourier.cs_norm(F_t, 0)
    ratio = fourier.cs_norm(Y, 0) / (n ** (tau + 0.5) * f0) if f0 > 0 else 0.0
    return Y, SolveReport(
        channel="t",
        band=band,
        solve_order=n,
        solved_modes=tuple(k[solved].tolist()),
        excluded_modes=(0,),
        obstruction=complex(F_t.coeff(0)),
        min_divisor=float(np.min(mag[active])) if np.any(active) else np.inf,
        sup_ratio=ratio,
    )


def solve_twisted(
    F_z: fourier.ScalarSeries,
    a: float,
    alpha: float,
    n: int,
    big_k: float,
    nu: float = 3.0,
) -> tuple:
    """Solve the twisted equation.  Returns (Y_z, resonance, report)."""
    band = F_z.n_max
    res = arithmetic.find_resonance(a, alpha, n, big_k)
    k = np.arange(-band, band + 1)
    if res.found:
        solved = (k != res.k) & (np.abs(k - res.k) <= 2 * n)
        excluded = (res.k,)
        obstruction = complex(F_z.coeff(res.k))
    else:
        solved = np.abs(k) <= n
        excluded = ()
        obstruction = 0j
    theta = k * alpha - 2.0 * a
    div = np.exp(2j * np.pi * theta) - 1.0
    mag = _divisors(theta)
    active = solved & (np.abs(F_z.coeffs) > 0)
    if np.any(active & (mag < DIVISOR_FLOOR)):
        bad = k[active & (mag < DIVISOR_FLOOR)]
        raise DivisorUnderflow(f"divisor underflow at k={bad.tolist()} (twisted channel)")
    coeffs = np.where(solved, -F_z.coeffs / np.where(solved, div, 1.0), 0.0)
    Y = fourier.ScalarSeries(coeffs, band)
    f0 = fourier.cs_norm(F_z, 0)
    ratio = fourier.cs_norm(Y, 0) / (n ** (nu + 0.5) * f0) if f0 > 0 else 0.0
    return Y, res, SolveReport(
        channel="z",
        band=band,
        solve_order=n,
        solved_modes=tuple(k[solved].tolist()),
        excluded_modes=excluded,
        obstruction=obstruction,
        min_divisor=float(np.min(mag[active])) if np.any(active) else np.inf,
        sup_ratio=ratio,
        warnings=res.warnings,
    )


def required_k(n: int, gamma: float, tau: float, c: float = 1.0) -> float:
    """Standing lower bound C gamma N^tau on the resonance cutoff K."""
    return c * gamma * n**tau
