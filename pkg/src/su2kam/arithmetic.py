"""Diophantine machinery: distance to the integers, continued fractions,
Gauss-map orbits, finite-horizon Diophantine checks, and resonance search.

A rotation alpha is Diophantine of class (gamma, tau) when
|k alpha|_Z >= gamma^-1 / |k|^tau for every k != 0.  All membership checks
here are finite-horizon scans up to K_max and report the worst offender;
a "pass" always means "up to the horizon", never a proof.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import RationalInput

#: a partial quotient above this is treated as numerically rational
_RATIONAL_QUOTIENT = 1e12


@dataclass(frozen=True)
class DiophParams:
    """Parameters (gamma, tau) and the scan horizon K_max."""

    gamma: float
    tau: float = 2.0
    k_max: int = 10_000

    def __post_init__(self):
        if self.gamma <= 0 or self.k_max < 1:
            raise ValueError("gamma and K_max must be positive")

    @classmethod
    def from_gamma_inv(cls, gamma_inv: float, tau: float = 2.0, k_max: int = 10_000):
        return cls(1.0 / gamma_inv, tau, k_max)

    @property
    def gamma_inv(self) -> float:
        return 1.0 / self.gamma


@dataclass(frozen=True)
class DcReport:
    """Outcome of a finite-horizon Diophantine scan."""

    passed: bool
    worst_k: int
    margin: float          # min over the horizon of |k alpha - x|_Z * |k|^tau
    threshold: float       # gamma^-1
    horizon: int


@dataclass(frozen=True)
class Resonance:
    """A resonant mode k_r with |k_r alpha - 2a|_Z < 1/K, if one exists."""

    k: int | None
    dist: float
    unique_in_window: bool = True
    warnings: tuple = ()

    @property
    def found(self) -> bool:
        return self.k is not None


def frac_dist(x):
    """Distance to the nearest integer, in [0, 1/2]."""
    x = np.asarray(x, dtype=float)
    d = np.abs(x - np.round(x))
    return float(d) if d.ndim == 0 else d


@dataclass(frozen=True)
class ContinuedFraction:
    """Partial quotients a_1..a_n of alpha in (0,1) with convergents and Gauss orbit."""

    alpha: float
    quotients: tuple
    convergents: tuple     # (p_k, q_k) pairs
    gauss_orbit: tuple     # G^0(alpha) .. G^{n-1}(alpha)

    def regenerate(self) -> float:
        return from_quotients(self.quotients)


def from_quotients(quotients) -> float:
    """Value of the continued fraction [0; a_1, a_2, ...]."""
    x = 0.0
    for a in reversed(list(quotients)):
        x = 1.0 / (a + x)
    return x


def continued_fraction(alpha: float, n: int) -> ContinuedFraction:
    """First n partial quotients of alpha in (0, 1); rejects rationals."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    quotients = []
    orbit = []
    p_prev, q_prev, p, q = 1, 0, 0, 1
    x = alpha
    for _ in range(n):
        orbit.append(x)
        if x <= 1.0 / _RATIONAL_QUOTIENT:
            raise RationalInput("expansion terminated: remainder is numerically zero")
        inv = 1.0 / x
        a = np.floor(inv)
        if a > _RATIONAL_QUOTIENT:
            raise RationalInput(f"tail quotient {a:.3g} exceeds the rationality threshold")
        quotients.append(int(a))
        p_prev, q_prev, p, q = p, q, int(a) * p + p_prev, int(a) * q + q_prev
        x = inv - a
    convergents = []
    p_prev, q_prev, p, q = 1, 0, 0, 1
    for a in quotients:
        p_prev, q_prev, p, q = p, q, a * p + p_prev, a * q + q_prev
        convergents.append((p, q))
    return ContinuedFraction(alpha, tuple(quotients), tuple(convergents), tuple(orbit))


def gauss_map(alpha: float) -> float:
    return 1.0 / alpha - np.floor(1.0 / alpha)


GOLDEN_MEAN_CF = (1,) * 78   # enough quotients to regenerate phi at double precision


def golden_mean() -> float:
    """(sqrt(5) - 1) / 2, the default rotation."""
    return (np.sqrt(5.0) - 1.0) / 2.0


def _scan(values: np.ndarray, ks: np.ndarray, tau: float, gamma_inv: float, horizon: int) -> DcReport:
    weighted = values * np.abs(ks).astype(float) ** tau
    i = int(np.argmin(weighted))
    return DcReport(
        passed=bool(weighted[i] >= gamma_inv),
        worst_k=int(ks[i]),
        margin=float(weighted[i]),
        threshold=gamma_inv,
        horizon=horizon,
    )


def dc_check(alpha: float, params: DiophParams) -> DcReport:
    """Scan |k alpha|_Z >= gamma^-1/|k|^tau for 0 < k <= K_max (symmetric in k)."""
    ks = np.arange(1, params.k_max + 1)
    return _scan(frac_dist(ks * alpha), ks, params.tau, params.gamma_inv, params.k_max)


def dc_alpha_check(a_d: float, alpha: float, params: DiophParams) -> DcReport:
    """Scan |k alpha - a_d|_Z >= gamma^-1/|k|^tau for 0 < |k| <= K_max."""
    ks = np.concatenate([np.arange(1, params.k_max + 1), -np.arange(1, params.k_max + 1)])
    return _scan(frac_dist(ks * alpha - a_d), ks, params.tau, params.gamma_inv, params.k_max)


def rdc_witnesses(alpha: float, params: DiophParams, n_max: int) -> list:
    """Gauss iterates G^n(alpha), n < n_max, that pass dc_check (finite witness count)."""
    out = []
    x = alpha
    for n in range(n_max):
        if dc_check(x, params).passed:
            out.append(n)
        x = gauss_map(x)
    return out


def find_resonance(a: float, alpha: float, n: int, big_k: float) -> Resonance:
    """Smallest twisted divisor |k alpha - 2a|_Z over 0 <= |k| <= n.

    Returns the minimizing k when the minimum beats 1/K, with ties broken by
    smaller distance then smaller |k|, and verifies uniqueness in the window
    |k - k_r| <= 2n.
    """
    if n < 1 or big_k <= 0:
        raise ValueError("need n >= 1 and K > 0")
    ks = np.arange(-n, n + 1)
    dists = frac_dist(ks * alpha - 2.0 * a)
    order = np.lexsort((np.abs(ks), dists))
    k_best, d_best = int(ks[order[0]]), float(dists[order[0]])
    if d_best >= 1.0 / big_k:
        return Resonance(None, d_best)
    window = np.arange(k_best - 2 * n, k_best + 2 * n + 1)
    hits = int(np.sum(frac_dist(window * alpha - 2.0 * a) < 1.0 / big_k))
    warnings = ()
    if hits > 1:
        warnings = (f"{hits} sub-threshold divisors in the uniqueness window",)
    return Resonance(k_best, d_best, unique_in_window=(hits <= 1), warnings=warnings)
