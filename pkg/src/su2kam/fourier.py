"""Band-limited Fourier series on the torus and factored group-valued maps.

A ``ScalarSeries`` stores coefficients c(k), |k| <= n_max, of
f(x) = sum c(k) e^{2 i pi k x}.  Real-valued series carry the Hermitian
symmetry c(-k) = conj(c(k)).  Truncation operators:

    T_N f      keep |k| <= N
    T'_N f     T_N f minus the mean c(0)
    T^c_N f    keep 0 < |k - c| <= N   (centered at a resonant mode)

and the matching rests R_N.  Norms: H^s exactly from coefficients,
C^s (integer s) as the grid max of spectral derivatives up to order s.

``AlgebraMap`` is an su(2)-valued series split into a real t-channel and a
complex z-channel.  ``GroupMap`` is an ordered product of geodesic factors
exp(pi (m x) v), constants, and exponentials of algebra maps; it is kept
factored so that large conjugations never go through a logarithm.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import su2
from .errors import ParityError

#: grid size must be at least OVERSAMPLE_MIN * n_max + 1 for alias-free products
OVERSAMPLE_MIN = 3

HERMITIAN_TOL = 1e-14
SUPPORT_THRESHOLD = 1e-13


@dataclass(frozen=True)
class ScalarSeries:
    """Trigonometric polynomial of band n_max; coeffs[k + n_max] = c(k)."""

    coeffs: np.ndarray
    n_max: int
    real_valued: bool = False

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (2 * self.n_max + 1,):
            raise ValueError("coefficient array does not match the band")
        object.__setattr__(self, "coeffs", c)
        if self.real_valued:
            err = np.max(np.abs(c - np.conj(c[::-1])))
            if err > 1e-10:
                raise ValueError(f"real-valued channel is not Hermitian (err={err})")

    def coeff(self, k: int) -> complex:
        if abs(k) > self.n_max:
            return 0j
        return complex(self.coeffs[k + self.n_max])

    def with_band(self, n_max: int) -> "ScalarSeries":
        """Re-embed (or project) into band n_max."""
        out = np.zeros(2 * n_max + 1, dtype=complex)
        lo = min(self.n_max, n_max)
        out[n_max - lo : n_max + lo + 1] = self.coeffs[self.n_max - lo : self.n_max + lo + 1]
        return ScalarSeries(out, n_max, self.real_valued)

    def shifted(self, alpha: float) -> "ScalarSeries":
        """The series of x -> f(x + alpha)."""
        k = np.arange(-self.n_max, self.n_max + 1)
        return ScalarSeries(self.coeffs * np.exp(2j * np.pi * k * alpha), self.n_max, self.real_valued)

    def synthesize(self, m: int, shift: float = 0.0) -> np.ndarray:
        """Values on the uniform grid x_j = j/m + shift."""
        if m < OVERSAMPLE_MIN * self.n_max + 1:
            raise ValueError(f"grid size {m} undersamples band {self.n_max}")
        c = self.coeffs if shift == 0.0 else self.shifted(shift).coeffs
        spec = np.zeros(m, dtype=complex)
        k = np.arange(-self.n_max, self.n_max + 1)
        spec[k % m] = c
        vals = m * np.fft.ifft(spec)
        return vals.real if self.real_valued else vals

    def evaluate(self, x) -> np.ndarray:
        """Direct summation at arbitrary points (small-scale use)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        k = np.arange(-self.n_max, self.n_max + 1)
        vals = np.exp(2j * np.pi * np.outer(x, k)) @ self.coeffs
        return vals.real if self.real_valued else vals

    def derivative(self, order: int) -> "ScalarSeries":
        k = np.arange(-self.n_max, self.n_max + 1)
        return ScalarSeries(self.coeffs * (2j * np.pi * k) ** order, self.n_max, False)

    def __add__(self, other: "ScalarSeries") -> "ScalarSeries":
        n = max(self.n_max, other.n_max)
        return ScalarSeries(
            self.with_band(n).coeffs + other.with_band(n).coeffs,
            n,
            self.real_valued and other.real_valued,
        )

    def scale(self, c: complex) -> "ScalarSeries":
        real = self.real_valued and complex(c).imag == 0.0
        return ScalarSeries(self.coeffs * c, self.n_max, real)


def zeros(n_max: int, real_valued: bool = False) -> ScalarSeries:
    return ScalarSeries(np.zeros(2 * n_max + 1, dtype=complex), n_max, real_valued)


def from_modes(modes: dict, n_max: int, real_valued: bool = False) -> ScalarSeries:
    """Series from a {k: coefficient} table; Hermitian completion for real channels."""
    c = np.zeros(2 * n_max + 1, dtype=complex)
    for k, v in modes.items():
        if abs(k) > n_max:
            raise ValueError(f"mode {k} outside band {n_max}")
        c[k + n_max] = v
    if real_valued:
        c = 0.5 * (c + np.conj(c[::-1]))
    return ScalarSeries(c, n_max, real_valued)


def analyze(samples: np.ndarray, n_max: int, real_valued: bool = False) -> ScalarSeries:
    """Discrete Fourier analysis of uniform-grid samples onto band n_max."""
    samples = np.asarray(samples)
    m = samples.shape[0]
    if m < OVERSAMPLE_MIN * n_max + 1:
        raise ValueError(f"grid size {m} undersamples band {n_max}")
    spec = np.fft.fft(samples) / m
    k = np.arange(-n_max, n_max + 1)
    c = spec[k % m]
    if real_valued:
        c = 0.5 * (c + np.conj(c[::-1]))
    return ScalarSeries(c, n_max, real_valued)


# -- truncation and rest operators --------------------------------------------


def truncate(f: ScalarSeries, n: int, mode: str = "full", center: int = 0) -> ScalarSeries:
    """T_N (full), T_N minus the mean (dotted), or the centered projection."""
    if n < 0:
        raise ValueError("truncation order must be >= 0")
    k = np.arange(-f.n_max, f.n_max + 1)
    if mode == "full":
        keep = np.abs(k) <= n
    elif mode == "dotted":
        keep = (np.abs(k) <= n) & (k != 0)
    elif mode == "centered":
        keep = (np.abs(k - center) <= n) & (k != center)
    else:
        raise ValueError(f"unknown truncation mode {mode!r}")
    return ScalarSeries(np.where(keep, f.coeffs, 0.0), f.n_max, f.real_valued and mode in ("full", "dotted"))


def rest(f: ScalarSeries, n: int, mode: str = "standard", center: int = 0) -> ScalarSeries:
    """R_N: the high-frequency complement of the matching truncation."""
    if n < 0:
        raise ValueError("truncation order must be >= 0")
    k = np.arange(-f.n_max, f.n_max + 1)
    if mode == "standard":
        keep = np.abs(k) > n
    elif mode == "centered":
        keep = np.abs(k - center) > n
    else:
        raise ValueError(f"unknown rest mode {mode!r}")
    return ScalarSeries(np.where(keep, f.coeffs, 0.0), f.n_max, f.real_valued and mode == "standard")


def spectral_support(f: ScalarSeries, threshold: float = SUPPORT_THRESHOLD) -> set:
    k = np.arange(-f.n_max, f.n_max + 1)
    return set(int(kk) for kk in k[np.abs(f.coeffs) > threshold])


# -- norms ---------------------------------------------------------------------


def hs_norm(f: ScalarSeries, s: float) -> float:
    if s < 0:
        raise ValueError("Sobolev order must be >= 0")
    k = np.arange(-f.n_max, f.n_max + 1)
    return float(np.sqrt(np.sum((1.0 + k.astype(float) ** 2) ** s * np.abs(f.coeffs) ** 2)))


def cs_norm(f: ScalarSeries, s: int, oversample: int = 4) -> float:
    if s != int(s) or s < 0:
        raise ValueError("C^s norms are only computed for integer s >= 0")
    m = max(oversample * (2 * f.n_max + 1), 64)
    return max(
        float(np.max(np.abs(f.derivative(order).synthesize(m)))) for order in range(int(s) + 1)
    )


# -- su(2)-valued maps ---------------------------------------------------------


@dataclass(frozen=True)
class AlgebraMap:
    """Map T -> su(2): a real t-channel and a complex z-channel."""

    t_channel: ScalarSeries
    z_channel: ScalarSeries

    def __post_init__(self):
        if not self.t_channel.real_valued:
            raise ValueError("t-channel must be a real-valued series")

    @property
    def band(self) -> int:
        return max(self.t_channel.n_max, self.z_channel.n_max)

    def values(self, m: int, shift: float = 0.0):
        """(t, u) arrays on the grid x_j = j/m + shift."""
        return (
            self.t_channel.synthesize(m, shift),
            self.z_channel.synthesize(m, shift),
        )

    def evaluate(self, x) -> list:
        ts = self.t_channel.evaluate(x)
        us = self.z_channel.evaluate(x)
        return [su2.AlgebraElement(float(t), complex(u)) for t, u in zip(ts, us)]

    def scale(self, c: float) -> "AlgebraMap":
        return AlgebraMap(self.t_channel.scale(c), self.z_channel.scale(c))

    def shifted(self, alpha: float) -> "AlgebraMap":
        return AlgebraMap(self.t_channel.shifted(alpha), self.z_channel.shifted(alpha))

    def __add__(self, other: "AlgebraMap") -> "AlgebraMap":
        return AlgebraMap(self.t_channel + other.t_channel, self.z_channel + other.z_channel)


def algebra_zeros(n_max: int) -> AlgebraMap:
    return AlgebraMap(zeros(n_max, real_valued=True), zeros(n_max))


def algebra_from_grid(t_vals: np.ndarray, u_vals: np.ndarray, n_max: int) -> AlgebraMap:
    return AlgebraMap(
        analyze(np.real(t_vals), n_max, real_valued=True),
        analyze(u_vals, n_max),
    )


def algebra_norm(f: AlgebraMap, kind: str, s: float) -> float:
    """C^s or H^s norm of an su(2)-valued map."""
    if kind == "Hs":
        return float(np.hypot(hs_norm(f.t_channel, s), hs_norm(f.z_channel, s)))
    if kind != "Cs":
        raise ValueError(f"unknown norm kind {kind!r}")
    if s != int(s) or s < 0:
        raise ValueError("C^s norms are only computed for integer s >= 0")
    m = max(4 * (2 * f.band + 1), 64)
    best = 0.0
    for order in range(int(s) + 1):
        tv = f.t_channel.derivative(order).synthesize(m)
        uv = f.z_channel.derivative(order).synthesize(m)
        best = max(best, float(np.max(np.hypot(np.abs(tv), np.abs(uv)))))
    return best


def norm(f, kind: str, s: float) -> float:
    """Dispatch on ScalarSeries vs AlgebraMap."""
    if isinstance(f, AlgebraMap):
        return algebra_norm(f, kind, s)
    if kind == "Hs":
        return hs_norm(f, s)
    if kind == "Cs":
        return cs_norm(f, int(s))
    raise ValueError(f"unknown norm kind {kind!r}")


# -- factored group-valued maps ------------------------------------------------


@dataclass(frozen=True)
class GeodesicFactor:
    """x -> exp(pi (m x) v) for an integer winding m and a unit direction v."""

    m: int
    v: su2.AlgebraElement

    def __post_init__(self):
        if abs(self.v.r - 1.0) > 1e-9:
            raise ValueError("geodesic direction must be a unit algebra element")

    def values(self, x: np.ndarray):
        theta = np.pi * self.m * x
        sin = np.sin(theta)
        return np.cos(theta) + 1j * self.v.t * sin, self.v.u * sin

    def inverse(self) -> "GeodesicFactor":
        return GeodesicFactor(-self.m, self.v)

    def shifted(self, beta: float) -> tuple:
        # exp(pi m (x + beta) v) = exp(pi m beta v) . exp(pi m x v)
        return (ConstantFactor(su2.exp_map(self.v.scale(np.pi * self.m * beta))), self)


@dataclass(frozen=True)
class ConstantFactor:
    S: su2.Su2Element

    def values(self, x: np.ndarray):
        one = np.ones_like(x, dtype=complex)
        return self.S.z * one, self.S.w * one

    def inverse(self) -> "ConstantFactor":
        return ConstantFactor(self.S.conj_transpose())

    def shifted(self, beta: float) -> tuple:
        return (self,)


@dataclass(frozen=True)
class ExpFactor:
    Y: AlgebraMap

    def values(self, x: np.ndarray):
        t = self.Y.t_channel.evaluate(x)
        u = self.Y.z_channel.evaluate(x)
        return su2.exp_grid(np.real(t), u)

    def inverse(self) -> "ExpFactor":
        return ExpFactor(self.Y.scale(-1.0))

    def shifted(self, beta: float) -> tuple:
        return (ExpFactor(self.Y.shifted(beta)),)


@dataclass(frozen=True)
class GroupMap:
    """Ordered product of factors; G(x) = factors[0](x) . factors[1](x) ..."""

    factors: tuple = field(default_factory=tuple)

    def parity(self) -> int:
        return sum(f.m for f in self.factors if isinstance(f, GeodesicFactor)) % 2

    def require_periodic(self):
        if self.parity() != 0:
            raise ParityError("total geodesic winding is odd; the map is only 2-periodic")

    def evaluate(self, x) -> tuple:
        """(z, w) arrays at arbitrary points x."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        z = np.ones_like(x, dtype=complex)
        w = np.zeros_like(x, dtype=complex)
        for f in self.factors:
            zf, wf = f.values(x)
            z, w = su2.compose_grid(z, w, zf, wf)
        return su2.renorm_grid(z, w)

    def values(self, m: int, shift: float = 0.0) -> tuple:
        """(z, w) arrays on the grid x_j = j/m + shift."""
        x = np.arange(m) / m + shift
        z = np.ones(m, dtype=complex)
        w = np.zeros(m, dtype=complex)
        for f in self.factors:
            if isinstance(f, ExpFactor) and m >= OVERSAMPLE_MIN * f.Y.band + 1:
                t, u = f.Y.values(m, shift)
                zf, wf = su2.exp_grid(np.real(t), u)
            else:
                # coarse grids: direct summation instead of the FFT path
                zf, wf = f.values(x)
            z, w = su2.compose_grid(z, w, zf, wf)
        return su2.renorm_grid(z, w)

    def inverse(self) -> "GroupMap":
        return GroupMap(tuple(f.inverse() for f in reversed(self.factors)))

    def compose(self, other: "GroupMap") -> "GroupMap":
        """Pointwise product self(x) . other(x)."""
        return GroupMap(self.factors + other.factors)

    def shifted(self, beta: float) -> "GroupMap":
        """The map x -> G(x + beta), still in factored form."""
        out = []
        for f in self.factors:
            out.extend(f.shifted(beta))
        return GroupMap(tuple(out))

    def cs_norm(self, s: int, m: int = 512) -> float:
        """C^s norm diagnostic via spectral differentiation of sampled (z, w).

        Coefficients below the support threshold are dropped before
        differentiation: high orders amplify round-off by (2 pi k)^s.
        """
        self.require_periodic()
        z, w = self.values(m)
        n_max = (m - 1) // OVERSAMPLE_MIN
        best = 0.0
        for series in (analyze(z, n_max), analyze(w, n_max)):
            c = np.where(np.abs(series.coeffs) > SUPPORT_THRESHOLD, series.coeffs, 0.0)
            clean = ScalarSeries(c, n_max)
            for order in range(int(s) + 1):
                vals = clean.derivative(order).synthesize(m)
                best = max(best, float(np.max(np.abs(vals))))
        return best


def identity_map() -> GroupMap:
    return GroupMap(())


def constant_map(S: su2.Su2Element) -> GroupMap:
    return GroupMap((ConstantFactor(S),))


def exp_of(Y: AlgebraMap) -> GroupMap:
    return GroupMap((ExpFactor(Y),))
