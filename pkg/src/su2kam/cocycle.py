"""Quasiperiodic cocycles on T x SU(2): iteration, conjugation, planting.

A cocycle (alpha, A(.)) acts on T x SU(2) by (x, S) -> (x + alpha, A(x) S).
The scheme works on the canonical perturbed-constant form (alpha, A e^{F(.)})
with A diagonal; general cocycles keep their fiber map factored.  Conjugation
by B(.) sends A(.) to B(. + alpha) A(.) B^{-1}(.), which leaves the dynamics
essentially unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fourier, su2
from .errors import AntipodeError

#: maximal ||F||_C0 accepted for the perturbed-constant form
PERTURBATION_LIMIT = 1.0

#: general -> perturbed conversion refuses logs beyond this C^0 size
CONVERSION_LIMIT = 0.5


def normalize_angle(a: float) -> float:
    """Fold into (-1/2, 1/2]; ties at +-1/2 resolve to +1/2."""
    a = a - np.round(a)
    if a == -0.5:
        a = 0.5
    return float(a)


@dataclass(frozen=True)
class PerturbedCocycle:
    """(alpha, A e^{F(.)}) with A = {e^{2 i pi a}, 0} diagonal."""

    alpha: float
    angle: float
    F: fourier.AlgebraMap

    def __post_init__(self):
        object.__setattr__(self, "angle", normalize_angle(self.angle))
        eps0 = fourier.algebra_norm(self.F, "Cs", 0)
        if eps0 >= PERTURBATION_LIMIT:
            raise ValueError(f"||F||_0 = {eps0:.3g} >= {PERTURBATION_LIMIT}; not perturbative")

    @property
    def constant(self) -> su2.Su2Element:
        return su2.diagonal(self.angle)

    def eps(self, s: int = 0) -> float:
        return fourier.algebra_norm(self.F, "Cs", s)

    def values(self, m: int, shift: float = 0.0):
        """(z, w) arrays of A e^{F} on the grid x_j = j/m + shift."""
        t, u = self.F.values(m, shift)
        z, w = su2.exp_grid(np.real(t), u)
        a = self.constant
        return su2.compose_grid(np.full(m, a.z), np.full(m, a.w), z, w)

    def to_general(self) -> "GeneralCocycle":
        return GeneralCocycle(
            self.alpha,
            fourier.GroupMap((fourier.ConstantFactor(self.constant), fourier.ExpFactor(self.F))),
        )


@dataclass(frozen=True)
class GeneralCocycle:
    """(alpha, A(.)) with a factored 1-periodic fiber map."""

    alpha: float
    A_map: fourier.GroupMap

    def __post_init__(self):
        self.A_map.require_periodic()

    def values(self, m: int, shift: float = 0.0):
        return self.A_map.values(m, shift)


def iterate(c: GeneralCocycle, n: int) -> fourier.GroupMap:
    """The quasiperiodic product A_n(.), as a factored map.

    A_n(x) = A(x + (n-1) alpha) ... A(x) for n > 0, Id for n = 0, and
    A*(x + n alpha) ... A*(x - alpha) for n < 0.
    """
    if n == 0:
        return fourier.identity_map()
    out = fourier.identity_map()
    if n > 0:
        for j in range(n - 1, -1, -1):
            out = out.compose(c.A_map.shifted(j * c.alpha))
    else:
        inv = c.A_map.inverse()
        for j in range(n, 0):
            out = out.compose(inv.shifted(j * c.alpha))
    return out


def conjugate(B: fourier.GroupMap, c: GeneralCocycle) -> GeneralCocycle:
    """Conj_B: (alpha, A(.)) -> (alpha, B(. + alpha) A(.) B^{-1}(.))."""
    B.require_periodic()
    return GeneralCocycle(c.alpha, B.shifted(c.alpha).compose(c.A_map).compose(B.inverse()))


def plant_reducible(alpha: float, A_d: su2.Su2Element, D: fourier.GroupMap) -> GeneralCocycle:
    """The cocycle that D(.) conjugates to the constant (alpha, A_d)."""
    D.require_periodic()
    planted = D.inverse().shifted(alpha).compose(fourier.constant_map(A_d)).compose(D)
    return GeneralCocycle(alpha, planted)


def to_perturbed(c: GeneralCocycle, band: int, m: int | None = None):
    """Canonical perturbed-constant form (P A(.) P* = A_c e^{F}, A_c diagonal).

    Returns (PerturbedCocycle, P) where P is the diagonalizing constant.
    Raises AntipodeError when A(.) strays more than CONVERSION_LIMIT from a
    single constant, i.e. when the log leaves its safe branch.
    """
    from .kamstep import diagonalize_constant   # cycle: kamstep builds on this module

    if m is None:
        m = _grid_for_band(band)
    z, w = c.values(m)
    mean = su2.Su2Element(*su2.renorm_grid(np.mean(z), np.mean(w)))
    P, angle = diagonalize_constant(mean)
    pz, pw = np.full(m, P.z), np.full(m, P.w)
    z, w = su2.compose_grid(*su2.compose_grid(pz, pw, z, w), *su2.conj_grid(pz, pw))
    a_c = su2.diagonal(angle)
    t, u = su2.log_grid(*su2.compose_grid(np.full(m, np.conj(a_c.z)), np.zeros(m), z, w))
    size = float(np.max(np.hypot(t, np.abs(u))))
    if size >= CONVERSION_LIMIT:
        raise AntipodeError(f"||log(A* A(.))||_0 = {size:.3g} >= {CONVERSION_LIMIT}")
    F = fourier.algebra_from_grid(t, u, band)
    return PerturbedCocycle(c.alpha, angle, F), P


def _grid_for_band(band: int) -> int:
    m = 64
    while m < fourier.OVERSAMPLE_MIN * band + 1:
        m *= 2
    return m


def almost_reducibility_gap(
    c: GeneralCocycle,
    B_n: fourier.GroupMap,
    A_n: su2.Su2Element,
    m: int = 256,
) -> tuple:
    """(g1, g2): distance of Conj_{B_n} c from the constant A_n.

    g1 = ||log(A_n* B_n(. + alpha) A(.) B_n*(.))||_C0 and g2 is the C^0 norm
    of the same field pushed forward by Ad(B_n(.)); both vanish exactly at a
    true conjugacy to the constant.
    """
    conj = conjugate(B_n, c)
    z, w = conj.values(m)
    az, aw = np.full(m, np.conj(A_n.z)), np.full(m, -A_n.w)
    t, u = su2.log_grid(*su2.compose_grid(az, aw, z, w))
    g1 = float(np.max(np.hypot(t, np.abs(u))))
    bz, bw = B_n.values(m)
    fz, fw = su2.exp_grid(t, u)
    cz, cw = su2.compose_grid(*su2.compose_grid(bz, bw, fz, fw), *su2.conj_grid(bz, bw))
    t2, u2 = su2.log_grid(cz, cw)
    g2 = float(np.max(np.hypot(t2, np.abs(u2))))
    return g1, g2
