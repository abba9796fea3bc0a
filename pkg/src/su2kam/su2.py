"""Exact-coordinate arithmetic in SU(2) and su(2).

Group elements are stored as the pair (z, w) of the first matrix row,

    S = [[z, w], [-conj(w), conj(z)]],   |z|^2 + |w|^2 = 1,

and algebra elements as (t, u) with

    s = [[i t, u], [-conj(u), -i t]],    t real, u complex.

Under the identification su(2) ~ R x C ~ R^3 the basis (h, j, ij) is
orthonormal, the bracket is twice the vector cross product, and the
adjoint action of the group is the usual SO(3) rotation.  For a diagonal
S = exp({2 pi s, 0}) the rotation is explicit: Ad(S).{t, u} = {t, e^{4 i pi s} u}.

Scalar operations work on the frozen dataclasses below; the ``*_grid``
functions apply the same formulas to numpy arrays of (z, w) / (t, u)
values, which is what cocycle iteration and the conjugation step use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AntipodeError

#: below this radius sin(r)/r and r/sin(r) switch to their Taylor series
_SMALL_R = 1e-4

#: admissible drift of |z|^2+|w|^2 before renormalization is considered broken
UNIT_TOL = 1e-12

#: minimal distance to -Id at which the principal log is still accepted
ANTIPODE_TOL = 1e-9


@dataclass(frozen=True)
class AlgebraElement:
    """Element {t, u} of su(2); t real (h-coordinate), u complex (j, ij)."""

    t: float
    u: complex

    @property
    def r(self) -> float:
        """Euclidean norm sqrt(t^2 + |u|^2)."""
        return float(np.hypot(self.t, abs(self.u)))

    def as_vector(self) -> np.ndarray:
        """Coordinates (t, Re u, Im u) in the (h, j, ij) basis."""
        return np.array([self.t, self.u.real, self.u.imag])

    def as_matrix(self) -> np.ndarray:
        return np.array([[1j * self.t, self.u], [-np.conj(self.u), -1j * self.t]])

    def scale(self, c: float) -> "AlgebraElement":
        return AlgebraElement(c * self.t, c * self.u)

    def add(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.t + other.t, self.u + other.u)


@dataclass(frozen=True)
class Su2Element:
    """Element {z, w} of SU(2); renormalized to the unit sphere on construction."""

    z: complex
    w: complex

    def __post_init__(self):
        n = np.hypot(abs(self.z), abs(self.w))
        if abs(n - 1.0) > 1e-6:
            raise ValueError(f"(z, w) too far from the unit sphere: |.|={n}")
        if n != 1.0:
            object.__setattr__(self, "z", self.z / n)
            object.__setattr__(self, "w", self.w / n)

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.z, self.w], [-np.conj(self.w), np.conj(self.z)]])

    def conj_transpose(self) -> "Su2Element":
        return Su2Element(np.conj(self.z), -self.w)

    def dist(self, other: "Su2Element") -> float:
        """Euclidean distance on S^3 in C^2."""
        return float(np.hypot(abs(self.z - other.z), abs(self.w - other.w)))


IDENTITY = Su2Element(1.0, 0.0)
MINUS_IDENTITY = Su2Element(-1.0, 0.0)

H = AlgebraElement(1.0, 0.0)
J = AlgebraElement(0.0, 1.0)
IJ = AlgebraElement(0.0, 1j)


def from_vector(v) -> AlgebraElement:
    """Inverse of :meth:`AlgebraElement.as_vector`."""
    return AlgebraElement(float(v[0]), complex(v[1] + 1j * v[2]))


def diagonal(angle: float) -> Su2Element:
    """The diagonal element {e^{2 i pi angle}, 0}."""
    return Su2Element(np.exp(2j * np.pi * angle), 0.0)


def compose(s1: Su2Element, s2: Su2Element) -> Su2Element:
    """Matrix product of two group elements (renormalized)."""
    return Su2Element(
        s1.z * s2.z - s1.w * np.conj(s2.w),
        s1.z * s2.w + s1.w * np.conj(s2.z),
    )


def _sinc(r: float) -> float:
    # sin(r)/r with its series below _SMALL_R
    if r < _SMALL_R:
        return 1.0 - r * r / 6.0
    return np.sin(r) / r


def exp_map(s: AlgebraElement) -> Su2Element:
    """Group exponential: cos(r) Id + (sin(r)/r) s."""
    r = s.r
    c = _sinc(r)
    return Su2Element(np.cos(r) + 1j * s.t * c, s.u * c)


def log_map(S: Su2Element) -> AlgebraElement:
    """Principal logarithm, r in [0, pi).  Raises AntipodeError near -Id."""
    if S.dist(MINUS_IDENTITY) <= ANTIPODE_TOL:
        raise AntipodeError("log is not unique at -Id")
    # on the unit sphere sin(r) equals the norm of the vector part exactly
    vec = np.hypot(S.z.imag, abs(S.w))
    r = np.arctan2(vec, S.z.real)
    f = r / vec if vec > 0 else 1.0
    return AlgebraElement(S.z.imag * f, S.w * f)


def bracket(s1: AlgebraElement, s2: AlgebraElement) -> AlgebraElement:
    """Lie bracket, equal to twice the vector cross product in R^3."""
    return from_vector(2.0 * np.cross(s1.as_vector(), s2.as_vector()))


def adjoint_action(S: Su2Element, s: AlgebraElement) -> AlgebraElement:
    """Ad(S).s = S s S^*, an SO(3) rotation of the algebra."""
    m = S.as_matrix() @ s.as_matrix() @ S.conj_transpose().as_matrix()
    return AlgebraElement(float(m[0, 0].imag), complex(m[0, 1]))


# -- vectorized (grid) versions ------------------------------------------------
#
# A grid of group values is a pair of complex arrays (z, w); a grid of
# algebra values is a pair (t, u) with t real and u complex.


def compose_grid(z1, w1, z2, w2):
    return z1 * z2 - w1 * np.conj(w2), z1 * w2 + w1 * np.conj(z2)


def conj_grid(z, w):
    return np.conj(z), -w


def exp_grid(t, u):
    r = np.hypot(t, np.abs(u))
    r_safe = np.where(r < _SMALL_R, 1.0, r)
    c = np.where(r < _SMALL_R, 1.0 - r * r / 6.0, np.sin(r_safe) / r_safe)
    return np.cos(r) + 1j * t * c, u * c


def log_grid(z, w, antipode_tol: float = ANTIPODE_TOL):
    """Pointwise principal logarithm on a grid of group values."""
    vec = np.hypot(z.imag, np.abs(w))
    if np.any((vec <= antipode_tol) & (z.real < 0)):
        raise AntipodeError("grid value too close to -Id for the principal log")
    r = np.arctan2(vec, z.real)
    f = r / np.where(vec == 0, 1.0, vec)
    return z.imag * f, w * f


def renorm_grid(z, w):
    n = np.hypot(np.abs(z), np.abs(w))
    return z / n, w / n


def dist_grid(z1, w1, z2, w2):
    """Pointwise S^3 distance; returns the max over the grid."""
    return float(np.max(np.hypot(np.abs(z1 - z2), np.abs(w1 - w2))))
