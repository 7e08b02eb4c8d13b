"""Upper half-plane geometry and the weight-k phase calculus.

Provides the Moebius action of real determinant-one matrices, the standard
point-pair quantities (u, sigma, cosh of the distance, the distance itself),
the unit-modulus automorphy phase attached to a matrix and a weight, the
two-point phase pairing it, and the integer winding defect of argument
branches under composition together with its unitary exponential.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .errors import ConsistencyError, DomainError

__all__ = [
    "Point",
    "Mat2",
    "WeightContext",
    "PairMetrics",
    "moebius_act",
    "pair_metrics",
    "j_phase",
    "h_k",
    "winding_w",
    "omega_k",
]


@dataclass(frozen=True)
class Point:
    """A point x + iy of the upper half-plane (y > 0)."""

    x: float
    y: float

    def __post_init__(self):
        if not (self.y > 0.0) or not math.isfinite(self.y) or not math.isfinite(self.x):
            raise DomainError(f"Point requires finite y > 0, got {self.x} + {self.y}i")

    @classmethod
    def of(cls, z: complex) -> "Point":
        return cls(z.real, z.imag)

    def as_complex(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True)
class Mat2:
    """Real 2x2 matrix with determinant one (checked to 1e-12)."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if abs(det - 1.0) > 1e-12:
            raise DomainError(f"Mat2 determinant must be 1, got {det}")

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Mat2":
        return Mat2(self.d, -self.b, -self.c, self.a)

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class WeightContext:
    """A real weight k with its branch split k = k1 + k2 and derived constants.

    k1 is the integer part chosen so that k2 lands in (-1/2, 1/2]; A is the
    spectral-parameter bound max{1/2, |k| - 1/2} and lambda0 = |k|(1 - |k|)
    the bottom eigenvalue marker.  lambda0 >= 1/4 - A^2 always holds (with
    equality for |k| > 1).
    """

    k: float
    k1: int = field(init=False)
    k2: float = field(init=False)
    A: float = field(init=False)
    lambda0: float = field(init=False)

    def __post_init__(self):
        if not math.isfinite(self.k):
            raise DomainError(f"weight must be finite, got {self.k}")
        k1 = math.ceil(self.k - 0.5)
        object.__setattr__(self, "k1", int(k1))
        object.__setattr__(self, "k2", self.k - k1)
        object.__setattr__(self, "A", max(0.5, abs(self.k) - 0.5))
        object.__setattr__(self, "lambda0", abs(self.k) * (1.0 - abs(self.k)))


@dataclass(frozen=True)
class PairMetrics:
    """The four standard two-point quantities: u, sigma = 1+u, cosh d = 1+2u, d."""

    u: float
    sigma: float
    cosh_d: float
    dist: float


def moebius_act(g: Mat2, z: Point) -> Point:
    """Apply the fractional linear map z -> (az + b)/(cz + d)."""
    zc = z.as_complex()
    den = g.c * zc + g.d
    num = g.a * zc + g.b
    norm2 = den.real * den.real + den.imag * den.imag
    w = num * den.conjugate() / norm2
    # recompute the height from the exact transformation rule: Im = y/|cz+d|^2
    return Point(w.real, z.y / norm2)


def pair_metrics(z: Point, w: Point) -> PairMetrics:
    """u, sigma, cosh(distance) and distance between two half-plane points.

    u = |z-w|^2 / (4 Im z Im w); the rest follow from sigma = 1+u and
    cosh d = 1+2u.  The distance uses 2*asinh(sqrt(u)), which is accurate
    down to coincident points.
    """
    dx = z.x - w.x
    dy = z.y - w.y
    u = (dx * dx + dy * dy) / (4.0 * z.y * w.y)
    return PairMetrics(
        u=u,
        sigma=1.0 + u,
        cosh_d=1.0 + 2.0 * u,
        dist=2.0 * math.asinh(math.sqrt(u)),
    )


def j_phase(g: Mat2, z: Point, ctx: WeightContext) -> complex:
    """The unit phase exp(2ik arg(cz + d)) with the principal argument."""
    # A matrix product can leave c as -0.0; then c*z.y is -0.0 and atan2
    # would pick arg = -pi for negative d, while the winding bookkeeping
    # (complex arithmetic) lands on +pi.  Canonicalize so both agree.
    c = g.c + 0.0
    ang = math.atan2(c * z.y, c * z.x + g.d)
    return cmath.exp(complex(0.0, 2.0 * ctx.k * ang))


def h_k(z: Point, w: Point, ctx: WeightContext) -> complex:
    """Unit-modulus two-point phase of weight k.

    With zeta = (z-w)/(z-w̄) this is ((1-zeta)^2/|1-zeta|^2)^k evaluated as
    exp(2ik Arg(1-zeta)).  Since 1-zeta = 2i Im(w)/(z-w̄) lies in the open
    right half-plane, the principal argument never touches the branch cut,
    which is exactly the k = k1 + k2 branch rule.
    """
    den = complex(z.x - w.x, z.y + w.y)  # z - conj(w), always in the upper half-plane
    r = complex(0.0, 2.0 * w.y) / den
    ang = math.atan2(r.imag, r.real)
    return cmath.exp(complex(0.0, 2.0 * ctx.k * ang))


def _winding_at(g1: Mat2, g2: Mat2, prod: Mat2, z: complex) -> float:
    gz = (g2.a * z + g2.b) / (g2.c * z + g2.d)
    a1 = cmath.phase(g1.c * gz + g1.d)
    a2 = cmath.phase(g2.c * z + g2.d)
    a3 = cmath.phase(prod.c * z + prod.d)
    return (a1 + a2 - a3) / (2.0 * math.pi)


def winding_w(g1: Mat2, g2: Mat2) -> int:
    """Integer branch defect w of the argument cocycle under composition.

    2*pi*w = arg j(g1, g2 z) + arg j(g2, z) - arg j(g1 g2, z), which is an
    integer in {-1, 0, 1} independent of z.  Evaluated at z = 2i and checked
    again at z = 1 + 3i; a disagreement signals an argument-branch bug and
    raises ConsistencyError.
    """
    prod = g1 @ g2
    w_a = _winding_at(g1, g2, prod, 2.0j)
    w_b = _winding_at(g1, g2, prod, 1.0 + 3.0j)
    w_int = round(w_a)
    if abs(w_a - w_int) > 1e-6 or abs(w_b - w_int) > 1e-6:
        raise ConsistencyError(
            f"winding defect not integral/stable: {w_a} at 2i vs {w_b} at 1+3i"
        )
    return int(w_int)


def omega_k(g1: Mat2, g2: Mat2, ctx: WeightContext) -> complex:
    """The unitary factor exp(4 pi i k w(g1, g2)) attached to the winding defect."""
    return cmath.exp(complex(0.0, 4.0 * math.pi * ctx.k * winding_w(g1, g2)))
