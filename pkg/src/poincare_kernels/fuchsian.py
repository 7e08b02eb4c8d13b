"""The integer matrix group of determinant one acting on the half-plane.

Ball enumeration with a completeness certificate, the orbit counting
function, exact Dedekind sums, and the eta-power unitary multiplier system
for arbitrary real weight (plus the trivial one at integer weight).  The
group is fixed to the cover containing -I; the types keep a d_dim slot so a
vector-valued system could be added, but the shipped systems are scalar.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import core, geom
from .errors import ConventionError, DomainError

__all__ = [
    "GroupElement",
    "BallResult",
    "MultiplierSystem",
    "IDENTITY",
    "T",
    "S",
    "enumerate_ball",
    "counting_N",
    "dedekind_sum",
    "eta_phase",
    "chi",
    "consistency_residual",
    "random_word",
    "sigma_of",
]


@dataclass(frozen=True)
class GroupElement:
    """Integer matrix (a, b; c, d) with exact determinant one."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            v = getattr(self, name)
            if v != int(v):
                raise DomainError(f"GroupElement entries must be integers, got {name}={v}")
            object.__setattr__(self, name, int(v))
        if self.a * self.d - self.b * self.c != 1:
            raise DomainError(
                f"GroupElement determinant must be exactly 1: {self.as_tuple()}"
            )

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def to_mat2(self) -> geom.Mat2:
        return geom.Mat2(float(self.a), float(self.b), float(self.c), float(self.d))

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> "GroupElement":
        return GroupElement(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)


IDENTITY = GroupElement(1, 0, 0, 1)
T = GroupElement(1, 1, 0, 1)
S = GroupElement(0, -1, 1, 0)


def sigma_of(g: GroupElement, z: geom.Point, w: geom.Point) -> float:
    """Displacement sigma(z, g w), with the same arithmetic as the ball sweep."""
    dr = g.c * w.x + g.d
    di = g.c * w.y
    norm2 = dr * dr + di * di
    nr = g.a * w.x + g.b
    ni = g.a * w.y
    gw_re = (nr * dr + ni * di) / norm2
    gw_im = w.y / norm2
    dx = z.x - gw_re
    dy = z.y - gw_im
    return 1.0 + (dx * dx + dy * dy) / (4.0 * z.y * gw_im)


@dataclass(frozen=True)
class BallResult:
    """Enumerated group elements moving w into the sigma-ball around z."""

    elements: tuple[GroupElement, ...]
    radius_sigma: float
    certified: bool

    def __len__(self) -> int:
        return len(self.elements)

    def as_array(self) -> np.ndarray:
        """(n, 4) int64 array of rows (a, b, c, d), in enumeration order."""
        if len(self.elements) == 0:
            return np.zeros((0, 4), dtype=np.int64)
        return np.array([g.as_tuple() for g in self.elements], dtype=np.int64)

    def serialize(self) -> list[list[int]]:
        """JSON-ready list of [a, b, c, d] rows."""
        return [list(g.as_tuple()) for g in self.elements]


def enumerate_ball(
    z: geom.Point, w: geom.Point, R: float, budget: int = 10_000_000
) -> BallResult:
    """Every group element g with sigma(z, g w) <= R.

    The sweep bound is derived from the constraint that g w stays inside the
    hyperbolic ball of radius arccosh(2R-1) around z, so the enumeration is
    provably complete and the result carries certified=True.  Raises
    BudgetExceeded if the candidate count passes ``budget``.
    """
    R = float(R)
    if R < 1.0:
        raise DomainError(f"ball radius must satisfy R >= 1, got {R}")
    mats = core.ball_sweep(z.x, z.y, w.x, w.y, R, budget)
    elements = tuple(GroupElement(*(int(v) for v in row)) for row in mats)
    return BallResult(elements=elements, radius_sigma=R, certified=True)


def counting_N(rho: float, z: geom.Point, w: geom.Point) -> int:
    """Number of group elements with d(z, g w) strictly below rho."""
    if not rho > 0.0:
        raise DomainError(f"counting_N needs rho > 0, got {rho}")
    R = 0.5 * (1.0 + math.cosh(rho))
    ball = enumerate_ball(z, w, R)
    return sum(1 for g in ball.elements if sigma_of(g, z, w) < R)


@lru_cache(maxsize=None)
def _dedekind_sum_cached(d: int, c: int) -> Fraction:
    total = Fraction(0)
    half = Fraction(1, 2)
    for n in range(1, c):
        left = Fraction(n, c) - half
        m = (d * n) % c
        if m == 0:
            continue
        total += left * (Fraction(m, c) - half)
    return total


def dedekind_sum(d: int, c: int) -> Fraction:
    """Exact Dedekind sum s(d, c) = sum ((n/c))((dn/c)) as a Fraction.

    Requires c >= 1 and gcd(d, c) = 1.
    """
    d = int(d)
    c = int(c)
    if c < 1:
        raise DomainError(f"dedekind_sum needs c >= 1, got {c}")
    if math.gcd(d, c) != 1:
        raise DomainError(f"dedekind_sum needs gcd(d, c) = 1, got ({d}, {c})")
    return _dedekind_sum_cached(d % c, c)


def eta_phase(g: GroupElement) -> float:
    """Real transformation phase of the logarithm of the weight-1/2 cusp product.

    Defined on the sector c > 0, or c = 0 with d > 0:
      c > 0:  pi * ((a + d)/(12 c) - s(d, c) - 1/4)
      c = 0:  pi * b / 12              (here a = d = 1)
    Everything else is a DomainError; chi() routes through -I instead.
    """
    if g.c > 0:
        frac = Fraction(g.a + g.d, 12 * g.c) - dedekind_sum(g.d, g.c) - Fraction(1, 4)
        return math.pi * float(frac)
    if g.c == 0 and g.d > 0:
        return math.pi * g.b / 12.0
    raise DomainError(f"eta_phase undefined off the c>0 / c=0,d>0 sector: {g.as_tuple()}")


@lru_cache(maxsize=None)
def _chi_eta(k: float, sign: int, g: GroupElement) -> complex:
    if g.c > 0 or (g.c == 0 and g.d > 0):
        return cmath.exp(complex(0.0, sign * 4.0 * k * eta_phase(g)))
    # g = (-I) * gg with gg on the covered sector; extend through the
    # composition rule with the winding factor and chi(-I) = exp(-2 pi i k).
    gg = -g
    ctx = geom.WeightContext(k)
    omega = geom.omega_k(geom.Mat2(-1.0, 0.0, 0.0, -1.0), gg.to_mat2(), ctx)
    chi_minus_one = cmath.exp(complex(0.0, -2.0 * math.pi * k))
    return omega * chi_minus_one * _chi_eta(k, sign, gg)


def random_word(rng: np.random.Generator, max_len: int = 12) -> GroupElement:
    """Random product of at most max_len letters from {T, T^-1, S, -I}."""
    letters = (T, T.inverse(), S, -IDENTITY)
    g = IDENTITY
    for _ in range(int(rng.integers(0, max_len + 1))):
        g = g @ letters[int(rng.integers(0, len(letters)))]
    return g


def _convention_words() -> list[tuple[GroupElement, GroupElement]]:
    # deterministic probe set: the hand-picked pairs hit every branch sector
    # (product = -I, c = 0 rows, negative-c rows); the seeded words add bulk.
    pairs = [
        (S, S),
        (S, T),
        (T, S),
        (S @ T, S),
        (-IDENTITY, S),
        (T.inverse() @ S, S @ T @ T),
        (-S, T @ S @ T),
        (S @ T @ S, S @ T.inverse()),
    ]
    rng = np.random.default_rng(0x5EED)
    for _ in range(56):
        pairs.append((random_word(rng, 8), random_word(rng, 8)))
    return pairs


@dataclass(frozen=True)
class MultiplierSystem:
    """Unitary phase system chi on the group cover, consistent with the
    weight-k winding factor.

    kind "trivial" (integer k only) maps everything to 1.  kind "eta_power"
    carries the weight-k eta-type phase; at construction both sign
    conventions are swept against the composition rule
    chi(g1 g2) = omega_k(g1, g2) chi(g1) chi(g2) and the passing sign is
    stored.  If neither sign passes, ConventionError.
    """

    kind: str
    k: float
    d_dim: int = 1
    convention_sign: int = field(init=False)

    def __post_init__(self):
        if self.kind not in ("trivial", "eta_power"):
            raise DomainError(f"unknown multiplier kind {self.kind!r}")
        if self.d_dim != 1:
            raise DomainError("only d_dim = 1 multiplier systems ship")
        if not math.isfinite(self.k):
            raise DomainError(f"weight must be finite, got {self.k}")
        if self.kind == "trivial":
            if abs(self.k - round(self.k)) > 1e-9:
                raise ConventionError(
                    f"trivial multiplier needs integer weight (chi(-I)=1), got k={self.k}"
                )
            object.__setattr__(self, "convention_sign", 1)
            return
        sign = self._sweep_sign()
        object.__setattr__(self, "convention_sign", sign)

    def _sweep_sign(self) -> int:
        best: dict[int, float] = {}
        for sign in (1, -1):
            worst = 0.0
            for g1, g2 in _convention_words():
                r = _consistency_residual_eta(self.k, sign, g1, g2)
                worst = max(worst, r)
                if worst > 1e-10:
                    break
            best[sign] = worst
            if worst <= 1e-10:
                return sign
        raise ConventionError(
            "no sign convention satisfies the composition rule at weight "
            f"k={self.k}: residuals {best}"
        )


def chi(ms: MultiplierSystem, g: GroupElement) -> complex:
    """The unitary multiplier chi(g); |chi| = 1 and chi(-I) = exp(-2 pi i k)."""
    if ms.kind == "trivial":
        return 1.0 + 0.0j
    return _chi_eta(ms.k, ms.convention_sign, g)


def _consistency_residual_eta(
    k: float, sign: int, g1: GroupElement, g2: GroupElement
) -> float:
    ctx = geom.WeightContext(k)
    omega = geom.omega_k(g1.to_mat2(), g2.to_mat2(), ctx)
    lhs = _chi_eta(k, sign, g1 @ g2)
    rhs = omega * _chi_eta(k, sign, g1) * _chi_eta(k, sign, g2)
    return abs(lhs - rhs)


def consistency_residual(
    ms: MultiplierSystem, g1: GroupElement, g2: GroupElement
) -> float:
    """|chi(g1 g2) - omega_k(g1, g2) chi(g1) chi(g2)| for the shipped system."""
    ctx = geom.WeightContext(ms.k)
    omega = geom.omega_k(g1.to_mat2(), g2.to_mat2(), ctx)
    lhs = chi(ms, g1 @ g2)
    rhs = omega * chi(ms, g1) * chi(ms, g2)
    return abs(lhs - rhs)
