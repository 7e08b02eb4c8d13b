"""Self-contained special functions used by the rest of the package.

Covers the principal-branch log-Gamma, real digamma, Pochhammer products,
the Gauss hypergeometric series on [0, 1), the generalized even Chebyshev
function, associated Legendre functions on (0, 1) via their hypergeometric
representation, and the contiguous-relation residual used as a self-check.

Everything here is pure and re-entrant: no caches, no global state.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DomainError, NoConvergence, PoleError

__all__ = [
    "SeriesControl",
    "log_gamma",
    "digamma",
    "pochhammer",
    "gauss_2f1",
    "cheb_T2k",
    "legendre_P",
    "contiguous_residual",
]


@dataclass(frozen=True)
class SeriesControl:
    """Budget and tolerance for direct power-series evaluation."""

    max_terms: int = 4096
    rel_tol: float = 1e-15

    def __post_init__(self):
        if self.max_terms < 64:
            raise DomainError(f"max_terms must be >= 64, got {self.max_terms}")
        if not (0.0 < self.rel_tol <= 1e-6):
            raise DomainError(f"rel_tol must lie in (0, 1e-6], got {self.rel_tol}")


_DEFAULT_CTL = SeriesControl()

# Rational (Lanczos-style) approximation with g = 607/128, 15 terms.  This is
# the widely published double-precision coefficient set; combined with the
# recurrence shift below it holds relative error ~1e-14 over |z| <= 50.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_COEF = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)

_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def _is_nonpositive_integer(z: complex, tol: float = 1e-12) -> bool:
    n = round(z.real)
    return n <= 0 and abs(z - n) <= tol


def _lanczos_loggamma(z: complex) -> complex:
    # valid for Re(z) >= 0.5
    zp = z - 1.0
    acc = _LANCZOS_COEF[0]
    for j in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[j] / (zp + j)
    t = zp + _LANCZOS_G + 0.5
    return _HALF_LOG_TWO_PI + (zp + 0.5) * cmath.log(t) - t + cmath.log(acc)


def log_gamma(z) -> complex:
    """Principal branch of log Gamma on the plane cut along (-inf, 0].

    For Re(z) < 1/2 the value is reduced to the Lanczos region through the
    exact recurrence log Gamma(z) = log Gamma(z+m) - sum_j Log(z+j), which
    preserves the principal branch on each half-plane.

    Raises PoleError when z is within 1e-12 of a nonpositive integer.
    """
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"log_gamma: pole at z = {z}")
    if z.real >= 0.5:
        return _lanczos_loggamma(z)
    m = int(math.ceil(0.5 - z.real))
    shift = 0.0 + 0.0j
    for j in range(m):
        shift += cmath.log(z + j)
    return _lanczos_loggamma(z + m) - shift


# Asymptotic tail coefficients B_{2n}/(2n) for n = 1..7.
_DIGAMMA_TAIL = (
    1.0 / 12.0,
    1.0 / 120.0,
    1.0 / 252.0,
    1.0 / 240.0,
    1.0 / 132.0,
    691.0 / 32760.0,
    1.0 / 12.0,
)


def digamma(x: float) -> float:
    """psi(x) for real x > 0, absolute error below 1e-12.

    Uses psi(x) = psi(x+1) - 1/x to climb to x >= 10, then the standard
    asymptotic series in 1/x^2.
    """
    x = float(x)
    if not (x > 0.0) or not math.isfinite(x):
        raise DomainError(f"digamma requires x > 0, got {x}")
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    u = 1.0 / (x * x)
    tail = 0.0
    for coef in reversed(_DIGAMMA_TAIL):
        tail = u * (coef - tail)
    return acc + math.log(x) - 0.5 / x - tail


def pochhammer(a, n: int):
    """Rising factorial (a)_n as the finite product a(a+1)...(a+n-1)."""
    if n != int(n) or n < 0:
        raise DomainError(f"pochhammer needs a nonnegative integer n, got {n}")
    result = (a * 0) + 1.0  # unit of the same numeric type as a
    for j in range(int(n)):
        result = result * (a + j)
    return result


def gauss_2f1(a, b, c, z: float, ctl: SeriesControl | None = None) -> complex:
    """Gauss hypergeometric series F(a, b; c; z) for real z in (-1, 1).

    z = 1 is dispatched to the Gamma-quotient summation value, valid when
    Re(c - a - b) > 0.  PoleError if c sits on a nonpositive integer,
    NoConvergence if the term budget runs out first.
    """
    ctl = ctl or _DEFAULT_CTL
    a = complex(a)
    b = complex(b)
    c = complex(c)
    if isinstance(z, complex):
        if z.imag != 0.0:
            raise DomainError("gauss_2f1 takes a real argument")
        z = z.real
    z = float(z)
    if _is_nonpositive_integer(c):
        raise PoleError(f"gauss_2f1: c = {c} is a nonpositive integer")
    if z == 1.0:
        if (c - a - b).real <= 0.0:
            raise DomainError(
                "gauss_2f1 at z = 1 requires Re(c - a - b) > 0, got "
                f"{(c - a - b).real}"
            )
        num = log_gamma(c) + log_gamma(c - a - b)
        den = 0.0 + 0.0j
        for g_arg in (c - a, c - b):
            try:
                den += log_gamma(g_arg)
            except PoleError:
                return 0.0 + 0.0j  # 1/Gamma vanishes at the pole
        return cmath.exp(num - den)
    if not (-1.0 < z < 1.0):
        raise DomainError(f"gauss_2f1 series needs |z| < 1, got z = {z}")

    term = 1.0 + 0.0j
    total = 1.0 + 0.0j
    small_streak = 0
    for j in range(ctl.max_terms):
        term = term * (a + j) * (b + j) / ((c + j) * (j + 1.0)) * z
        total += term
        if abs(term) <= ctl.rel_tol * max(abs(total), 1e-300):
            small_streak += 1
            if small_streak >= 2 or term == 0.0:
                return total
        else:
            small_streak = 0
    raise NoConvergence(
        f"gauss_2f1({a}, {b}; {c}; {z}) did not converge in {ctl.max_terms} terms"
    )


def cheb_T2k(x: float, k: float) -> float:
    """cosh(2k * arccosh x) for x >= 1 — the even Chebyshev family at real order.

    Arguments within 1e-12 below 1 are clamped to 1; anything lower is a
    DomainError.  Even in k by construction.
    """
    x = float(x)
    if x < 1.0 - 1e-12:
        raise DomainError(f"cheb_T2k requires x >= 1, got {x}")
    x = max(x, 1.0)
    t = x + math.sqrt(x * x - 1.0)
    if t == 1.0:
        return 1.0
    p = math.exp(2.0 * k * math.log(t))
    return 0.5 * (p + 1.0 / p)


def legendre_P(nu: float, mu, x: float, ctl: SeriesControl | None = None) -> complex:
    """Associated Legendre function of the first kind on 0 < x < 1.

    Evaluated through its hypergeometric representation
    P(x) = ((1+x)/(1-x))^{mu/2} / Gamma(1-mu) * F(-nu, nu+1; 1-mu; (1-x)/2).
    Errors from the series (including the Gamma pole in c = 1-mu) propagate.
    """
    x = float(x)
    if not (0.0 < x < 1.0):
        raise DomainError(f"legendre_P requires 0 < x < 1, got {x}")
    mu = complex(mu)
    series = gauss_2f1(-nu, nu + 1.0, 1.0 - mu, 0.5 * (1.0 - x), ctl)
    pref = cmath.exp((mu / 2.0) * math.log((1.0 + x) / (1.0 - x)) - log_gamma(1.0 - mu))
    return pref * series


def contiguous_residual(k: float, s, z: float, ctl: SeriesControl | None = None) -> float:
    """Residual of the parameter-shift identity tying F(-k,k;s;z) to its s+1 neighbors.

    Returns |(1/s)[(s+k) F(-k,k+1;s+1;z) + (s-k) F(k,1-k;s+1;z)] - 2 F(-k,k;s;z)|,
    which should sit at roundoff level (<= 1e-12 for |k| <= 3, Re(s) in [1.5, 6]).
    """
    s = complex(s)
    z = float(z)
    if not (0.0 < z <= 0.5):
        raise DomainError(f"contiguous_residual expects 0 < z <= 1/2, got {z}")
    up_plus = gauss_2f1(-k, k + 1.0, s + 1.0, z, ctl)
    up_minus = gauss_2f1(k, 1.0 - k, s + 1.0, z, ctl)
    lhs = ((s + k) * up_plus + (s - k) * up_minus) / s
    rhs = 2.0 * gauss_2f1(-k, k, s, z, ctl)
    return abs(lhs - rhs)
