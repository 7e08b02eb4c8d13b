"""Kernel evaluators for the weighted hyperbolic Laplacian.

Point-pair profiles (resolvent-type, geometric-series, heat, Poisson), their
group-averaged sums over a Moebius ball, and the spectral identities used to
cross-check them.  Group sums return a :class:`KernelValue` carrying the
truncated value together with an explicit tail estimate built from the
measured growth coefficient of the orbit count.
"""

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple, Optional, Union

import numpy as np
from scipy.integrate import quad
from scipy.special import erfc

from . import core, fuchsian, geom, specfun
from .errors import (
    ConvergenceError,
    DomainError,
    NoConvergence,
    PoleError,
    QuadratureFailure,
    SingularityError,
)

__all__ = [
    "GkResult",
    "KernelParams",
    "KernelValue",
    "PretraceResult",
    "SupNormInputs",
    "geometric_kernel",
    "gk_difference",
    "heat_envelope",
    "heat_kernel_M",
    "heat_pde_residual",
    "heat_pointpair",
    "kernel_record",
    "ks_pointpair",
    "phi_s_closed",
    "phi_s_integral",
    "poisson_free",
    "poisson_kernel_M",
    "poisson_transform",
    "pretrace_rhs",
    "resolvent_kernel",
    "subordination_check",
    "sup_norm_constants",
]

_LOG2 = math.log(2.0)
_EULER = 0.5772156649015329
_FOUR_PI = 4.0 * math.pi

PointLike = Union[geom.Point, complex, tuple]


# --------------------------------------------------------------------------
# containers


@dataclass(frozen=True)
class KernelParams:
    """Shared inputs for the group-averaged kernel sums.

    ``s`` is the spectral parameter, ``radius_sigma`` the enumeration radius
    in the displacement variable sigma, ``budget`` the element cap passed to
    the ball enumerator, and ``tail_coeff`` an optional override for the
    measured orbit-count coefficient used in tail estimates.
    """

    s: complex
    radius_sigma: float
    budget: int = 10_000_000
    tail_coeff: Optional[float] = None


class KernelValue(NamedTuple):
    value: complex
    tail_bound: float
    terms_used: int
    radius_sigma: float


class GkResult(NamedTuple):
    value: float
    bound_ok: bool


class PretraceResult(NamedTuple):
    value: float
    imag_residual: float
    tail_bound: float
    terms_used: int


@dataclass(frozen=True)
class SupNormInputs:
    """Geometric data entering the explicit sup-norm constants."""

    k: float
    d_dim: int
    volume: float
    diameter: float


# --------------------------------------------------------------------------
# small helpers


def _as_point(p: PointLike) -> geom.Point:
    if isinstance(p, geom.Point):
        return p
    if isinstance(p, complex):
        return geom.Point(p.real, p.imag)
    if isinstance(p, (tuple, list)) and len(p) == 2:
        return geom.Point(float(p[0]), float(p[1]))
    raise DomainError("expected a Point, a complex number, or an (x, y) pair")


def _thread_count() -> int:
    try:
        n = int(os.environ.get("POINCARE_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, min(n, 64))


def _pole_guard(*values: complex) -> None:
    for v in values:
        v = complex(v)
        n = round(v.real)
        if n <= 0 and abs(v - n) < 1e-12:
            raise PoleError("gamma-factor argument %r is at a pole" % (v,))


def _quad_complex(f: Callable[[float], complex], a: float, b: float, **kw):
    re, re_err = quad(lambda x: f(x).real, a, b, full_output=1, **kw)[:2]
    im, im_err = quad(lambda x: f(x).imag, a, b, full_output=1, **kw)[:2]
    return complex(re, im), re_err + im_err


def _abs_2f1(a: complex, b: complex, c: complex, x: float, max_terms: int = 20000) -> float:
    """Sum of absolute values of Gauss-series terms at argument x in [0, 1)."""
    term = 1.0
    total = 1.0
    for j in range(max_terms):
        term *= abs((a + j) * (b + j)) / abs((c + j) * (j + 1.0)) * x
        if term == 0.0:
            return total
        total += term
        if term <= 1e-16 * total:
            return total
    raise NoConvergence("absolute-value majorant series did not converge")


def _log_cosh(x: float) -> float:
    a = abs(x)
    return a + math.log1p(math.exp(-2.0 * a)) - _LOG2


def _log_sinh(x: float) -> float:
    # valid for x > 0
    if x > 1e-6:
        return x - _LOG2 + math.log1p(-math.exp(-2.0 * x))
    return math.log(x) + x * x / 6.0


def _np_log_cosh(x: np.ndarray) -> np.ndarray:
    a = np.abs(x)
    return a + np.log1p(np.exp(-2.0 * a)) - _LOG2


def _np_log_sinh(x: np.ndarray) -> np.ndarray:
    # valid for x >= 0; returns -inf-free values via the small-x expansion
    safe = np.where(x > 1e-6, x, 1.0)
    big = safe - _LOG2 + np.log1p(-np.exp(-2.0 * safe))
    tiny = np.log(np.maximum(x, 1e-300)) + x * x / 6.0
    return np.where(x > 1e-6, big, tiny)


@lru_cache(maxsize=8)
def _gl_nodes(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


# --------------------------------------------------------------------------
# ball plumbing shared by the group sums


def _ball_pair_data(z: geom.Point, w: geom.Point, radius_sigma: float, budget: int):
    ball = fuchsian.enumerate_ball(z, w, radius_sigma, budget=budget)
    mats = ball.as_array()
    sigma, _, _, jw_arg, h_arg = core.pair_arrays(mats, z.x, z.y, w.x, w.y)
    return mats, sigma, jw_arg, h_arg


def _counting_coefficient(sigma: np.ndarray, override: Optional[float]) -> float:
    """Measured coefficient c with orbit count N(rho) <= c * exp(rho)."""
    if override is not None:
        if override <= 0:
            raise DomainError("tail_coeff must be positive")
        return float(override)
    if sigma.size == 0:
        return 2.0
    rho = np.arccosh(np.clip(2.0 * np.sort(sigma) - 1.0, 1.0, None))
    ratios = np.arange(1, sigma.size + 1, dtype=np.float64) / np.exp(rho)
    return 2.0 * float(np.max(ratios))


def _chi_values(ms: fuchsian.MultiplierSystem, mats: np.ndarray) -> np.ndarray:
    if ms.kind == "trivial":
        return np.ones(len(mats), dtype=np.complex128)
    elements = [
        fuchsian.GroupElement(int(r[0]), int(r[1]), int(r[2]), int(r[3])) for r in mats
    ]
    n = _thread_count()
    if n > 1 and len(elements) >= 512:
        bounds = np.linspace(0, len(elements), n + 1).astype(int)
        parts = [elements[bounds[i] : bounds[i + 1]] for i in range(n)]
        with ThreadPoolExecutor(max_workers=n) as ex:
            chunks = list(ex.map(lambda part: [fuchsian.chi(ms, g) for g in part], parts))
        vals = [v for chunk in chunks for v in chunk]
    else:
        vals = [fuchsian.chi(ms, g) for g in elements]
    return np.asarray(vals, dtype=np.complex128)


def _default_ms(ms: Optional[fuchsian.MultiplierSystem]) -> fuchsian.MultiplierSystem:
    if ms is None:
        return fuchsian.MultiplierSystem("trivial", 0.0)
    return ms


# --------------------------------------------------------------------------
# point-pair resolvent profile and its s-difference


def ks_pointpair(sigma: float, s: complex, k: float, ctl: Optional[specfun.SeriesControl] = None) -> complex:
    """Resolvent-type point-pair profile at displacement sigma.

    Singular on the diagonal (sigma -> 1, logarithmically); raises
    SingularityError within 1e-12 of it.
    """
    sigma = float(sigma)
    s = complex(s)
    k = float(k)
    if sigma <= 1.0 + 1e-12:
        raise SingularityError("point-pair profile is singular at sigma = %r" % sigma)
    _pole_guard(s - k, s + k, 2.0 * s)
    if ctl is None:
        ctl = specfun.SeriesControl(max_terms=40_000)
    f = specfun.gauss_2f1(s + k, s - k, 2.0 * s, 1.0 / sigma, ctl)
    pref = cmath.exp(
        specfun.log_gamma(s - k) + specfun.log_gamma(s + k) - specfun.log_gamma(2.0 * s)
    ) / _FOUR_PI
    return pref * cmath.exp(-s * math.log(sigma)) * f


def _f21_cab1_near_one(a: float, b: float, w: float) -> float:
    """F(a, b; a+b+1; 1-w) for small w > 0 via the logarithmic expansion.

    The w = 0 limit (the Gauss value) must be handled by the caller.
    """
    lg_ab1 = math.lgamma(a + b + 1.0)
    c1 = math.exp(lg_ab1 - math.lgamma(a + 1.0) - math.lgamma(b + 1.0))
    c2 = math.exp(lg_ab1 - math.lgamma(a) - math.lgamma(b))
    lw = math.log(w)
    psi1 = -_EULER
    psi2 = 1.0 - _EULER
    psi_a = specfun.digamma(a + 1.0)
    psi_b = specfun.digamma(b + 1.0)
    coef = 1.0
    wp = 1.0
    total = 0.0
    for n in range(500):
        term = coef * wp * (lw - psi1 - psi2 + psi_a + psi_b)
        total += term
        if n >= 2 and abs(term) <= 1e-17 * (abs(total) + 1e-300):
            return c1 + c2 * w * total
        coef *= (a + 1.0 + n) * (b + 1.0 + n) / ((n + 1.0) * (n + 2.0))
        wp *= w
        psi1 += 1.0 / (n + 1.0)
        psi2 += 1.0 / (n + 2.0)
        psi_a += 1.0 / (a + 1.0 + n)
        psi_b += 1.0 / (b + 1.0 + n)
    raise NoConvergence("near-diagonal expansion did not converge")


def gk_difference(sigma: float, s: float, k: float) -> GkResult:
    """Difference of the resolvent profile at s and s+1, in one stable series.

    Regular down to the diagonal.  Also reports whether the value respects
    the closed-form envelope s * sigma**(-s) / (2 pi (s^2 - k^2)), which it
    attains exactly at sigma = 1.
    """
    sigma = float(sigma)
    s = float(s)
    k = float(k)
    if sigma < 1.0 - 1e-12:
        raise DomainError("sigma must be >= 1, got %r" % sigma)
    sigma = max(sigma, 1.0)
    if s <= abs(k) + 1e-12:
        raise DomainError("need s > |k| for the difference profile")
    a = s + k
    b = s - k
    pref = math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(2.0 * s)) / _FOUR_PI
    sig_pow = math.exp(-s * math.log(sigma))
    gauss_f = math.exp(math.lgamma(2.0 * s + 1.0) - math.lgamma(a + 1.0) - math.lgamma(b + 1.0))
    bound = pref * gauss_f * sig_pow
    x = 1.0 / sigma
    if x == 1.0:
        value = bound
    elif x > 0.99:
        value = pref * sig_pow * _f21_cab1_near_one(a, b, 1.0 - x)
    else:
        ctl = specfun.SeriesControl(max_terms=40_000)
        value = pref * sig_pow * specfun.gauss_2f1(a, b, 2.0 * s + 1.0, x, ctl).real
    return GkResult(float(value), bool(abs(value) <= bound))


# --------------------------------------------------------------------------
# spectral-profile closed form and double-integral route


def phi_s_closed(u: float, s: complex, k: float) -> complex:
    """Closed form of the spectral profile at displacement u >= 0."""
    u = float(u)
    s = complex(s)
    k = float(k)
    if u < 0.0:
        raise DomainError("displacement u must be nonnegative")
    if s.real <= max(1.0, abs(k)):
        raise DomainError("need Re s > max(1, |k|) for the profile")
    _pole_guard(s - k, s + k)
    f = specfun.gauss_2f1(-k, k, s, 0.5 / (1.0 + u))
    pref = cmath.exp(
        specfun.log_gamma(s - k) + specfun.log_gamma(s + k) - 2.0 * specfun.log_gamma(s)
    ) / math.sqrt(2.0 * math.pi)
    return pref * cmath.exp(-s * math.log(1.0 + 2.0 * u)) * f


def phi_s_integral(u: float, s: complex, k: float, max_error: float = 1e-8) -> complex:
    """Independent quadrature route to the spectral profile.

    Uses the even weight 2*cosh(k * lb) on the half line, where lb is the
    stable log-ratio of the shifted displacement; agrees with
    :func:`phi_s_closed` on the common domain.
    """
    u = float(u)
    s = complex(s)
    k = float(k)
    if u < 0.0:
        raise DomainError("displacement u must be nonnegative")
    if s.real <= abs(k) + 1e-12:
        raise DomainError("need Re s > |k| for convergence")
    big_a = 4.0 * u + 4.0
    big_b = 4.0 * u + 2.0
    log_a = math.log(big_a)

    def f(t: float) -> complex:
        c = math.sqrt(big_a + t * t)
        lb = log_a - 2.0 * math.log(c + t)
        klb = abs(k * lb)
        log_weight = klb + math.log1p(math.exp(-2.0 * klb))
        return cmath.exp(-(s + 0.5) * math.log(big_b + t * t) + log_weight)

    if s.imag == 0.0:
        val, err = quad(lambda t: f(t).real, 0.0, np.inf, epsabs=1e-13, limit=300)[:2]
        integral = complex(val)
    else:
        integral, err = _quad_complex(f, 0.0, np.inf, epsabs=1e-13, limit=300)
    pref = cmath.exp(
        specfun.log_gamma(s + 0.5) - specfun.log_gamma(s) + (s - 0.5) * _LOG2
    ) / math.pi
    if abs(pref) * err > max_error:
        raise QuadratureFailure(
            "profile quadrature error %.3g above budget" % (abs(pref) * err),
            estimate=abs(pref) * err,
        )
    return pref * integral


# --------------------------------------------------------------------------
# geometric-series and resolvent group sums


def geometric_kernel(
    z: PointLike,
    w: PointLike,
    params: KernelParams,
    ms: Optional[fuchsian.MultiplierSystem] = None,
) -> KernelValue:
    """Group-averaged geometric-series kernel over a sigma-ball.

    Regular on the diagonal; absolutely convergent for Re s > 1.
    """
    z = _as_point(z)
    w = _as_point(w)
    ms = _default_ms(ms)
    s = complex(params.s)
    k = ms.k
    if s.real <= 1.0 + 1e-9:
        raise ConvergenceError("group sum requires Re s > 1")
    _pole_guard(s - k, s + k)
    mats, sigma, jw_arg, h_arg = _ball_pair_data(z, w, params.radius_sigma, params.budget)
    cosh_d = 2.0 * sigma - 1.0
    f = core.hyp2f1_series_batch(-k, k, s, 0.5 / sigma, max_terms=4096)
    radial = np.exp(-s * np.log(cosh_d)) * f
    chi_v = _chi_values(ms, mats)
    phase = np.exp(2j * k * (jw_arg + h_arg))
    pref = cmath.exp(
        specfun.log_gamma(s - k) + specfun.log_gamma(s + k) - 2.0 * specfun.log_gamma(s)
    ) / math.sqrt(2.0 * math.pi)
    value = pref * np.sum(chi_v * phase * radial)
    res = s.real
    c_n = _counting_coefficient(sigma, params.tail_coeff)
    f_max = _abs_2f1(-k, k, 1.0, 0.5)
    y_edge = 2.0 * params.radius_sigma - 1.0
    tail = abs(pref) * f_max * 2.0 * c_n * res * y_edge ** (1.0 - res) / (res - 1.0)
    return KernelValue(complex(value), float(tail), len(mats), params.radius_sigma)


def resolvent_kernel(
    z: PointLike,
    w: PointLike,
    params: KernelParams,
    ms: Optional[fuchsian.MultiplierSystem] = None,
) -> KernelValue:
    """Group-averaged resolvent kernel over a sigma-ball.

    Singular when any orbit point collides with z; raises SingularityError
    if the enumerated ball contains a displacement within 1e-10 of the
    diagonal.
    """
    z = _as_point(z)
    w = _as_point(w)
    ms = _default_ms(ms)
    s = complex(params.s)
    k = ms.k
    if s.real <= 1.0 + 1e-9:
        raise ConvergenceError("group sum requires Re s > 1")
    _pole_guard(s - k, s + k, 2.0 * s)
    mats, sigma, jw_arg, h_arg = _ball_pair_data(z, w, params.radius_sigma, params.budget)
    if sigma.size and float(np.min(sigma)) <= 1.0 + 1e-10:
        raise SingularityError(
            "orbit point within 1e-10 of the diagonal (sigma = %r)" % float(np.min(sigma))
        )
    c_ks = cmath.exp(
        specfun.log_gamma(s - k) + specfun.log_gamma(s + k) - specfun.log_gamma(2.0 * s)
    ) / _FOUR_PI
    f = core.hyp2f1_series_batch(s + k, s - k, 2.0 * s, 1.0 / sigma, max_terms=40_000)
    radial = c_ks * np.exp(-s * np.log(sigma)) * f
    chi_v = _chi_values(ms, mats)
    phase = np.exp(2j * k * (jw_arg + h_arg))
    value = 0.5 * np.sum(chi_v * phase * radial)
    res = s.real
    c_n = _counting_coefficient(sigma, params.tail_coeff)
    f_hat = _abs_2f1(s + k, s - k, 2.0 * s, 1.0 / params.radius_sigma)
    tail = (
        0.5
        * abs(c_ks)
        * f_hat
        * 4.0
        * c_n
        * res
        * params.radius_sigma ** (1.0 - res)
        / (res - 1.0)
    )
    return KernelValue(complex(value), float(tail), len(mats), params.radius_sigma)


# --------------------------------------------------------------------------
# heat kernel


def _heat_radial(t: float, rho: np.ndarray, k: float, n_nodes: int = 192) -> np.ndarray:
    """Radial heat values at distances rho, one Gauss-Legendre rule for all.

    The integrand is assembled in log space throughout, so large rho and
    large |k| underflow cleanly instead of overflowing.
    """
    rho = np.asarray(rho, dtype=np.float64)
    x, wq = _gl_nodes(n_nodes)
    v_max = math.sqrt(2.0 * abs(k) * t + math.sqrt(160.0 * t) + 1.0)
    v = (x + 1.0) * (0.5 * v_max)
    r = rho[:, None] + v[None, :] ** 2
    log_r = np.log(r)
    expo = -r * r / (4.0 * t)
    lx = _np_log_cosh(0.5 * r) - _np_log_cosh(0.5 * rho)[:, None]
    lx = np.maximum(lx, 0.0)
    xch = np.exp(np.minimum(lx, 19.0))
    small_arc = np.log(xch + np.sqrt(np.maximum(xch * xch - 1.0, 0.0)))
    arc = np.where(lx > 19.0, lx + _LOG2, small_arc)
    log_t2k = _np_log_cosh(2.0 * k * arc)
    log_s1 = _np_log_sinh(0.5 * (r + rho[:, None]))
    h = 0.5 * v * v
    log_s2 = np.where(h > 1e-6, _np_log_sinh(h) - np.log(h), h * h / 6.0)
    term_log = _LOG2 + log_r + expo + log_t2k - 0.5 * (log_s1 + log_s2[None, :])
    terms = np.exp(np.minimum(term_log, 700.0))
    c_t = math.sqrt(2.0) * math.exp(-0.25 * t) / (4.0 * math.pi * t) ** 1.5
    return c_t * (0.5 * v_max) * np.sum(wq[None, :] * terms, axis=1)


def heat_pointpair(t: float, rho: float, k: float) -> float:
    """Free-space radial heat kernel at distance rho and weight k."""
    if t <= 0.0:
        raise DomainError("time t must be positive")
    if rho < 0.0:
        raise DomainError("distance rho must be nonnegative")
    rho_arr = np.array([float(rho)])
    k1 = float(_heat_radial(t, rho_arr, k, 192)[0])
    k2 = float(_heat_radial(t, rho_arr, k, 128)[0])
    est = abs(k1 - k2)
    if est > 1e-8 * max(1.0, abs(k1)):
        raise QuadratureFailure("heat quadrature disagreement %.3g" % est, estimate=est)
    return k1


def heat_envelope(t: float, k: float) -> float:
    """Constant G(t, k) with K_heat(t; rho) <= G * exp(-rho^2 / (8 t))."""
    if t <= 0.0:
        raise DomainError("time t must be positive")
    lk = abs(k)
    v_star = 4.0 * t * (lk + math.sqrt(lk * lk + 45.0 / t))
    q_max = math.sqrt(v_star)

    def f(q: float) -> float:
        if q <= 0.0:
            return 2.0
        vv = q * q
        lg = math.log(2.0 * q) - vv * vv / (8.0 * t) + lk * vv - 0.5 * (_LOG2 + _log_sinh(0.5 * vv))
        return math.exp(lg) if lg > -745.0 else 0.0

    i_k = quad(f, 0.0, q_max, epsabs=1e-13, limit=200)[0]
    c_t = math.sqrt(2.0) * math.exp(-0.25 * t) / (4.0 * math.pi * t) ** 1.5
    return c_t * 16.0**lk * 2.43 * math.sqrt(t) * i_k


def _heat_tail_count_log(t: float, radius_sigma: float, c_n: float) -> float:
    """Log of the closed-form bound for the orbit sum of exp(-rho^2/8t)
    beyond the ball.  Kept in log space so large t cannot overflow."""
    rho_r = math.acosh(max(2.0 * radius_sigma - 1.0, 1.0))
    a = rho_r - 4.0 * t
    body = math.exp(-a * a / (8.0 * t)) + math.sqrt(2.0 * math.pi * t) * float(
        erfc(a / math.sqrt(8.0 * t))
    )
    if body == 0.0:
        return -math.inf
    return math.log(c_n) + 2.0 * t + math.log(body)


def heat_kernel_M(
    t: float,
    z: PointLike,
    w: PointLike,
    ms: Optional[fuchsian.MultiplierSystem],
    radius_sigma: float,
    budget: int = 10_000_000,
    tail_coeff: Optional[float] = None,
) -> KernelValue:
    """Group-averaged heat kernel in the conjugated-phase arrangement.

    Each orbit term carries conj(chi) and the inverse weight phases, which
    makes the truncated sum transform exactly under the group.
    """
    if t <= 0.0:
        raise DomainError("time t must be positive")
    z = _as_point(z)
    w = _as_point(w)
    ms = _default_ms(ms)
    k = ms.k
    mats, sigma, jw_arg, h_arg = _ball_pair_data(z, w, radius_sigma, budget)
    rho = np.arccosh(np.clip(2.0 * sigma - 1.0, 1.0, None))
    rad_hi = _heat_radial(t, rho, k, 192)
    rad_lo = _heat_radial(t, rho, k, 128)
    chi_v = _chi_values(ms, mats)
    phase = np.exp(-2j * k * (jw_arg + h_arg))
    weights = np.conj(chi_v) * phase
    v_hi = 0.5 * np.sum(weights * rad_hi)
    v_lo = 0.5 * np.sum(weights * rad_lo)
    est = abs(v_hi - v_lo)
    if est > 1e-8 * max(1.0, abs(v_hi)):
        raise QuadratureFailure("heat quadrature disagreement %.3g" % est, estimate=est)
    c_n = _counting_coefficient(sigma, tail_coeff)
    env = heat_envelope(t, k)
    if env == 0.0:
        tail = 0.0
    else:
        tail_log = math.log(0.5 * env) + _heat_tail_count_log(t, radius_sigma, c_n)
        tail = math.exp(tail_log) if tail_log < 709.0 else math.inf
    return KernelValue(complex(v_hi), float(tail), len(mats), radius_sigma)


def heat_pde_residual(
    t: float,
    z: PointLike,
    w: PointLike,
    k: float,
    h: float = 1e-3,
    order: int = 5,
):
    """Finite-difference residual of the weighted heat equation at (t, z).

    Evaluates the free kernel with both orientations of the relative phase
    and returns (residual, sign) for the smaller residual.  ``order`` selects
    the 5-point O(h^4) stencils or the 3-point O(h^2) ones.
    """
    if t <= 0.0 or h <= 0.0:
        raise DomainError("need t > 0 and h > 0")
    if order not in (3, 5):
        raise DomainError("order must be 3 or 5")
    z = _as_point(z)
    w = _as_point(w)
    reach = 2 if order == 5 else 1
    if z.y - reach * h <= 0.0:
        raise DomainError("stencil leaves the upper half plane")
    steps = (-2, -1, 0, 1, 2) if order == 5 else (-1, 0, 1)
    xs = [geom.Point(z.x + i * h, z.y) for i in steps]
    ys = [geom.Point(z.x, z.y + i * h) for i in steps]
    rho_x = np.array([geom.pair_metrics(p, w).dist for p in xs])
    rho_y = np.array([geom.pair_metrics(p, w).dist for p in ys])
    rad_x = _heat_radial(t, rho_x, k)
    rad_y = _heat_radial(t, rho_y, k)
    h_t = h * t
    mid = len(steps) // 2
    t_steps = [i for i in steps if i != 0]
    rho_c = np.array([geom.pair_metrics(z, w).dist])
    rad_t = np.array([_heat_radial(t + i * h_t, rho_c, k)[0] for i in t_steps])
    theta_x = np.array([math.atan2(p.y + w.y, p.x - w.x) for p in xs])
    theta_y = np.array([math.atan2(p.y + w.y, p.x - w.x) for p in ys])
    theta_c = theta_x[mid]
    best = (math.inf, 0)
    for sign in (1, -1):
        fx = rad_x * np.exp(1j * sign * k * (2.0 * theta_x - math.pi))
        fy = rad_y * np.exp(1j * sign * k * (2.0 * theta_y - math.pi))
        ft_vals = rad_t * cmath.exp(1j * sign * k * (2.0 * theta_c - math.pi))
        f0 = fx[mid]
        if order == 5:
            fxx = (-fx[4] + 16.0 * fx[3] - 30.0 * f0 + 16.0 * fx[1] - fx[0]) / (12.0 * h * h)
            fyy = (-fy[4] + 16.0 * fy[3] - 30.0 * f0 + 16.0 * fy[1] - fy[0]) / (12.0 * h * h)
            fxd = (fx[0] - 8.0 * fx[1] + 8.0 * fx[3] - fx[4]) / (12.0 * h)
            ftd = (ft_vals[0] - 8.0 * ft_vals[1] + 8.0 * ft_vals[2] - ft_vals[3]) / (12.0 * h_t)
        else:
            fxx = (fx[2] - 2.0 * f0 + fx[0]) / (h * h)
            fyy = (fy[2] - 2.0 * f0 + fy[0]) / (h * h)
            fxd = (fx[2] - fx[0]) / (2.0 * h)
            ftd = (ft_vals[1] - ft_vals[0]) / (2.0 * h_t)
        lap = -z.y * z.y * (fxx + fyy) + 2j * k * z.y * fxd
        res = abs(ftd + lap)
        if res < best[0]:
            best = (res, sign)
    return best


# --------------------------------------------------------------------------
# subordination and Poisson kernels


def subordination_check(a: float, lam: float) -> float:
    """Gap between the subordination quadrature and its closed form."""
    a = float(a)
    lam = float(lam)
    if a <= 0.0 or lam < 0.0:
        raise DomainError("need a > 0 and lam >= 0")
    c = 0.25 * a * a * lam

    def f(x: float) -> float:
        if x <= 0.0:
            return 0.0 if c > 0.0 else 1.0
        e = -x * x - c / (x * x)
        return math.exp(e) if e > -745.0 else 0.0

    val = 2.0 / math.sqrt(math.pi) * quad(f, 0.0, np.inf, epsabs=1e-13, limit=200)[0]
    return abs(val - math.exp(-a * math.sqrt(lam)))


def poisson_transform(f_of_t: Callable[[float], complex], u: float, Z: complex, rate: float) -> complex:
    """Subordinated time integral of f with Laplace weight exp(-Z t).

    ``rate`` is the caller's lower bound for the exponential decay rate of
    f(t) * exp(-Re Z * t); refuses to integrate when it is too small.
    """
    u = float(u)
    Z = complex(Z)
    if u <= 0.0:
        raise DomainError("need u > 0")
    if rate < 0.02:
        raise QuadratureFailure("decay rate %.3g too small for the time integral" % rate)

    def g(x: float) -> complex:
        if abs(x) > 400.0:
            return 0.0j
        tt = math.exp(x)
        fv = complex(f_of_t(tt))
        if fv == 0.0:
            return 0.0j
        expo = -Z.real * tt - u * u / (4.0 * tt) - 0.5 * x
        m = math.log(abs(fv)) + expo
        if m < -745.0:
            return 0.0j
        if m > 700.0:
            raise QuadratureFailure("time integrand overflow at t = %.3g" % tt)
        return (fv / abs(fv)) * cmath.exp(complex(m, -Z.imag * tt))

    value, err = _quad_complex(g, -np.inf, np.inf, epsabs=1e-12, limit=300)
    pref = u / math.sqrt(4.0 * math.pi)
    value = pref * value
    if pref * err > 1e-8 * max(1.0, abs(value)):
        raise QuadratureFailure(
            "time quadrature error %.3g" % (pref * err), estimate=pref * err
        )
    return value


def _free_decay_rate(k: float) -> float:
    return 0.25 - max(0.0, abs(k) - 0.5) ** 2


def poisson_free(u: float, Z: complex, z: PointLike, w: PointLike, k: float) -> complex:
    """Free-space Poisson-type kernel via subordination of the heat kernel."""
    z = _as_point(z)
    w = _as_point(w)
    Z = complex(Z)
    k = float(k)
    lam0 = abs(k) * (1.0 - abs(k))
    if Z.real < -lam0 - 1e-12:
        raise DomainError("Re Z below the spectral bound -%r" % lam0)
    rate = Z.real + _free_decay_rate(k)
    rho = geom.pair_metrics(z, w).dist
    rho_arr = np.array([rho])

    def f(tt: float) -> float:
        return float(_heat_radial(tt, rho_arr, k)[0])

    theta = math.atan2(z.y + w.y, z.x - w.x)
    phase = cmath.exp(1j * k * (2.0 * theta - math.pi))
    return phase * poisson_transform(f, u, Z, rate)


def poisson_kernel_M(
    u: float,
    Z: complex,
    z: PointLike,
    w: PointLike,
    ms: Optional[fuchsian.MultiplierSystem],
    radius_sigma: float,
    budget: int = 10_000_000,
    tail_coeff: Optional[float] = None,
) -> KernelValue:
    """Group-averaged Poisson-type kernel, conjugated-phase arrangement.

    The tail estimate integrates the heat-sum tail through the subordination
    weight; that integral only converges for Re Z comfortably above 7/4 (plus
    a weight-dependent shift), and the evaluator refuses otherwise rather
    than report an unusable bound.
    """
    z = _as_point(z)
    w = _as_point(w)
    ms = _default_ms(ms)
    Z = complex(Z)
    k = ms.k
    u = float(u)
    if u <= 0.0:
        raise DomainError("need u > 0")
    margin = Z.real - (1.75 + 2.0 * max(0.0, abs(k) - 0.25) ** 2)
    if margin < 0.02:
        raise QuadratureFailure(
            "tail estimate diverges at Re Z = %r for weight %r" % (Z.real, k)
        )
    rate = Z.real + _free_decay_rate(k)
    mats, sigma, jw_arg, h_arg = _ball_pair_data(z, w, radius_sigma, budget)
    rho = np.arccosh(np.clip(2.0 * sigma - 1.0, 1.0, None))
    values = np.empty(len(mats), dtype=np.complex128)
    for i, rr in enumerate(rho):
        rr_arr = np.array([rr])
        values[i] = poisson_transform(
            lambda tt: float(_heat_radial(tt, rr_arr, k)[0]), u, Z, rate
        )
    chi_v = _chi_values(ms, mats)
    phase = np.exp(-2j * k * (jw_arg + h_arg))
    value = 0.5 * np.sum(np.conj(chi_v) * phase * values)
    c_n = _counting_coefficient(sigma, tail_coeff)

    def tail_integrand(x: float) -> float:
        tt = math.exp(x)
        env = heat_envelope(tt, k)
        if env == 0.0:
            return 0.0
        lg = (
            math.log(env)
            + _heat_tail_count_log(tt, radius_sigma, c_n)
            - Z.real * tt
            - u * u / (4.0 * tt)
            - 0.5 * x
        )
        if lg > 709.0:
            raise QuadratureFailure("tail estimate integrand overflow")
        return math.exp(lg) if lg > -745.0 else 0.0

    tail_int = quad(tail_integrand, -30.0, 30.0, epsabs=1e-12, limit=300)[0]
    if not math.isfinite(tail_int):
        raise QuadratureFailure("tail estimate integral did not converge")
    tail = 0.5 * (u / math.sqrt(4.0 * math.pi)) * tail_int
    return KernelValue(complex(value), float(tail), len(mats), radius_sigma)


# --------------------------------------------------------------------------
# pre-trace identity right-hand side and sup-norm constants


def pretrace_rhs(
    z: PointLike,
    s: float,
    t: float,
    ms: Optional[fuchsian.MultiplierSystem],
    radius_sigma: float,
    budget: int = 10_000_000,
    tail_coeff: Optional[float] = None,
) -> PretraceResult:
    """Diagonal difference sum: digamma term plus the off-identity orbit sum.

    With t = s + 1 the orbit terms use the stable single-series difference
    profile, which stays finite at elliptic fixed points.
    """
    z = _as_point(z)
    ms = _default_ms(ms)
    k = ms.k
    s = float(s)
    t = float(t)
    if s <= abs(k) or t <= abs(k):
        raise DomainError("need s, t > |k| for the digamma term")
    if not s < t:
        raise DomainError("need s < t so the difference profile is positive")
    if min(s, t) <= 1.0 + 1e-9:
        raise ConvergenceError("orbit sum requires min(s, t) > 1")
    d = ms.d_dim
    dig = -(d / _FOUR_PI) * (
        specfun.digamma(s + k)
        + specfun.digamma(s - k)
        - specfun.digamma(t + k)
        - specfun.digamma(t - k)
    )
    mats, sigma, jw_arg, h_arg = _ball_pair_data(z, z, radius_sigma, budget)
    keep = ~(
        (mats[:, 1] == 0)
        & (mats[:, 2] == 0)
        & (np.abs(mats[:, 0]) == 1)
        & (mats[:, 0] == mats[:, 3])
    )
    mats_k = mats[keep]
    sigma_k = sigma[keep]
    jw_k = jw_arg[keep]
    h_k_arg = h_arg[keep]
    use_gk = abs(t - (s + 1.0)) < 1e-12
    if use_gk:
        radial = np.array([gk_difference(x, s, k).value for x in sigma_k])
    else:
        radial = np.array(
            [ks_pointpair(x, s, k) - ks_pointpair(x, t, k) for x in sigma_k],
            dtype=np.complex128,
        )
    chi_v = _chi_values(ms, mats_k)
    phase = np.exp(2j * k * (jw_k + h_k_arg))
    orbit = 0.5 * np.sum(chi_v * phase * radial)
    total = dig + orbit
    c_n = _counting_coefficient(sigma, tail_coeff)
    r = radius_sigma
    if use_gk:
        coeff = s / (2.0 * math.pi * (s * s - k * k))
        tail = 0.5 * coeff * 4.0 * c_n * s * r ** (1.0 - s) / (s - 1.0)
    else:
        c_s = math.exp(math.lgamma(s - k) + math.lgamma(s + k) - math.lgamma(2.0 * s)) / _FOUR_PI
        c_t = math.exp(math.lgamma(t - k) + math.lgamma(t + k) - math.lgamma(2.0 * t)) / _FOUR_PI
        tail = 0.5 * 4.0 * c_n * (
            c_s * _abs_2f1(s + k, s - k, 2.0 * s, 1.0 / r) * s * r ** (1.0 - s) / (s - 1.0)
            + c_t * _abs_2f1(t + k, t - k, 2.0 * t, 1.0 / r) * t * r ** (1.0 - t) / (t - 1.0)
        )
    return PretraceResult(
        float(np.real(total)), float(abs(np.imag(total))), float(tail), int(len(mats_k))
    )


def sup_norm_constants(inputs: SupNormInputs) -> dict:
    """Explicit constants (A, C, script_C) from the counting geometry."""
    k = float(inputs.k)
    d = int(inputs.d_dim)
    vol = float(inputs.volume)
    diam = float(inputs.diameter)
    if d < 1 or vol <= 0.0 or diam <= 0.0:
        raise DomainError("need d_dim >= 1, volume > 0, diameter > 0")
    ak = abs(k)
    a_const = max(0.5, ak - 0.5)
    c_const = d * (ak + 2.0) / (8.0 * math.pi * (ak + 1.0)) + (
        (ak + 2.0) / (ak + 1.0)
    ) ** 2 * (d / (2.0 * vol)) * math.exp(1.5 * diam)
    return {
        "A": a_const,
        "C": c_const,
        "script_C": math.sqrt(c_const * (ak + 2.0)),
    }


def kernel_record(
    z: PointLike, w: PointLike, s: complex, k: float, radius_sigma: float, kv: KernelValue
) -> dict:
    """Flat serializable record of one group-sum evaluation."""
    z = _as_point(z)
    w = _as_point(w)
    s = complex(s)
    value = complex(kv.value)
    return {
        "z": [z.x, z.y],
        "w": [w.x, w.y],
        "s_re": s.real,
        "s_im": s.imag,
        "k": float(k),
        "R": float(radius_sigma),
        "value_re": value.real,
        "value_im": value.imag,
        "tail_bound": float(kv.tail_bound),
        "terms_used": int(kv.terms_used),
    }
