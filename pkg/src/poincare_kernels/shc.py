"""Radial-profile transform pipeline.

Forward chain: radial profile Phi -> Q (phase-weighted line integral) ->
even function g (cosh substitution) -> spectral side h (cosine transform).
Inverse chain: Q from g by the algebraic substitution, Phi from Q' by the
phase-weighted inverse integral.  The wave family g_s has a Gamma closed
form on the spectral side together with a Pochhammer recurrence in s that
continues it to the left; both live here.

All quadratures are QUADPACK (scipy.integrate.quad / QAWF for cosine
weights), which is deterministic for fixed inputs; error estimates are
enforced against the contract and surfaced via QuadratureFailure.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, TextIO, Union

import numpy as np
from scipy.integrate import quad

from .errors import ClassViolation, DomainError, PoleError, QuadratureFailure
from .specfun import log_gamma

__all__ = [
    "ProfileFunction",
    "EvenTestFunction",
    "FourierSide",
    "WaveTestParams",
    "DecayReport",
    "q_forward",
    "g_from_q",
    "fourier_h",
    "inverse_fourier_even",
    "h_gs_closed",
    "h_recurrence_factor",
    "h_continued",
    "q_inverse",
    "phi_inverse",
    "decay_class_check",
    "gs_value",
    "gs_even_test_function",
    "qs_value",
    "qs_prime",
    "numeric_derivative",
    "write_trace_csv",
]

Scalar = Union[float, complex]


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProfileFunction:
    """Radial profile Phi in the variable x = |z-w|^2/(Im z Im w).

    decay_exponent is the delta of the envelope |Phi(x)| <= C (4+x)^(-delta);
    a finite C is fitted on a coarse sample at construction.
    """

    evaluator: Callable[[float], Scalar]
    decay_exponent: float
    fitted_C: float = field(init=False)

    def __post_init__(self):
        if not self.decay_exponent > 1.0:
            raise DomainError(
                f"profile decay exponent must exceed 1, got {self.decay_exponent}"
            )
        c = 0.0
        for x in np.linspace(0.0, 120.0, 25):
            v = abs(self.evaluator(float(x)))
            if not math.isfinite(v):
                raise DomainError(f"profile not finite at x = {x}")
            c = max(c, v * (4.0 + x) ** self.decay_exponent)
        object.__setattr__(self, "fitted_C", c)

    def __call__(self, x: float) -> Scalar:
        return self.evaluator(x)


@dataclass(frozen=True)
class EvenTestFunction:
    """Even function g with an exponential-decay tag a and smoothness order n.

    Construction only spot-checks evenness; the full membership test
    (derivatives, weighted boundedness) is decay_class_check.
    """

    evaluator: Callable[[float], Scalar]
    decay_a: float
    smooth_order: int

    def __post_init__(self):
        if self.smooth_order < 0:
            raise DomainError(f"smooth_order must be >= 0, got {self.smooth_order}")
        for u in (0.7, 1.9, 3.3):
            a = self.evaluator(u)
            b = self.evaluator(-u)
            if abs(a - b) > 1e-12 * max(1.0, abs(a)):
                raise DomainError(f"evaluator is not even at u = {u}: {a} vs {b}")

    def __call__(self, u: float) -> Scalar:
        return self.evaluator(u)


@dataclass(frozen=True)
class FourierSide:
    """Spectral-side function H(r), even in r; delta tags its decay class
    (H(r) = O((1+|r|)^(-2-delta)) when produced by decay_class_check)."""

    evaluator: Callable[[Scalar], complex]
    delta: Optional[float] = None

    def __call__(self, r: Scalar) -> complex:
        return complex(self.evaluator(r))


@dataclass(frozen=True)
class WaveTestParams:
    """Parameters (s, k) of the wave family g_s(u) = Gamma(s-1/2)/Gamma(s)
    cosh(u)^(-(s-1/2)).

    strict=True enforces Re(s) > max(1, |k|), the direct-definition range;
    strict=False admits any s for use with the continued spectral values.
    """

    s: complex
    k: float = 0.0
    strict: bool = True

    def __post_init__(self):
        object.__setattr__(self, "s", complex(self.s))
        if self.strict and not self.s.real > max(1.0, abs(self.k)):
            raise DomainError(
                f"wave parameter needs Re(s) > max(1, |k|): s={self.s}, k={self.k}"
            )


@dataclass(frozen=True)
class DecayReport:
    """Outcome of decay_class_check; delta = n - 2 is the spectral decay tag."""

    a: float
    n: int
    delta: float
    evenness_max: float
    weighted_sup_by_order: tuple[float, ...]
    u_max: float
    samples: int
    derivative_method: str
    fourier: FourierSide


# ---------------------------------------------------------------------------
# quadrature plumbing
# ---------------------------------------------------------------------------

_EPSABS = 1e-12
_EPSREL = 1e-12


def _quad_real(f, a, b, **kw):
    out = quad(f, a, b, full_output=1, **kw)
    return out[0], out[1]


def _quad_cx(f, a, b, **kw):
    re, re_err = _quad_real(lambda t: f(t).real, a, b, **kw)
    im, im_err = _quad_real(lambda t: f(t).imag, a, b, **kw)
    return complex(re, im), re_err + im_err


def _halfline_cos(f, r: float, epsabs: float):
    """2 * integral_0^inf cos(r u) f(u) du for complex-valued f, real r."""
    if r == 0.0:
        val, err = _quad_cx(f, 0.0, np.inf, epsabs=epsabs, epsrel=_EPSREL, limit=400)
    else:
        kw = dict(weight="cos", wvar=float(r), epsabs=epsabs, limit=400, limlst=120, maxp1=80)
        re, re_err = _quad_real(lambda u: f(u).real, 0.0, np.inf, **kw)
        im, im_err = _quad_real(lambda u: f(u).imag, 0.0, np.inf, **kw)
        val, err = complex(re, im), re_err + im_err
    return 2.0 * val, 2.0 * err


# ---------------------------------------------------------------------------
# forward chain
# ---------------------------------------------------------------------------


def q_forward(
    phi: Union[ProfileFunction, Callable[[float], Scalar]],
    y: float,
    k: float,
    with_error: bool = False,
    epsabs: float = _EPSABS,
    max_error: float = 1e-10,
):
    """Phase-weighted line integral of the profile.

    Returns integral over the whole line of Phi(y + v^2) times the
    unit-modulus phase ((sqrt(y+4)+iv)/(sqrt(y+4)-iv))^k, evaluated as
    exp(2ik atan2(v, sqrt(y+4))); the odd (sine) part cancels so only the
    cosine half-line integral is computed.
    """
    if y < 0.0:
        raise DomainError(f"q_forward needs y >= 0, got {y}")
    if isinstance(phi, ProfileFunction):
        if not phi.decay_exponent > max(1.0, abs(k)):
            raise DomainError(
                f"profile decay {phi.decay_exponent} too weak for weight k={k}"
            )
        fn = phi.evaluator
    else:
        fn = phi
    c = math.sqrt(y + 4.0)

    def f(v):
        arg = y + v * v
        if not math.isfinite(arg):
            return 0.0j
        out = complex(fn(arg))
        if k != 0.0:
            out *= math.cos(2.0 * k * math.atan2(v, c))
        return out
    val, err = _quad_cx(f, 0.0, np.inf, epsabs=epsabs, epsrel=_EPSREL, limit=400)
    val, err = 2.0 * val, 2.0 * err
    if err > max_error:
        raise QuadratureFailure(
            f"q_forward error estimate {err:.3e} exceeds {max_error:.1e}",
            estimate=err,
        )
    return (val, err) if with_error else val


def g_from_q(q: Callable[[float], Scalar], u: float) -> Scalar:
    """Even function g(u) = Q(2(cosh u - 1))."""
    return q(2.0 * (math.cosh(u) - 1.0))


def fourier_h(
    g: Union[EvenTestFunction, Callable[[float], Scalar]],
    r: Scalar,
    with_error: bool = False,
    epsabs: float = _EPSABS,
    max_error: float = 1e-10,
):
    """Spectral side h(r) = 2 * integral_0^inf cos(ur) g(u) du.

    Real r uses the QUADPACK cosine-weight rule on the half line; r with an
    imaginary part (allowed up to the decay tag a) uses a truncated plain
    quadrature with the cutoff chosen from the decay gap.
    """
    if isinstance(g, EvenTestFunction):
        fn, a = g.evaluator, g.decay_a
    else:
        fn, a = g, None
    rr = complex(r)
    if a is not None and abs(rr.imag) > a + 1e-12:
        raise DomainError(f"|Im r| = {abs(rr.imag)} exceeds the decay tag a = {a}")
    if rr.imag == 0.0:
        val, err = _halfline_cos(lambda u: complex(fn(u)), rr.real, epsabs)
    else:
        if a is None:
            raise DomainError("complex r needs an EvenTestFunction with a decay tag")
        gap = a - abs(rr.imag)
        if gap <= 1e-6:
            raise QuadratureFailure(
                f"decay gap {gap:.2e} too small to certify the cosine transform",
                estimate=math.inf,
            )
        cutoff = min(42.0 / gap, 1e5)
        f = lambda u: cmath.cos(u * rr) * complex(fn(u))
        val, err = _quad_cx(f, 0.0, cutoff, epsabs=epsabs, epsrel=_EPSREL, limit=400)
        val, err = 2.0 * val, 2.0 * err
    if err > max_error:
        raise QuadratureFailure(
            f"fourier_h error estimate {err:.3e} exceeds {max_error:.1e}",
            estimate=err,
        )
    return (val, err) if with_error else val


def inverse_fourier_even(h: Callable[[float], Scalar], u: float,
                         epsabs: float = _EPSABS) -> complex:
    """Pointwise inversion g(u) = (1/pi) integral_0^inf h(r) cos(ur) dr."""
    two_int, _ = _halfline_cos(lambda rr: complex(h(rr)), float(u), epsabs)
    return two_int / (2.0 * math.pi)


# ---------------------------------------------------------------------------
# the wave family g_s and its Gamma closed form
# ---------------------------------------------------------------------------


def gs_value(p: WaveTestParams, u: float) -> complex:
    """g_s(u) = Gamma(s-1/2)/Gamma(s) * cosh(u)^(-(s-1/2))."""
    s = p.s
    pref = cmath.exp(log_gamma(s - 0.5) - log_gamma(s))
    # log cosh u = |u| + log1p(exp(-2|u|)) - log 2, overflow-free
    log_cosh = abs(u) + math.log1p(math.exp(-2.0 * abs(u))) - math.log(2.0)
    return pref * cmath.exp(-(s - 0.5) * log_cosh)


def gs_even_test_function(p: WaveTestParams) -> EvenTestFunction:
    """g_s wrapped with its decay tag a = Re(s) - 1/2 and smoothness 4."""
    return EvenTestFunction(
        evaluator=lambda u: gs_value(p, u),
        decay_a=p.s.real - 0.5,
        smooth_order=4,
    )


def qs_value(p: WaveTestParams, y: float) -> complex:
    """Q_s(y) = g_s(arccosh(1 + y/2)), the image of g_s on the Q level."""
    if y < 0.0:
        raise DomainError(f"qs_value needs y >= 0, got {y}")
    return gs_value(p, math.acosh(1.0 + 0.5 * y))


def qs_prime(p: WaveTestParams, y: float) -> complex:
    """Closed-form dQ_s/dy = -(s-1/2) g_s(u) tanh(u) / sqrt(y^2+4y),
    u = arccosh(1+y/2); the y -> 0 limit of the quotient is 1/2."""
    if y < 0.0:
        raise DomainError(f"qs_prime needs y >= 0, got {y}")
    s = p.s
    if y < 1e-14:
        return -(s - 0.5) * gs_value(p, 0.0) * 0.5
    u = math.acosh(1.0 + 0.5 * y)
    return -(s - 0.5) * gs_value(p, u) * math.tanh(u) / math.sqrt(y * y + 4.0 * y)


def h_gs_closed(p: WaveTestParams, r: Scalar) -> complex:
    """Gamma closed form of the cosine transform of g_s:
    2^(s-3/2) Gamma((s-1/2-ir)/2) Gamma((s-1/2+ir)/2) / Gamma(s)."""
    s = p.s
    rr = complex(r)
    if not s.real - 0.5 > abs(rr.imag) - 1e-15:
        raise DomainError(
            f"h_gs_closed needs Re(s) - 1/2 > |Im r|: s={s}, r={rr}"
        )
    a1 = 0.5 * (s - 0.5 - 1j * rr)
    a2 = 0.5 * (s - 0.5 + 1j * rr)
    for arg in (a1, a2):
        if abs(arg - round(arg.real)) < 1e-12 and round(arg.real) <= 0:
            raise PoleError(f"Gamma pole at argument {arg}")
    return cmath.exp(
        (s - 1.5) * math.log(2.0) + log_gamma(a1) + log_gamma(a2) - log_gamma(s)
    )


def h_recurrence_factor(p: WaveTestParams, r: Scalar, n: int) -> complex:
    """Pochhammer ratio with h(r, g_s) = factor * h(r, g_{s+2n}):
    2^(-2n) (s)_{2n} / [ (s/2-1/4-ir/2)_n (s/2-1/4+ir/2)_n ]."""
    if n < 0:
        raise DomainError(f"recurrence depth must be >= 0, got {n}")
    if n == 0:
        return 1.0 + 0.0j
    s = p.s
    rr = complex(r)
    num = 1.0 + 0.0j
    for j in range(2 * n):
        num *= s + j
    dm = 0.5 * s - 0.25 - 0.5j * rr
    dp = 0.5 * s - 0.25 + 0.5j * rr
    den = 1.0 + 0.0j
    for j in range(n):
        for base in (dm, dp):
            fct = base + j
            if abs(fct) < 1e-12:
                raise PoleError(
                    f"denominator Pochhammer vanishes at s = {s}, r = {rr}, j = {j}"
                )
            den *= fct
    return 4.0 ** (-n) * num / den


def h_continued(p: WaveTestParams, r: Scalar, n: int) -> complex:
    """Continued spectral value factor(s, r, n) * h_gs_closed(s + 2n, r).

    Valid for Re(s) + 2n > max(1, |k|) + 1/2; on the overlap with the direct
    range it reproduces h_gs_closed.  Poles sit at s = 1/2 +- ir - 2m for
    m < n and are flagged within distance 1e-3.
    """
    if n < 0:
        raise DomainError(f"continuation depth must be >= 0, got {n}")
    s = p.s
    rr = complex(r)
    if not s.real + 2 * n > max(1.0, abs(p.k)) + 0.5:
        raise DomainError(
            f"continuation needs Re(s) + 2n > max(1, |k|) + 1/2: s={s}, n={n}, k={p.k}"
        )
    for j in range(n):
        for sign in (-1.0, 1.0):
            fct = 0.5 * s - 0.25 + sign * 0.5j * rr + j
            if 2.0 * abs(fct) < 1e-3:
                raise PoleError(
                    f"s = {s} is within 1e-3 of the pole s = {0.5 - sign*1j*rr - 2*j}"
                    f" (r = {rr})"
                )
    shifted = WaveTestParams(s + 2 * n, p.k, strict=False)
    return h_recurrence_factor(p, rr, n) * h_gs_closed(shifted, rr)


# ---------------------------------------------------------------------------
# inverse chain
# ---------------------------------------------------------------------------


def q_inverse(g: Union[EvenTestFunction, Callable[[float], Scalar]], y: float) -> Scalar:
    """Q(y) = g(2 log(sqrt(y+4)/2 + sqrt(y)/2)), the inverse of the cosh
    substitution y = 2(cosh u - 1)."""
    if y < 0.0:
        raise DomainError(f"q_inverse needs y >= 0, got {y}")
    fn = g.evaluator if isinstance(g, EvenTestFunction) else g
    u = 2.0 * math.log(0.5 * math.sqrt(y + 4.0) + 0.5 * math.sqrt(y))
    return fn(u)


def phi_inverse(
    q_prime: Callable[[float], Scalar],
    x: float,
    k: float,
    with_error: bool = False,
    epsabs: float = _EPSABS,
    max_error: float = 1e-8,
):
    """Inverse of the phase-weighted line integral:
    -(1/pi) integral over the line of Q'(x+t^2) ((sqrt(x+4+t^2)-t)/(sqrt(x+4+t^2)+t))^k dt.

    The base of the power is positive, and t -> -t inverts it, so the
    half-line integrand carries 2 cosh(k log base).
    """
    if x < 0.0:
        raise DomainError(f"phi_inverse needs x >= 0, got {x}")

    def f(t):
        arg = x + t * t
        if not math.isfinite(arg):
            return 0.0j
        qv = complex(q_prime(arg))
        if qv == 0.0:
            return 0.0j
        c = math.sqrt(x + 4.0 + t * t)
        # log base = log((c-t)/(c+t)) without the c - t cancellation
        w = k * (math.log(x + 4.0) - 2.0 * math.log(c + t))
        if abs(w) < 700.0:
            return qv * 2.0 * math.cosh(w)
        # 2 cosh(w) ~ exp(|w|); fold into the modulus in log space
        lm = math.log(abs(qv)) + abs(w)
        return (qv / abs(qv)) * math.exp(lm)

    val, err = _quad_cx(f, 0.0, np.inf, epsabs=epsabs, epsrel=_EPSREL, limit=400)
    val, err = -val / math.pi, err / math.pi
    if err > max_error:
        raise QuadratureFailure(
            f"phi_inverse error estimate {err:.3e} exceeds {max_error:.1e}",
            estimate=err,
        )
    return (val, err) if with_error else val


def numeric_derivative(f: Callable[[float], Scalar], y: float,
                       h: Optional[float] = None) -> Scalar:
    """5-point first derivative with step 1e-5 (1+|y|); one-sided variant
    near the y = 0 boundary so f is never probed at negative arguments."""
    if h is None:
        h = 1e-5 * (1.0 + abs(y))
    if y >= 2.0 * h:
        f1 = complex(f(y - 2 * h)) - 8.0 * complex(f(y - h))
        f2 = 8.0 * complex(f(y + h)) - complex(f(y + 2 * h))
        out = (f1 + f2) / (12.0 * h)
    else:
        c = (-25.0, 48.0, -36.0, 16.0, -3.0)
        out = sum(cj * complex(f(y + j * h)) for j, cj in enumerate(c)) / (12.0 * h)
    if out.imag == 0.0:
        return out.real
    return out


# ---------------------------------------------------------------------------
# class membership report
# ---------------------------------------------------------------------------


def decay_class_check(
    g: Union[EvenTestFunction, Callable[[float], Scalar]],
    a: float,
    n: int,
    u_max: float = 25.0,
    step: float = 0.025,
) -> DecayReport:
    """Sample g and n numerical derivatives, verify evenness and
    exp(a|u|)-weighted boundedness, and tag the spectral side with
    delta = n - 2.

    Boundedness criterion: for each derivative order, the weighted sup over
    the outer quarter of the grid must not exceed 10x the weighted sup over
    the inner three quarters (a growing weighted envelope fails).  Raises
    ClassViolation naming the first failing sample.
    """
    fn = g.evaluator if isinstance(g, EvenTestFunction) else g
    if n < 0:
        raise DomainError(f"derivative count must be >= 0, got {n}")

    evenness_max = 0.0
    for u in np.linspace(0.25, u_max, 64):
        lhs = complex(fn(float(u)))
        rhs = complex(fn(float(-u)))
        dev = abs(lhs - rhs)
        evenness_max = max(evenness_max, dev)
        if dev > 1e-13 * max(1.0, abs(lhs)):
            raise ClassViolation(
                f"evenness fails at u = {float(u)}: g(u) = {lhs}, g(-u) = {rhs}"
            )

    # symmetric grid with padding so repeated differencing keeps second-order
    # accuracy on the reported window
    pad = step * (5 * max(n, 1))
    m = int(round(2 * (u_max + pad) / step)) + 1
    grid = np.linspace(-(u_max + pad), u_max + pad, m)
    vals = np.array([complex(fn(float(u))) for u in grid])
    h = grid[1] - grid[0]

    inner = np.abs(grid) <= u_max
    cut = 0.75 * u_max
    sups: list[float] = []
    deriv = vals
    for order in range(n + 1):
        weighted = np.abs(deriv) * np.exp(a * np.abs(grid))
        w_in = weighted[inner]
        u_in = grid[inner]
        head = float(np.max(w_in[np.abs(u_in) <= cut]))
        tail_mask = np.abs(u_in) > cut
        tail = float(np.max(w_in[tail_mask])) if np.any(tail_mask) else 0.0
        sups.append(float(np.max(w_in)))
        if tail > 10.0 * max(head, 1e-300):
            u_bad = float(u_in[tail_mask][int(np.argmax(w_in[tail_mask]))])
            raise ClassViolation(
                f"exp({a}|u|)-weighted derivative order {order} grows: "
                f"weighted value {tail:.3e} at u = {u_bad} vs inner sup {head:.3e}"
            )
        if order < n:
            deriv = np.gradient(deriv, h, edge_order=2)

    delta = float(n - 2)
    side = FourierSide(evaluator=lambda r: complex(fourier_h(fn, r)), delta=delta)
    return DecayReport(
        a=a,
        n=n,
        delta=delta,
        evenness_max=evenness_max,
        weighted_sup_by_order=tuple(sups),
        u_max=u_max,
        samples=m,
        derivative_method="numeric-central",
        fourier=side,
    )


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------


def write_trace_csv(
    dest: Union[str, TextIO],
    rows: Sequence[tuple[float, Scalar, float]],
) -> None:
    """Write a transform trace as CSV with columns
    grid_point, value_re, value_im, error_estimate."""

    def _emit(handle: TextIO) -> None:
        wr = csv.writer(handle)
        wr.writerow(["grid_point", "value_re", "value_im", "error_estimate"])
        for point, value, err in rows:
            v = complex(value)
            wr.writerow([repr(float(point)), repr(v.real), repr(v.imag), repr(float(err))])

    if isinstance(dest, str):
        with open(dest, "w", newline="") as handle:
            _emit(handle)
    else:
        _emit(dest)
