"""Modular group enumeration, Dedekind sums, and multiplier systems."""

import cmath
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from oracles import brute_ball
from poincare_kernels import fuchsian, geom
from poincare_kernels.errors import BudgetExceeded, ConventionError, DomainError

I2 = fuchsian.IDENTITY
T = fuchsian.T
S = fuchsian.S


# ---------------------------------------------------------------------------
# GroupElement
# ---------------------------------------------------------------------------

def test_group_element_validation():
    with pytest.raises(DomainError):
        fuchsian.GroupElement(1, 0, 0, 2)
    with pytest.raises(DomainError):
        fuchsian.GroupElement(1.5, 0, 0, 1)
    g = fuchsian.GroupElement(1.0, 2.0, 0.0, 1.0)
    assert g.as_tuple() == (1, 2, 0, 1)
    assert all(isinstance(v, int) for v in g.as_tuple())


def test_group_element_algebra():
    assert (T @ S).as_tuple() == (1, -1, 1, 0)
    assert T.inverse().as_tuple() == (1, -1, 0, 1)
    assert (S @ S).as_tuple() == (-1, 0, 0, -1)
    assert (-I2).as_tuple() == (-1, 0, 0, -1)
    g = T @ S @ T @ T
    assert (g @ g.inverse()).as_tuple() == (1, 0, 0, 1)


def test_constants():
    assert I2.as_tuple() == (1, 0, 0, 1)
    assert T.as_tuple() == (1, 1, 0, 1)
    assert S.as_tuple() == (0, -1, 1, 0)


def test_to_mat2_matches():
    m = (S @ T).to_mat2()
    assert (m.a, m.b, m.c, m.d) == (0.0, -1.0, 1.0, 1.0)


# ---------------------------------------------------------------------------
# sigma_of
# ---------------------------------------------------------------------------

def test_sigma_of_identity_is_one_on_diagonal():
    z = geom.Point(0.3, 1.7)
    assert fuchsian.sigma_of(I2, z, z) == 1.0


def test_sigma_of_matches_geom_route(rng):
    for _ in range(50):
        g = fuchsian.random_word(rng)
        z = geom.Point(rng.uniform(-2, 2), 10.0 ** rng.uniform(-1, 1))
        w = geom.Point(rng.uniform(-2, 2), 10.0 ** rng.uniform(-1, 1))
        direct = fuchsian.sigma_of(g, z, w)
        m = geom.pair_metrics(z, geom.moebius_act(g.to_mat2(), w))
        assert abs(direct - m.sigma) < 1e-9 * m.sigma


# ---------------------------------------------------------------------------
# ball enumeration
# ---------------------------------------------------------------------------

def test_unit_ball_at_i():
    ball = fuchsian.enumerate_ball(geom.Point(0, 1), geom.Point(0, 1), 1.01)
    got = sorted(g.as_tuple() for g in ball.elements)
    assert got == sorted([(1, 0, 0, 1), (-1, 0, 0, -1), (0, -1, 1, 0), (0, 1, -1, 0)])
    assert ball.certified
    assert len(ball) == 4


def test_ball_radius_validation():
    with pytest.raises(DomainError):
        fuchsian.enumerate_ball(geom.Point(0, 1), geom.Point(0, 1), 0.5)


def test_ball_budget():
    with pytest.raises(BudgetExceeded):
        fuchsian.enumerate_ball(geom.Point(0, 1), geom.Point(0, 1), 50.0, budget=10)


def test_ball_as_array_and_serialize():
    ball = fuchsian.enumerate_ball(geom.Point(0, 1), geom.Point(0, 1), 1.01)
    arr = ball.as_array()
    assert arr.shape == (4, 4) and arr.dtype == np.int64
    ser = ball.serialize()
    assert json.loads(json.dumps(ser)) == ser
    assert sorted(map(tuple, ser)) == sorted(g.as_tuple() for g in ball.elements)


@pytest.mark.parametrize("zc,wc,R", [
    (0 + 1j, 0 + 1j, 6.0),
    (0.3 + 1.7j, -0.2 + 0.8j, 6.0),
    (0.5 + 0.5j, 0.5 + 0.5j, 4.0),
])
def test_ball_matches_brute_force(zc, wc, R):
    z = geom.Point(zc.real, zc.imag)
    w = geom.Point(wc.real, wc.imag)
    want, margin, gap = brute_ball(z, w, R, box=28)
    assert margin >= 5, "scan box too tight to certify completeness"
    assert gap > 1e-8, "sigma tie at the boundary; move R"
    got = {g.as_tuple() for g in fuchsian.enumerate_ball(z, w, R).elements}
    assert got == want


def test_ball_inverse_closure(rng):
    # g moves w near z  <=>  g^-1 moves z near w
    z = geom.Point(0.3, 1.7)
    w = geom.Point(-0.6, 0.9)
    R = 10.0
    fwd = {g.as_tuple() for g in fuchsian.enumerate_ball(z, w, R).elements}
    bwd = {g.inverse().as_tuple()
           for g in fuchsian.enumerate_ball(w, z, R).elements}
    assert fwd == bwd


# ---------------------------------------------------------------------------
# counting function
# ---------------------------------------------------------------------------

def test_counting_golden():
    assert fuchsian.counting_N(0.1, geom.Point(0, 1), geom.Point(0, 1)) == 4
    assert fuchsian.counting_N(0.1, geom.Point(0, 2), geom.Point(0, 2)) == 2
    assert fuchsian.counting_N(8.0, geom.Point(0, 2), geom.Point(0, 2)) == 17916


def test_counting_monotone():
    z = geom.Point(0.1, 1.2)
    w = geom.Point(-0.4, 0.7)
    counts = [fuchsian.counting_N(r, z, w) for r in (0.5, 1.5, 3.0, 5.0)]
    assert counts == sorted(counts)
    assert counts[-1] > counts[0]


def test_counting_domain():
    with pytest.raises(DomainError):
        fuchsian.counting_N(0.0, geom.Point(0, 1), geom.Point(0, 1))


# ---------------------------------------------------------------------------
# Dedekind sums
# ---------------------------------------------------------------------------

def test_dedekind_golden():
    assert fuchsian.dedekind_sum(0, 1) == 0
    assert fuchsian.dedekind_sum(1, 2) == 0
    assert fuchsian.dedekind_sum(1, 3) == Fraction(1, 18)
    # s(1, c) = (c-1)(c-2)/(12c)
    for c in (2, 3, 5, 12, 35):
        assert fuchsian.dedekind_sum(1, c) == Fraction((c - 1) * (c - 2), 12 * c)


def test_dedekind_reciprocity(rng):
    # s(d,c) + s(c,d) = -1/4 + (c/d + d/c + 1/(cd))/12, exactly
    done = 0
    while done < 25:
        c = int(rng.integers(1, 60))
        d = int(rng.integers(1, 60))
        if math.gcd(c, d) != 1:
            continue
        lhs = fuchsian.dedekind_sum(d, c) + fuchsian.dedekind_sum(c, d)
        rhs = Fraction(-1, 4) + (Fraction(c, d) + Fraction(d, c)
                                 + Fraction(1, c * d)) / 12
        assert lhs == rhs
        done += 1


def test_dedekind_symmetries():
    for c in (5, 7, 12):
        for d in range(1, c):
            if math.gcd(d, c) != 1:
                continue
            assert fuchsian.dedekind_sum(d + c, c) == fuchsian.dedekind_sum(d, c)
            assert fuchsian.dedekind_sum(-d, c) == -fuchsian.dedekind_sum(d, c)


def test_dedekind_domain():
    with pytest.raises(DomainError):
        fuchsian.dedekind_sum(1, 0)
    with pytest.raises(DomainError):
        fuchsian.dedekind_sum(2, 4)


# ---------------------------------------------------------------------------
# eta phase
# ---------------------------------------------------------------------------

def test_eta_phase_golden():
    assert abs(fuchsian.eta_phase(T) - math.pi / 12.0) < 1e-15
    assert abs(fuchsian.eta_phase(S) + math.pi / 4.0) < 1e-15
    for b in (-3, 2, 7):
        g = fuchsian.GroupElement(1, b, 0, 1)
        assert abs(fuchsian.eta_phase(g) - math.pi * b / 12.0) < 1e-14


def test_eta_phase_sector():
    with pytest.raises(DomainError):
        fuchsian.eta_phase(-I2)
    with pytest.raises(DomainError):
        fuchsian.eta_phase(fuchsian.GroupElement(0, 1, -1, 0))


# ---------------------------------------------------------------------------
# multiplier systems
# ---------------------------------------------------------------------------

def test_multiplier_validation():
    with pytest.raises(DomainError):
        fuchsian.MultiplierSystem("weird", 0.5)
    with pytest.raises(DomainError):
        fuchsian.MultiplierSystem("eta_power", 0.5, d_dim=2)
    with pytest.raises(ConventionError):
        fuchsian.MultiplierSystem("trivial", 0.5)
    assert fuchsian.MultiplierSystem("trivial", 2.0).convention_sign == 1


def test_chi_trivial():
    ms = fuchsian.MultiplierSystem("trivial", 0.0)
    for g in (I2, T, S, -I2, S @ T @ S):
        assert fuchsian.chi(ms, g) == 1.0 + 0.0j


def test_chi_eta_goldens():
    ms = fuchsian.MultiplierSystem("eta_power", 0.5)
    assert abs(fuchsian.chi(ms, T) - cmath.exp(1j * math.pi / 6.0)) < 1e-14
    assert abs(fuchsian.chi(ms, S) - (-1j)) < 1e-14
    assert abs(fuchsian.chi(ms, I2) - 1.0) < 1e-15


def test_chi_minus_identity():
    for k in (0.5, 1.0, 1.3, 2.7):
        ms = fuchsian.MultiplierSystem("eta_power", k)
        want = cmath.exp(-2j * math.pi * k)
        assert abs(fuchsian.chi(ms, -I2) - want) < 1e-13


def test_chi_unimodular(rng):
    ms = fuchsian.MultiplierSystem("eta_power", 1.3)
    for _ in range(30):
        g = fuchsian.random_word(rng)
        assert abs(abs(fuchsian.chi(ms, g)) - 1.0) < 1e-13


def test_chi_translation_powers():
    # upper-triangular products have trivial winding, so chi is a homomorphism
    # along the T-powers
    ms = fuchsian.MultiplierSystem("eta_power", 0.5)
    base = fuchsian.chi(ms, T)
    for b in range(1, 13):
        g = fuchsian.GroupElement(1, b, 0, 1)
        assert abs(fuchsian.chi(ms, g) - base ** b) < 1e-13
    # chi(T)^24 = 1 for the weight-1/2 system
    assert abs(base ** 24 - 1.0) < 1e-13


@pytest.mark.parametrize("kind,k", [
    ("eta_power", 0.0), ("eta_power", 0.5), ("eta_power", 1.0),
    ("eta_power", 1.3), ("trivial", 0.0), ("trivial", 2.0),
])
def test_chi_composition_rule(kind, k, rng):
    ms = fuchsian.MultiplierSystem(kind, k)
    worst = 0.0
    for _ in range(200):
        g1 = fuchsian.random_word(rng)
        g2 = fuchsian.random_word(rng)
        worst = max(worst, fuchsian.consistency_residual(ms, g1, g2))
    assert worst < 1e-10


def test_random_word_reproducible():
    a = [fuchsian.random_word(np.random.default_rng(7)).as_tuple() for _ in range(5)]
    b = [fuchsian.random_word(np.random.default_rng(7)).as_tuple() for _ in range(5)]
    assert a == b
    g = fuchsian.random_word(np.random.default_rng(123))
    assert g.a * g.d - g.b * g.c == 1
