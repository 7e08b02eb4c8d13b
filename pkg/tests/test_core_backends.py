"""Compiled core against the pure-Python fallback: the membership contract is
bit-exact, series values agree to close to machine precision."""

import os
import subprocess
import sys

import numpy as np
import pytest

from poincare_kernels import _core_py, core
from poincare_kernels.errors import BudgetExceeded, NoConvergence

_core = pytest.importorskip("poincare_kernels._core")

CONFIGS = [
    (0.0, 1.0, 0.0, 1.0, 12.0),
    (0.3, 1.7, -0.2, 0.8, 20.0),
    (0.5, 0.5, 0.5, 0.5, 30.0),
    (-1.2, 0.15, 0.7, 2.4, 15.0),
    (2.0, 3.0, -2.0, 0.3, 25.0),
    (0.1, 10.0, 0.1, 10.0, 200.0),
]


def test_backend_selected():
    assert core.backend_name() in ("cython", "python")
    # with the extension importable, the default selection is compiled
    if os.environ.get("POINCARE_FORCE_PY"):
        assert core.backend_name() == "python"
    else:
        assert core.backend_name() == "cython"


@pytest.mark.parametrize("cfg", CONFIGS)
def test_ball_sweep_bit_identical(cfg):
    a = _core.ball_sweep(*cfg, 10_000_000)
    b = _core_py.ball_sweep(*cfg, 10_000_000)
    assert a.dtype == np.int64 and b.dtype == np.int64
    assert np.array_equal(a, b)


@pytest.mark.parametrize("cfg", CONFIGS[:3])
def test_pair_arrays_bit_identical(cfg):
    mats = _core_py.ball_sweep(*cfg, 10_000_000)
    za, zb, wa, wb, _ = cfg
    out_c = _core.pair_arrays(mats, za, zb, wa, wb)
    out_p = _core_py.pair_arrays(mats, za, zb, wa, wb)
    assert len(out_c) == len(out_p) == 5
    for ac, ap in zip(out_c, out_p):
        assert np.array_equal(np.asarray(ac), np.asarray(ap))


def test_ball_sweep_empty_and_minimal():
    # R = 1 at a generic point keeps only +-I
    a = _core.ball_sweep(0.0, 2.0, 0.0, 2.0, 1.0, 10_000)
    b = _core_py.ball_sweep(0.0, 2.0, 0.0, 2.0, 1.0, 10_000)
    assert np.array_equal(a, b)
    assert len(a) == 2


def test_ball_sweep_budget_parity():
    for impl in (_core, _core_py):
        with pytest.raises(BudgetExceeded):
            impl.ball_sweep(0.0, 1.0, 0.0, 1.0, 2000.0, 50)


def test_hyp_series_close_small_batch(rng):
    n = 64
    x = rng.uniform(-0.6, 0.6, n)
    for a, b, c in ((-0.5, 0.5, 2.5), (1.5 + 1j, 0.5 - 1j, 3.0), (2.0, 3.0, 4.5)):
        va = _core.hyp2f1_series_batch(a, b, c, x)
        vb = _core_py.hyp2f1_series_batch(a, b, c, x)
        assert np.allclose(va, vb, rtol=1e-13, atol=1e-300)


def test_hyp_series_large_batch_delegates_exactly(rng):
    # above the crossover the compiled entry point delegates to the fallback
    n = 1000
    x = rng.uniform(-0.6, 0.6, n)
    va = _core.hyp2f1_series_batch(-0.5, 0.5, 2.5, x)
    vb = _core_py.hyp2f1_series_batch(-0.5, 0.5, 2.5, x)
    assert np.array_equal(va, vb)


def test_hyp_series_empty():
    for impl in (_core, _core_py):
        out = impl.hyp2f1_series_batch(1.0, 1.0, 2.0, np.empty(0))
        assert len(out) == 0


def test_hyp_series_no_convergence_parity():
    x = np.array([0.99999])
    for impl in (_core, _core_py):
        with pytest.raises(NoConvergence):
            impl.hyp2f1_series_batch(1.0, 1.0, 2.0, x, 1e-15, 200)


def test_force_py_env_selects_fallback():
    code = ("from poincare_kernels import core; print(core.backend_name())")
    env = dict(os.environ, POINCARE_FORCE_PY="1")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True,
                         text=True, env=env, check=True)
    assert out.stdout.strip() == "python"


def test_dispatch_matches_membership_decisions(rng):
    # the public dispatcher and both backends agree on which elements are in
    z = (rng.uniform(-2, 2), 10.0 ** rng.uniform(-0.5, 0.5))
    w = (rng.uniform(-2, 2), 10.0 ** rng.uniform(-0.5, 0.5))
    got = core.ball_sweep(z[0], z[1], w[0], w[1], 18.0, 10_000_000)
    ref = _core_py.ball_sweep(z[0], z[1], w[0], w[1], 18.0, 10_000_000)
    assert np.array_equal(got, ref)
