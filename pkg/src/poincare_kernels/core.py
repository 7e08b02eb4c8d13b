"""Backend dispatch for the hot inner loops.

At import time the compiled extension (``_core``, built from Cython) is
preferred; if it is missing the numpy fallback (``_core_py``) is used.  Both
expose the same three functions with identical semantics:

- ``ball_sweep``: certified enumeration of integer matrices moving one point
  into a displacement ball around another,
- ``pair_arrays``: batched per-element displacement and phase-argument data,
- ``hyp2f1_series_batch``: the Gauss series evaluated over a vector of
  arguments with shared parameters.

Set ``POINCARE_FORCE_PY=1`` in the environment to force the fallback (used
by the benchmark for side-by-side timings).
"""

import os

if os.environ.get("POINCARE_FORCE_PY"):
    from . import _core_py as _impl

    _BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        _BACKEND = "cython"
    except ImportError:
        from . import _core_py as _impl

        _BACKEND = "python"

ball_sweep = _impl.ball_sweep
pair_arrays = _impl.pair_arrays
hyp2f1_series_batch = _impl.hyp2f1_series_batch


def backend_name() -> str:
    """Which implementation of the hot loops is active ("cython" or "python")."""
    return _BACKEND
