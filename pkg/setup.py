"""Build script: compiles the optional Cython fast path for the hot loops.

The package works without the extension (a numpy fallback is selected at
import time), so any build failure here degrades to the pure-Python wheel
instead of aborting the install.
"""

import os
import sys

from setuptools import Extension, setup


def _extensions():
    if os.environ.get("POINCARE_PURE_PYTHON"):
        return []
    try:
        from Cython.Build import cythonize
        import numpy
    except ImportError:
        print("poincare-kernels: Cython/numpy unavailable at build time; "
              "installing pure-Python fallback only", file=sys.stderr)
        return []
    ext = Extension(
        "poincare_kernels._core",
        sources=["src/poincare_kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
    return cythonize(
        [ext],
        annotate=False,
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


try:
    setup(ext_modules=_extensions())
except SystemExit:
    raise
except Exception as exc:  # noqa: BLE001 - degrade to pure python on any build error
    print(f"poincare-kernels: extension build failed ({exc}); "
          "retrying as pure Python", file=sys.stderr)
    setup(ext_modules=[])
