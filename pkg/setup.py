"""Build script: compiles the optional speedup extension.

The package works without the extension (pure-python kernels are selected at
import time); set NEARCRIT_PURE=1 to skip the build entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("NEARCRIT_PURE"):
    try:
        from Cython.Build import cythonize

        ext = Extension(
            "nearcrit._core._speedups",
            ["src/nearcrit/_core/_speedups.pyx"],
            extra_compile_args=["-O3"],
        )
        ext.optional = True  # a failed compile must not fail the install
        ext_modules = cythonize([ext], language_level=3)
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
