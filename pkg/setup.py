"""Build script: compiles the optional Cython kernel core.

The package works without the extension (a numpy fallback is selected at
import time), so compilation failures are downgraded to a warning.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/liemech/_kernels/_core.pyx",
        language_level=3,
    )
    include_dirs = [numpy.get_include()]
except Exception as exc:  # pragma: no cover - build environment dependent
    print(f"liemech: skipping compiled kernels ({exc}); numpy fallback will be used")
    include_dirs = []

setup(ext_modules=ext_modules, include_dirs=include_dirs)
