"""Build script. The compiled extension is optional: if Cython or a C compiler
is unavailable the package installs pure-Python and selects the numpy kernel
backend at import time."""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "chanzo._fast",
                ["src/chanzo/_fast.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    sys.stderr.write(f"chanzo: building without compiled kernels ({exc})\n")

setup(ext_modules=ext_modules)
