"""Build script for the optional compiled kernel.

The package works without the extension (a NumPy fallback is selected at
import time), so the build is marked optional and a failed compile does not
abort installation.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "resetbm._kernels._ckern",
                ["src/resetbm/_kernels/_ckern.pyx"],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
