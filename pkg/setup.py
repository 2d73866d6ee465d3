"""Builds the optional compiled kernel extension.

If the extension cannot be built the package still works: qewa._kernels
falls back to the pure-Python implementation at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("qewa._kernels._ck", ["src/qewa/_kernels/_ck.pyx"])],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
