"""Builds the optional compiled kernel; the package works without it."""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("HOPFDIAG_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("hopfdiag._kernels", ["src/hopfdiag/_kernels.pyx"], optional=True)],
            language_level="3",
        )

setup(ext_modules=ext_modules)
