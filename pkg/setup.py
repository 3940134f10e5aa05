"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-Python twin is selected at
import time), so the extension is marked optional and a missing Cython or a
failing C compiler degrades to a pure-Python install.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext = Extension(
        "qdkd._kernels_c",
        ["src/qdkd/_kernels_c.pyx"],
        # No -ffast-math / -march: the compiled kernels must stay bit-for-bit
        # identical to the pure-Python twin (IEEE semantics, no FMA contraction).
        extra_compile_args=["-O2"],
        optional=True,
    )
    ext_modules = cythonize([ext], compiler_directives={"language_level": "3"})

setup(ext_modules=ext_modules)
