"""Optional Cython build of the numerical kernels.

The package works without the extension; ``eulerdarboux._kernels`` picks
the pure-Python fallback at import time when the compiled module is absent.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("EULERDARBOUX_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "eulerdarboux._ckernels",
                    ["src/eulerdarboux/_ckernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
