"""Build the optional compiled stepping kernels.

The package runs without them (pure-NumPy fallbacks are selected at import
time); building them makes long simulations and the explicit reference
integrator much faster.  Set KPPFRONT_PURE=1 to skip the extensions.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("KPPFRONT_PURE"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "kppfront._stepcore",
                    ["src/kppfront/_stepcore.pyx"],
                    extra_compile_args=["-O3"],
                ),
                Extension(
                    "kppfront._refcore",
                    ["src/kppfront/_refcore.pyx"],
                    extra_compile_args=["-O3"],
                ),
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
