"""Build script for the optional compiled similarity kernels.

The package is fully functional without the extension: credistream.simtext
falls back to the pure-Python kernels at import time.  Set
CREDISTREAM_NO_EXT=1 to skip the compilation step entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("CREDISTREAM_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "credistream.simtext._ckernels",
                    sources=["src/credistream/simtext/_ckernels.pyx"],
                    extra_compile_args=["-O3", "-march=native", "-funroll-loops"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
