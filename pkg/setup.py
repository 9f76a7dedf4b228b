"""Build script for the optional compiled Jacobi kernel.

Falls back to a pure-Python install when Cython or a C compiler is missing;
the package then selects ``selftesting._jacobi_py`` at import time.
"""
import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "selftesting._jacobi_ext",
                ["src/selftesting/_jacobi_ext.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
