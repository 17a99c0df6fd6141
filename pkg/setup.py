"""Build script for the optional compiled statevector kernels.

The Cython extension is optional: if Cython is not importable the
package installs without it and ``qslearn.sim.kernels`` falls back to the
numpy implementation.
"""
import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("QSLEARN_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "qslearn.sim._kernels",
                    ["src/qslearn/sim/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
