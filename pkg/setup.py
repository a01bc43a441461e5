"""Build script: compiles the optional Cython kernel core.

The package is fully functional without the extension (qsflow.kernels falls
back to vectorized numpy); the build therefore skips the extension instead of
failing when Cython or a C compiler is unavailable.
"""

import numpy as np
from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/qsflow/_kernels.pyx"],
        compiler_directives={"language_level": "3"},
    )
    for ext in ext_modules:
        ext.include_dirs.append(np.get_include())
        ext.extra_compile_args = ["-O3"]
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
