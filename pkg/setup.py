from setuptools import setup
from setuptools.extension import Extension

import numpy as np
from Cython.Build import cythonize

# No -ffast-math: the compiled core must stay bit-identical to the pure
# Python fallback, so reassociation is off limits.
extensions = [
    Extension(
        "ldpcsched._core",
        ["src/ldpcsched/_core.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
]

setup(ext_modules=cythonize(extensions, language_level="3"))
