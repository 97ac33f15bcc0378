"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension (pure NumPy fallbacks
are selected at import time); the build therefore degrades gracefully when
Cython or a C compiler is unavailable.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "tickcorr._kernels._core",
                ["src/tickcorr/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                # keep C arithmetic order identical to the Python fallback
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
