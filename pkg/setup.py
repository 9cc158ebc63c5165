"""Build wiring for the optional compiled kernels.

The package is pure Python except for genvi._speedups, which holds the
trajectory-loop kernels used by the long experiment sweeps.  The extension
is marked optional: if Cython or a C compiler is missing the install still
succeeds and genvi.kernels falls back to the pure-Python implementations.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "genvi._speedups",
                ["src/genvi/_speedups.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
