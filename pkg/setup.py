"""Build script: compiles the optional accelerator extension.

The extension is marked optional; if no C toolchain is available the
install proceeds and the package falls back to the numpy kernels.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "tailsum._kernels._core",
                sources=["src/tailsum/_kernels/_core.pyx"],
                optional=True,
            )
        ],
        language_level="3",
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
