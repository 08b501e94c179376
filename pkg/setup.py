"""Build script: compiles the optional speedup extension.

Set FLOWERAUCTION_NO_EXT=1 to skip the extension entirely; the package
then runs on the pure-Python kernel backend.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("FLOWERAUCTION_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "flowerauction._kernels._core",
                    ["src/flowerauction/_kernels/_core.pyx"],
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
