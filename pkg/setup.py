import os
import sys

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

openmp = [] if sys.platform == "darwin" or os.environ.get("FRUGALBOOST_NO_OPENMP") else ["-fopenmp"]

ext_modules = []
if cythonize is not None and not os.environ.get("FRUGALBOOST_NO_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "frugalboost._splitter",
                ["src/frugalboost/_splitter.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"] + openmp,
                extra_link_args=openmp,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
