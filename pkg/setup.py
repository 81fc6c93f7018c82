# Builds the optional Cython search kernel. Set LIPDIST_PURE=1 to skip it;
# the package then runs on the pure-Python kernel.
import os

from setuptools import Extension, setup


def extensions():
    if os.environ.get("LIPDIST_PURE"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "lipdist._csearch",
        ["src/lipdist/_csearch.pyx"],
        extra_compile_args=["-O3"],
        optional=True,
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )


setup(ext_modules=extensions())
