"""Builds the optional Cython ascent kernel; the package falls back to numpy
when the extension is missing."""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("COHNONLOCAL_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("cohnonlocal._ascent", ["src/cohnonlocal/_ascent.pyx"],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
