"""Builds the optional compiled trace kernel; the package works without it."""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ABSLOG_NO_EXT", "") not in ("1", "true", "yes"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize([Extension("abslogic._tracekernel", ["src/abslogic/_tracekernel.pyx"])],
                                language_level=3, quiet=True)

setup(ext_modules=ext_modules)
